"""
Tensor and Tape: the reverse-mode autodiff core

A Tensor wraps a numpy array. Operations in numerics.ops record a Node on the
current thread's Tape whenever gradient mode is on and one of their inputs
requires a gradient. backward() replays that tape once, in reverse creation
order, and accumulates into the .grad buffers of leaf tensors.
"""

import contextlib
import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import AutodiffError, ContractError

logger = logging.getLogger(__name__)

_PRECISIONS = {"float32": np.float32, "float64": np.float64}
_dtype = np.float32
_local = threading.local()


def set_precision(name: str) -> None:
    """Switch the dtype used for newly created tensors ("float32" or "float64")"""
    global _dtype
    if name not in _PRECISIONS:
        raise ContractError(f"Unknown precision '{name}', expected one of {sorted(_PRECISIONS)}")
    _dtype = _PRECISIONS[name]


def get_dtype() -> type:
    return _dtype


def get_precision() -> str:
    return "float64" if _dtype is np.float64 else "float32"


@contextlib.contextmanager
def precision(name: str) -> Iterator[None]:
    """Temporarily switch precision"""
    previous = get_precision()
    set_precision(name)
    try:
        yield
    finally:
        set_precision(previous)


def grad_enabled() -> bool:
    return getattr(_local, "grad_enabled", True)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Disable recording for the enclosed block (inference, evaluation)"""
    previous = grad_enabled()
    _local.grad_enabled = False
    try:
        yield
    finally:
        _local.grad_enabled = previous


BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@dataclass
class Node:
    """One recorded primitive: its output, its inputs and the adjoint rule"""

    out: "Tensor"
    inputs: Tuple["Tensor", ...]
    backward: BackwardFn
    op: str


@dataclass
class Tape:
    """Ordered record of primitive operations for one forward pass"""

    nodes: List[Node] = field(default_factory=list)
    consumed: bool = False

    def record(self, node: Node) -> None:
        if self.consumed:
            raise AutodiffError("Cannot record onto a tape that was already replayed")
        self.nodes.append(node)

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, *exc) -> None:
        _tape_stack().pop()

    def __len__(self) -> int:
        return len(self.nodes)


def _tape_stack() -> List[Tape]:
    stack = getattr(_local, "tapes", None)
    if stack is None:
        stack = []
        _local.tapes = stack
    return stack


def current_tape() -> Tape:
    """The innermost explicit tape, else the thread's implicit tape (renewed once consumed)"""
    stack = _tape_stack()
    if stack:
        return stack[-1]
    tape = getattr(_local, "implicit", None)
    if tape is None or tape.consumed:
        tape = Tape()
        _local.implicit = tape
    return tape


class Tensor:
    """
    Shaped floating-point array taking part in reverse-mode autodiff

    Leaf tensors created with requires_grad=True own a zero-initialised grad
    buffer of the same shape. Tensors produced by operations never hold a grad
    buffer; their adjoints only live inside backward().
    """

    def __init__(self, data, requires_grad: bool = False, _leaf: bool = True):
        self.data = np.asarray(data, dtype=_dtype)
        self.requires_grad = requires_grad
        self.is_leaf = _leaf
        self.grad: Optional[np.ndarray] = (
            np.zeros_like(self.data) if (requires_grad and _leaf) else None
        )
        self._tape: Optional[Tape] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        """Same values, outside the graph"""
        out = Tensor.__new__(Tensor)
        out.data = self.data
        out.requires_grad = False
        out.is_leaf = True
        out.grad = None
        out._tape = None
        return out

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad.fill(0.0)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # Operator sugar, implemented in numerics.ops
    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from . import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from . import ops
        return ops.mul(other, self)

    def __truediv__(self, other):
        from . import ops
        return ops.div(self, other)

    def __neg__(self):
        from . import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def __getitem__(self, index):
        from . import ops
        return ops.getitem(self, index)


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def make_result(data: np.ndarray, inputs: Sequence[Tensor], backward_fn: BackwardFn, op: str) -> Tensor:
    """Wrap an op's forward value and record it when any input needs a gradient"""
    needs_grad = grad_enabled() and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=needs_grad, _leaf=not needs_grad)
    if needs_grad:
        tape = current_tape()
        tape.record(Node(out=out, inputs=tuple(inputs), backward=backward_fn, op=op))
        out._tape = tape
    return out


def backward(loss: Tensor) -> None:
    """
    Replay the tape that produced loss and accumulate leaf gradients

    Args:
        loss: Scalar tensor (exactly one element) produced by recorded operations

    Raises:
        AutodiffError: non-scalar loss, loss outside any graph, or a tape
            that was already replayed
    """
    if loss.size != 1:
        raise AutodiffError(f"backward() needs a scalar loss, got shape {loss.shape}")
    tape = loss._tape
    if tape is None:
        raise AutodiffError("backward() called on a tensor that was not produced by a recorded operation")
    if tape.consumed:
        raise AutodiffError("backward() called twice on the same tape; run a fresh forward pass")

    adjoints = {id(loss): np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        grad_out = adjoints.pop(id(node.out), None)
        if grad_out is None:
            continue
        input_grads = node.backward(grad_out)
        for tensor, grad in zip(node.inputs, input_grads):
            if grad is None or not tensor.requires_grad:
                continue
            if tensor.is_leaf:
                tensor.grad += grad.astype(tensor.grad.dtype, copy=False)
            else:
                key = id(tensor)
                if key in adjoints:
                    adjoints[key] = adjoints[key] + grad
                else:
                    adjoints[key] = grad

    tape.consumed = True
    tape.nodes.clear()
