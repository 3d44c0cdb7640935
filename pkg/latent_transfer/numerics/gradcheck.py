"""Central finite-difference gradient checking"""

from typing import Callable, List, Sequence

import numpy as np

from .tensor import Tensor, backward, precision


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a||, ||n||), with a floor for all-zero gradients"""
    a = np.asarray(analytic, dtype=np.float64).ravel()
    n = np.asarray(numeric, dtype=np.float64).ravel()
    denom = max(np.linalg.norm(a), np.linalg.norm(n), 1e-12)
    return float(np.linalg.norm(a - n) / denom)


def numeric_gradients(fn: Callable[[List[Tensor]], Tensor], arrays: Sequence[np.ndarray],
                      eps: float = 1e-6) -> List[np.ndarray]:
    """Central differences of fn in 64-bit precision"""
    with precision("float64"):
        base = [np.array(a, dtype=np.float64) for a in arrays]
        grads = []
        for index, array in enumerate(base):
            grad = np.zeros_like(array)
            for pos in np.ndindex(array.shape):
                original = array[pos]
                array[pos] = original + eps
                plus = fn([Tensor(a) for a in base]).item()
                array[pos] = original - eps
                minus = fn([Tensor(a) for a in base]).item()
                array[pos] = original
                grad[pos] = (plus - minus) / (2.0 * eps)
            grads.append(grad)
        return grads


def analytic_gradients(fn: Callable[[List[Tensor]], Tensor], arrays: Sequence[np.ndarray],
                       mode: str = "float64") -> List[np.ndarray]:
    with precision(mode):
        leaves = [Tensor(np.asarray(a), requires_grad=True) for a in arrays]
        backward(fn(leaves))
        return [leaf.grad.astype(np.float64) for leaf in leaves]


def gradient_check(fn: Callable[[List[Tensor]], Tensor], arrays: Sequence[np.ndarray],
                   mode: str = "float64", eps: float = 1e-6) -> float:
    """
    Compare the tape's gradients of a scalar function with central differences

    Args:
        fn: Maps a list of input tensors to a scalar tensor
        arrays: Input values, one per tensor
        mode: Precision of the analytic pass; the numeric reference is always 64-bit
        eps: Finite-difference step

    Returns:
        The largest relative error over all inputs
    """
    analytic = analytic_gradients(fn, arrays, mode)
    numeric = numeric_gradients(fn, arrays, eps)
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))
