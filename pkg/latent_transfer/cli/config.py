"""
Run configuration file format

    # comment
    seed = 42
    output_dir = runs/toy

    [fgim]
    weights = 1.0, 2.0, 3.0
    lambda = 0.9

Top-level keys come before any section. Sections are [data], [ae],
[classifier], [fgim] and [eval]; missing keys keep their defaults and
unknown sections or keys are rejected with the offending line number.
"""

import dataclasses
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Union

from ..errors import ConfigError
from ..models.transfer_models import (
    AEHyperParams,
    ClassifierConfig,
    DataConfig,
    EvalConfig,
    FGIMConfig,
    RunConfig,
)

logger = logging.getLogger(__name__)

SECTIONS = {
    "data": DataConfig,
    "ae": AEHyperParams,
    "classifier": ClassifierConfig,
    "fgim": FGIMConfig,
    "eval": EvalConfig,
}
TOP_LEVEL = ("seed", "output_dir", "precision")

# file key -> dataclass field, per section
ALIASES = {"fgim": {"lambda": "decay"}}


def _field_for(section: str, key: str) -> str:
    return ALIASES.get(section, {}).get(key, key)


def _key_for(section: str, field_name: str) -> str:
    for key, name in ALIASES.get(section, {}).items():
        if name == field_name:
            return key
    return field_name


def _convert(default: Any, text: str) -> Any:
    """Parse text into the type of the field's default value"""
    if isinstance(default, Enum):
        return type(default)(text)
    if isinstance(default, tuple):
        element = type(default[0]) if default else str
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return tuple(element(p) for p in parts)
    if isinstance(default, bool):
        if text.lower() not in ("true", "false"):
            raise ValueError(f"expected true or false, got '{text}'")
        return text.lower() == "true"
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    return text


def _format(value: Any) -> str:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _defaults(cls) -> Dict[str, Any]:
    return {f.name: getattr(cls(), f.name) for f in dataclasses.fields(cls)}


def parse_config_text(text: str) -> RunConfig:
    """
    Parse configuration text into a validated RunConfig

    Raises:
        ConfigError: syntax errors and unknown keys carry the line number;
            invalid values carry the key name
    """
    top: Dict[str, Any] = {}
    sections: Dict[str, Dict[str, Any]] = {name: {} for name in SECTIONS}
    seen_sections = set()
    current = None
    top_defaults = _defaults(RunConfig)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header '{line}'", line=line_no)
            current = line[1:-1].strip()
            if current not in SECTIONS:
                raise ConfigError(f"unknown section [{current}]", line=line_no)
            if current in seen_sections:
                raise ConfigError(f"section [{current}] appears twice", line=line_no)
            seen_sections.add(current)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=line_no)
        key, value = (part.strip() for part in line.split("=", 1))

        if current is None:
            if key not in TOP_LEVEL:
                raise ConfigError(f"unknown top-level key '{key}'", line=line_no)
            target, default = top, top_defaults[key]
            name = key
        else:
            name = _field_for(current, key)
            defaults = _defaults(SECTIONS[current])
            if name not in defaults:
                raise ConfigError(f"unknown key '{key}' in [{current}]", line=line_no)
            target, default = sections[current], defaults[name]
        if name in target:
            raise ConfigError(f"duplicate key '{key}'", line=line_no)
        try:
            target[name] = _convert(default, value)
        except ValueError as e:
            raise ConfigError(f"invalid value for '{key}': {e}", line=line_no) from None

    config = RunConfig(**top, **{name: SECTIONS[name](**values) for name, values in sections.items()})
    config.validate()
    return config


def parse_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"configuration file not found: {path}")
    config = parse_config_text(path.read_text(encoding="utf-8"))
    logger.info(f"Loaded configuration from {path}")
    return config


def serialize_config(config: RunConfig) -> str:
    """Every key in declaration order; parse_config_text of the result equals config"""
    lines: List[str] = [f"{key} = {_format(getattr(config, key))}" for key in TOP_LEVEL]
    for section in SECTIONS:
        lines.append("")
        lines.append(f"[{section}]")
        block = getattr(config, section)
        for f in dataclasses.fields(block):
            lines.append(f"{_key_for(section, f.name)} = {_format(getattr(block, f.name))}")
    return "\n".join(lines) + "\n"


def apply_environment(config: RunConfig) -> RunConfig:
    """Environment overrides (LATENT_TRANSFER_PRECISION)"""
    override = os.getenv("LATENT_TRANSFER_PRECISION")
    if override:
        config.precision = override
        if override not in ("float32", "float64"):
            raise ConfigError("must be float32 or float64", key="LATENT_TRANSFER_PRECISION")
    return config
