"""
Solver configuration: defaults, the SolverConfig value and the JSON settings loader.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Optional, Union

logger = logging.getLogger(__name__)

# Minimum mantissa width for any arithmetic scope (IEEE double).
MIN_BITS = 53
# Working width used when the caller does not ask for one.
DEFAULT_BITS = 128
# Precision ceiling is this many bits per 16 degrees (never below one block).
CEILING_BITS_PER_BLOCK = 4096
# FCS gives up once N exceeds this multiple of the FFT length L.
SAMPLE_CEILING = 2**16
# Extra bits carried above every tolerance-derived width.
GUARD_BITS = 32
# Upper bound on Newton-Schoenhage outer iterations.
MAX_NEWTON_STEPS = 60
# Upper bound on auxiliary-polynomial refinements per call.
MAX_AUX_STEPS = 60
# Taylor shift switches to divide-and-conquer above this degree.
DIRECT_SHIFT_MAX_DEGREE = 32
# Polynomial products switch to FFT multiplication above this length.
FFT_MULTIPLY_MIN_LENGTH = 64
# Environment variable naming a default settings file.
SETTINGS_ENV_VAR = "SPLITCIRCLE_SETTINGS"


@dataclass(frozen=True)
class SolverConfig:
    """
    Tunables shared by the numerical modules. All fields have safe defaults.
    """

    precision_bits: int = DEFAULT_BITS
    precision_ceiling_bits: Optional[int] = None
    sample_ceiling: int = SAMPLE_CEILING
    guard_bits: int = GUARD_BITS
    max_newton_steps: int = MAX_NEWTON_STEPS
    max_aux_steps: int = MAX_AUX_STEPS

    def __post_init__(self) -> None:
        if self.precision_bits < MIN_BITS:
            raise ValueError(f"precision_bits must be at least {MIN_BITS}, got {self.precision_bits}")
        if self.precision_ceiling_bits is not None and self.precision_ceiling_bits < MIN_BITS:
            raise ValueError("precision_ceiling_bits must be at least the minimum width")
        if self.sample_ceiling < 1 or self.guard_bits < 0:
            raise ValueError("sample_ceiling must be positive and guard_bits non-negative")

    def precision_ceiling(self, degree: int) -> int:
        """
        Largest working width allowed for a polynomial of the given degree.
        """
        if self.precision_ceiling_bits is not None:
            return self.precision_ceiling_bits
        return int(CEILING_BITS_PER_BLOCK * max(1.0, degree / 16))


DEFAULT_CONFIG = SolverConfig()


def load_settings(path: Path) -> dict[str, Any]:
    """
    Read a JSON settings file. Missing or malformed files yield an empty mapping.
    """
    if not path.exists():
        logger.warning("settings file %s not found; using defaults", path)
        return {}
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        logger.warning("settings file %s is not valid JSON (%s); using defaults", path, exc)
        return {}
    if not isinstance(data, dict):
        logger.warning("settings file %s must hold a JSON object; using defaults", path)
        return {}
    return data


def load_config(path: Optional[Union[str, Path]] = None, **overrides: Any) -> SolverConfig:
    """
    Build a SolverConfig from a settings file (or $SPLITCIRCLE_SETTINGS) plus overrides.
    """
    if path is None:
        env_path = os.environ.get(SETTINGS_ENV_VAR)
        path = Path(env_path) if env_path else None
    settings = load_settings(Path(path)) if path is not None else {}
    known = {f.name for f in fields(SolverConfig)}
    values = {key: value for key, value in settings.items() if key in known}
    ignored = sorted(set(settings) - known)
    if ignored:
        logger.debug("ignoring unknown settings keys: %s", ", ".join(ignored))
    values.update({key: value for key, value in overrides.items() if value is not None})
    return SolverConfig(**values)
