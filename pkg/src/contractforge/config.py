"""Numeric tolerance configuration shared by every feasibility/implication check.

A single global tolerance governs all comparisons.  Comparisons are scaled:
``a <= b`` is accepted when ``a <= b + tol * max(1, |a|, |b|)`` so that the
same knob works for constraints whose magnitudes range from fractions of a
percent to hundreds of kilowatts.
"""

from __future__ import annotations

import os

DEFAULT_TOLERANCE = 1e-7

_tolerance = DEFAULT_TOLERANCE

ENV_VAR = "CONTRACT_FORGE_TOL"


def get_tolerance() -> float:
    return _tolerance


def set_tolerance(value: float) -> None:
    global _tolerance
    if not (value > 0):
        raise ValueError(f"tolerance must be positive, got {value!r}")
    _tolerance = value


def load_tolerance_from_env() -> float:
    """Apply the CONTRACT_FORGE_TOL override, if set.  Returns the tolerance."""
    raw = os.environ.get(ENV_VAR)
    if raw:
        set_tolerance(float(raw))
    return _tolerance


def leq_tol(a: float, b: float) -> bool:
    """a <= b up to the scaled global tolerance."""
    return a <= b + _tolerance * max(1.0, abs(a), abs(b))


def eq_tol(a: float, b: float) -> bool:
    return leq_tol(a, b) and leq_tol(b, a)
