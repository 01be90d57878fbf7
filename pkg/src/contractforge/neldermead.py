"""Derivative-free Nelder-Mead minimization with box constraints.

Standard simplex coefficients: reflection 1, expansion 2, contraction 0.5,
shrink 0.5.  Box bounds are enforced by clamping every candidate point, the
initial simplex is the start plus a 5%-of-range step per axis, and the run
is deterministic for a fixed start.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

REFLECTION = 1.0
EXPANSION = 2.0
CONTRACTION = 0.5
SHRINK = 0.5
_INIT_STEP = 0.05


def nelder_mead_minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    bounds: Sequence[tuple[float, float]],
    max_iter: int = 200,
    *,
    ftol: float = 0.0,
) -> tuple[np.ndarray, float]:
    """Minimize ``f`` over the box ``bounds`` starting at ``x0``.

    Returns the best point seen and its value after ``max_iter`` iterations
    (or earlier if the simplex value spread drops below ``ftol``).
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if lo.shape != (len(x0),) or np.any(~np.isfinite(lo)) or np.any(~np.isfinite(hi)):
        raise ValueError("bounds must be finite and match the dimension")

    def clamp(x: np.ndarray) -> np.ndarray:
        return np.minimum(hi, np.maximum(lo, x))

    x0 = clamp(np.asarray(x0, dtype=float))
    n = x0.size
    simplex = [x0]
    for i in range(n):
        step = np.zeros(n)
        step[i] = _INIT_STEP * (hi[i] - lo[i])
        simplex.append(clamp(x0 + step))
    values = [float(f(x)) for x in simplex]

    for _ in range(max_iter):
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        if ftol > 0 and values[-1] - values[0] <= ftol:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]

        reflected = clamp(centroid + REFLECTION * (centroid - worst))
        fr = float(f(reflected))
        if fr < values[0]:
            expanded = clamp(centroid + REFLECTION * EXPANSION * (centroid - worst))
            fe = float(f(expanded))
            if fe < fr:
                simplex[-1], values[-1] = expanded, fe
            else:
                simplex[-1], values[-1] = reflected, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = reflected, fr
            continue
        if fr < values[-1]:
            contracted = clamp(centroid + CONTRACTION * REFLECTION * (centroid - worst))
            fc = float(f(contracted))
            if fc <= fr:
                simplex[-1], values[-1] = contracted, fc
                continue
        else:
            contracted = clamp(centroid - CONTRACTION * (centroid - worst))
            fc = float(f(contracted))
            if fc < values[-1]:
                simplex[-1], values[-1] = contracted, fc
                continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = clamp(best + SHRINK * (simplex[i] - best))
            values[i] = float(f(simplex[i]))

    idx = int(np.argmin(values))
    return simplex[idx], values[idx]
