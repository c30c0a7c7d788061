"""Least-squares identification of friction parameters.

Two targets: the steady-state curve sampled as (velocity, force) pairs,
and the analytic break-away curve sampled as (force rate, break-away
force) pairs. Both use the same projected, damped Gauss-Newton solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .analysis import Z_THRESHOLD
from .errors import DomainError, IdentifiabilityError
from .friction import FrictionParams

MAX_ITERATIONS = 500
STEP_TOL = 1e-10
JACOBIAN_STEP = 1e-6
MAX_HALVINGS = 40

DEFAULT_BOUNDS: dict[str, tuple[float, float]] = {
    "F_c": (1e-12, math.inf),
    "F_s": (1e-12, math.inf),
    "sigma": (0.0, math.inf),
    "V": (1e-12, math.inf),
    "delta_exp": (1e-3, 20.0),
    "s": (1e-12, math.inf),
}


@dataclass(frozen=True)
class FitResult:
    params: FrictionParams
    residual_norm: float
    iterations: int
    converged: bool
    free: tuple[str, ...] = ()
    objective_history: tuple[float, ...] = field(default=(), repr=False)


def stribeck_model(theta: Mapping[str, float], v: np.ndarray) -> np.ndarray:
    level = theta["F_c"] + (theta["F_s"] - theta["F_c"]) * np.exp(-((np.abs(v) / theta["V"]) ** theta["delta_exp"]))
    return np.sign(v) * level + theta["sigma"] * v


def breakaway_model(theta: Mapping[str, float], k: np.ndarray, z_th: float = Z_THRESHOLD) -> np.ndarray:
    """Average-level break-away curve; mirrors analysis.breakaway_force."""
    average = theta["F_c"] + (theta["F_s"] - theta["F_c"]) / 2.0
    v_th = -k / (average * math.log(z_th))
    return theta["F_c"] + (theta["F_s"] - theta["F_c"]) * np.exp(-((v_th / theta["V"]) ** theta["delta_exp"])) + theta["sigma"] * v_th


def _resolve_bounds(bounds: Mapping[str, tuple[float, float]] | None) -> dict[str, tuple[float, float]]:
    merged = dict(DEFAULT_BOUNDS)
    for key, (lo, hi) in (bounds or {}).items():
        if key not in merged:
            raise DomainError(f"unknown parameter in bounds: {key!r}")
        if not lo <= hi:
            raise DomainError(f"empty bound interval for {key}: ({lo}, {hi})")
        merged[key] = (float(lo), float(hi))
    return merged


def _project(theta: dict[str, float], free: Sequence[str], bounds) -> dict[str, float]:
    out = dict(theta)
    for key in free:
        lo, hi = bounds[key]
        out[key] = min(max(out[key], lo), hi)
    if out["F_s"] < out["F_c"]:
        # restore the ordering by moving whichever side is free
        if "F_s" in free:
            out["F_s"] = min(out["F_c"], bounds["F_s"][1])
        if out["F_s"] < out["F_c"] and "F_c" in free:
            out["F_c"] = max(out["F_s"], bounds["F_c"][0])
    return out


def _jacobian(residual, theta, free, bounds):
    columns = []
    for key in free:
        h = JACOBIAN_STEP * max(abs(theta[key]), 1e-8)
        lo, hi = bounds[key]
        up = dict(theta)
        down = dict(theta)
        if theta[key] - h < lo:
            # one-sided at the lower bound
            up[key] = theta[key] + h
            columns.append((residual(up) - residual(theta)) / h)
        elif theta[key] + h > hi:
            down[key] = theta[key] - h
            columns.append((residual(theta) - residual(down)) / h)
        else:
            up[key] = theta[key] + h
            down[key] = theta[key] - h
            columns.append((residual(up) - residual(down)) / (2.0 * h))
    return np.column_stack(columns)


def gauss_newton(residual, theta0: dict[str, float], free: Sequence[str], bounds, tol: float | None = None):
    """Projected Gauss-Newton with backtracking on the sum of squares.

    Returns (theta, residual_norm, iterations, converged, history). The
    objective never increases across accepted iterations.
    """
    theta = _project(theta0, free, bounds)
    r = residual(theta)
    objective = float(r @ r)
    history = [objective]
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        J = _jacobian(residual, theta, free, bounds)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        alpha = 1.0
        accepted = None
        for _ in range(MAX_HALVINGS):
            trial = dict(theta)
            for key, delta in zip(free, step):
                trial[key] = theta[key] + alpha * delta
            trial = _project(trial, free, bounds)
            r_trial = residual(trial)
            obj_trial = float(r_trial @ r_trial)
            if np.isfinite(obj_trial) and obj_trial <= objective:
                accepted = (trial, r_trial, obj_trial)
                break
            alpha *= 0.5
        if accepted is None:
            # no descent along the projected step: stationary to working precision
            converged = True
            break
        trial, r_trial, obj_trial = accepted
        moved = math.sqrt(sum((trial[key] - theta[key]) ** 2 for key in free))
        scale = math.sqrt(sum(theta[key] ** 2 for key in free))
        theta, r, objective = trial, r_trial, obj_trial
        history.append(objective)
        if moved <= STEP_TOL * max(scale, 1e-12) or objective == 0.0:
            converged = True
            break
    norm = math.sqrt(objective)
    if tol is not None and norm > tol:
        converged = False
    return theta, norm, iterations, converged, history


def _check_init(init: FrictionParams, free: Sequence[str], bounds) -> dict[str, float]:
    theta = init.as_dict()
    for key in free:
        lo, hi = bounds[key]
        if not lo <= theta[key] <= hi:
            raise DomainError(f"initial {key}={theta[key]} lies outside its bounds ({lo}, {hi})")
    return theta


def _check_rank(residual, theta, free, bounds):
    # judge the data, not the starting point: a closed Stribeck gap makes the
    # V and delta columns vanish for any data set, so probe with it opened
    probe = dict(theta)
    if probe["F_s"] - probe["F_c"] <= 1e-6 * probe["F_c"]:
        probe["F_s"] = probe["F_c"] * 1.5
    J = _jacobian(residual, probe, free, bounds)
    rank = np.linalg.matrix_rank(J)
    if rank < len(free):
        raise IdentifiabilityError(
            f"data determine only {rank} of {len(free)} free parameters ({', '.join(free)})"
        )


def _as_pairs(data, name: str) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError(f"{name} data must be a sequence of pairs")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} data contains non-finite values")
    return arr[:, 0], arr[:, 1]


def fit_stribeck(
    data,
    init: FrictionParams | None = None,
    bounds: Mapping[str, tuple[float, float]] | None = None,
    fit_delta: bool = False,
    fit_sigma: bool = True,
    tol: float | None = None,
) -> FitResult:
    """Fit the steady-state curve to (velocity, force) samples.

    ``delta_exp`` stays at its initial value unless ``fit_delta`` is set; it
    is weakly determined by sparse velocity grids. ``tol``, when given, is
    the residual norm a converged fit must reach.
    """
    init = init or FrictionParams()
    v, force = _as_pairs(data, "stribeck")
    free = ["F_c", "F_s"] + (["sigma"] if fit_sigma else []) + ["V"] + (["delta_exp"] if fit_delta else [])
    if len(v) < 5:
        raise IdentifiabilityError(f"need at least 5 data points, got {len(v)}")
    if len(np.unique(np.abs(v))) < len(free):
        raise IdentifiabilityError(
            f"need at least {len(free)} distinct speeds for {len(free)} free parameters, "
            f"got {len(np.unique(np.abs(v)))}"
        )
    b = _resolve_bounds(bounds)
    theta0 = _check_init(init, free, b)

    def residual(theta):
        return stribeck_model(theta, v) - force

    _check_rank(residual, theta0, free, b)
    theta, norm, iterations, converged, history = gauss_newton(residual, theta0, free, b, tol)
    return FitResult(FrictionParams(**theta), norm, iterations, converged, tuple(free), tuple(history))


def fit_breakaway_curve(
    data,
    init: FrictionParams | None = None,
    z_th: float = Z_THRESHOLD,
    bounds: Mapping[str, tuple[float, float]] | None = None,
    fit_delta: bool = False,
    tol: float | None = None,
) -> FitResult:
    """Fit the Average-level break-away curve to (k, F_ba) samples at fixed ``z_th``."""
    init = init or FrictionParams()
    if not (0.0 < z_th < 1.0):
        raise DomainError(f"z_th must lie in (0, 1), got {z_th}")
    k, force = _as_pairs(data, "breakaway")
    free = ["F_c", "F_s", "V"] + (["delta_exp"] if fit_delta else [])
    if len(k) < 4:
        raise IdentifiabilityError(f"need at least 4 (k, F_ba) points, got {len(k)}")
    if np.any(k <= 0):
        raise DomainError("force rates k must be positive")
    if len(np.unique(k)) != len(k):
        raise IdentifiabilityError("force rates k must be distinct")
    b = _resolve_bounds(bounds)
    theta0 = _check_init(init, free, b)

    def residual(theta):
        return breakaway_model(theta, k, z_th) - force

    _check_rank(residual, theta0, free, b)
    theta, norm, iterations, converged, history = gauss_newton(residual, theta0, free, b, tol)
    return FitResult(FrictionParams(**theta), norm, iterations, converged, tuple(free), tuple(history))

