"""Analytic break-away prediction from the quasi-static presliding balance.

Neglecting inertia and the velocity sensitivity of friction during
presliding, a ramp force ``u = k t`` is balanced when the presliding
stiffness times the velocity equals the force rate. This gives the
velocity profile

    v(z) = -k / (F_ss * ln z)

and the break-away force is the steady-state friction at the velocity
reached at a threshold distance ``z_th`` (0.95 by default).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, NonClosedLoop
from .friction import (
    IDLE,
    FrictionParams,
    PreslidingState,
    advance_state,
    friction_force,
    stribeck,
    stribeck_magnitude,
)

Z_THRESHOLD = 0.95

# SelfConsistent fixed-point settings
RELAXATION = 0.5
MAX_ITERATIONS = 200
STEP_TOL = 1e-12
RESIDUAL_TOL = 1e-10


class SteadyStateChoice(str, enum.Enum):
    """Which steady-state level stands in for F_ss in the velocity profile."""

    COULOMB = "CoulombLevel"
    STICTION = "StictionLevel"
    AVERAGE = "Average"
    SELF_CONSISTENT = "SelfConsistent"

    @classmethod
    def parse(cls, text: str) -> "SteadyStateChoice":
        for member in cls:
            if text.lower() in (member.value.lower(), member.name.lower()):
                return member
        names = ", ".join(m.value for m in cls)
        raise DomainError(f"unknown steady-state choice {text!r} (expected one of {names})")


FIGURE_CHOICES = (SteadyStateChoice.COULOMB, SteadyStateChoice.STICTION, SteadyStateChoice.AVERAGE)


@dataclass(frozen=True)
class BreakawayPoint:
    k: float
    v_th: float
    F_ba: float


@dataclass(frozen=True)
class BreakawaySweep:
    z_th: float
    choice: SteadyStateChoice
    points: tuple[BreakawayPoint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ks = [p.k for p in self.points]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise DomainError("sweep points must be strictly increasing in k")

    @property
    def k(self) -> np.ndarray:
        return np.array([p.k for p in self.points])

    @property
    def v_th(self) -> np.ndarray:
        return np.array([p.v_th for p in self.points])

    @property
    def F_ba(self) -> np.ndarray:
        return np.array([p.F_ba for p in self.points])


def default_k_grid() -> np.ndarray:
    """0.01, 2.01, ..., 28.01: start 0.01, step 2, capped at 30."""
    return 0.01 + 2.0 * np.arange(15)


def default_z_grid() -> np.ndarray:
    return np.linspace(0.01, 0.99, 99)


def steady_state_level(params: FrictionParams, choice: SteadyStateChoice) -> float:
    """Constant F_ss used by the three fixed choices."""
    choice = SteadyStateChoice(choice)
    if choice is SteadyStateChoice.COULOMB:
        return params.F_c
    if choice is SteadyStateChoice.STICTION:
        return params.F_s
    if choice is SteadyStateChoice.AVERAGE:
        return params.F_c + (params.F_s - params.F_c) / 2.0
    raise DomainError("SelfConsistent has no constant level; use self_consistent_velocity")


def _check_rate(k: float) -> None:
    if not (math.isfinite(k) and k > 0):
        raise DomainError(f"force rate k must be positive and finite, got {k!r}")


def _check_z_open(z: float, name: str = "z") -> None:
    if not (0.0 < z < 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {z!r}")


def presliding_velocity(k: float, F_ss: float, z: float) -> float:
    """Quasi-static presliding velocity ``-k / (F_ss ln z)``."""
    _check_rate(k)
    if not (math.isfinite(F_ss) and F_ss > 0):
        raise DomainError(f"steady-state level must be positive, got {F_ss!r}")
    _check_z_open(z)
    return -k / (F_ss * math.log(z))


def self_consistent_velocity(params: FrictionParams, k: float, z: float) -> float:
    """Solve ``v = k / (|stribeck(v)| |ln z|)`` by damped fixed-point iteration.

    Starts from the Average-level velocity. Raises ConvergenceError with the
    last iterate when the budget runs out or the converged point misses the
    residual tolerance.
    """
    _check_rate(k)
    _check_z_open(z)
    log_z = abs(math.log(z))
    v = presliding_velocity(k, steady_state_level(params, SteadyStateChoice.AVERAGE), z)
    for _ in range(MAX_ITERATIONS):
        v_new = (1.0 - RELAXATION) * v + RELAXATION * k / (stribeck_magnitude(params, v) * log_z)
        step = abs(v_new - v)
        v = v_new
        if step < STEP_TOL * v:
            residual = abs(v * stribeck_magnitude(params, v) * log_z - k)
            if residual <= RESIDUAL_TOL * k:
                return v
            break
    residual = abs(v * stribeck_magnitude(params, v) * log_z - k)
    raise ConvergenceError(
        f"self-consistent velocity did not converge for k={k}, z={z}", last_iterate=v, residual=residual
    )


def threshold_velocity(params: FrictionParams, choice: SteadyStateChoice, k: float, z: float) -> float:
    choice = SteadyStateChoice(choice)
    if choice is SteadyStateChoice.SELF_CONSISTENT:
        return self_consistent_velocity(params, k, z)
    return presliding_velocity(k, steady_state_level(params, choice), z)


def phase_diagram(
    params: FrictionParams,
    choice: SteadyStateChoice = SteadyStateChoice.AVERAGE,
    k_values: Iterable[float] | None = None,
    z_grid: Iterable[float] | None = None,
) -> np.ndarray:
    """Tabulate the presliding velocity profile as rows ``(k, z, v)``.

    Rows are ordered by k, then z (both sorted ascending).
    """
    ks = np.sort(np.asarray(default_k_grid() if k_values is None else list(k_values), dtype=float))
    zs = np.sort(np.asarray(default_z_grid() if z_grid is None else list(z_grid), dtype=float))
    if ks.size == 0 or zs.size == 0:
        raise DomainError("phase diagram needs at least one k and one z")
    rows = [(k, z, threshold_velocity(params, choice, float(k), float(z))) for k in ks for z in zs]
    return np.array(rows, dtype=float).reshape(-1, 3)


def breakaway_force(
    params: FrictionParams,
    choice: SteadyStateChoice = SteadyStateChoice.AVERAGE,
    k: float = 1.0,
    z_th: float = Z_THRESHOLD,
) -> BreakawayPoint:
    """Break-away force: steady-state friction at the threshold velocity."""
    _check_z_open(z_th, "z_th")
    v_th = threshold_velocity(params, choice, k, z_th)
    return BreakawayPoint(k=float(k), v_th=v_th, F_ba=abs(stribeck(params, v_th)))


def breakaway_sweep(
    params: FrictionParams,
    choice: SteadyStateChoice = SteadyStateChoice.AVERAGE,
    k_values: Iterable[float] | None = None,
    z_th: float = Z_THRESHOLD,
) -> BreakawaySweep:
    ks = sorted(set(float(k) for k in (default_k_grid() if k_values is None else k_values)))
    if not ks:
        raise DomainError("k_values must be nonempty")
    choice = SteadyStateChoice(choice)
    points = tuple(breakaway_force(params, choice, k, z_th) for k in ks)
    return BreakawaySweep(z_th=z_th, choice=choice, points=points)


# -- hysteresis loop area -------------------------------------------------------


@dataclass(frozen=True)
class LoopAreaRow:
    amplitude: float
    area: float
    cycles: int


@dataclass(frozen=True)
class LoopAreaReport:
    rows: tuple[LoopAreaRow, ...]
    exponent: float | None  # None when fewer than two amplitudes


def _swing(params, state, F, distance, n):
    # one monotone half-cycle; returns state, forces along the way
    dx = distance / n
    forces = np.empty(n + 1)
    forces[0] = F
    for i in range(n):
        state = advance_state(params, state, dx)
        forces[i + 1] = friction_force(params, state, 0.0)
    return state, forces


def loop_area(
    params: FrictionParams,
    amplitude: float,
    points_per_swing: int = 4000,
    closure_tol: float = 1e-9,
    max_cycles: int = 2000,
) -> LoopAreaRow:
    """Area of the settled quasi-static loop for a z-excursion ``amplitude``.

    The contact is swung back and forth over a displacement of
    ``amplitude / s`` until the turning-point friction repeats to within
    ``closure_tol * F_s``; the enclosed area of one more densely sampled cycle
    is then integrated with the trapezoid rule.
    """
    if not (0.0 < amplitude <= 1.0):
        raise DomainError(f"amplitude must lie in (0, 1], got {amplitude!r}")
    distance = amplitude / params.s
    # the turning-point friction obeys an affine contraction from cycle to
    # cycle, so three iterates fix its limit exactly (Aitken extrapolation);
    # plain iteration is kept for cases where that estimate is ill-conditioned
    state = advance_state(params, IDLE, distance)
    turning = [friction_force(params, state, 0.0)]
    for cycle in range(1, max_cycles + 1):
        state = advance_state(params, state, -distance)
        state = advance_state(params, state, distance)
        turning.append(friction_force(params, state, 0.0))
        gap = turning[-1] - turning[-2]
        if abs(gap) <= closure_tol * params.F_s * 1e-3:
            break
        if len(turning) >= 3:
            prev = turning[-2] - turning[-3]
            if prev != 0.0 and abs(gap - prev) > 1e-3 * abs(prev):
                limit = turning[-1] - gap * gap / (gap - prev)
                state = PreslidingState(z=state.z, F_r=-limit, dir=state.dir)
                turning.append(friction_force(params, state, 0.0))
                break
    else:
        raise NonClosedLoop(
            f"loop at amplitude {amplitude} did not settle within {max_cycles} cycles "
            f"(last change {abs(turning[-1] - turning[-2]):.3e})"
        )
    F_turn = turning[-1]
    start = F_turn
    state, down = _swing(params, state, start, -distance, points_per_swing)
    state, up = _swing(params, state, down[-1], distance, points_per_swing)
    if abs(up[-1] - start) > closure_tol * params.F_s * 10:
        raise NonClosedLoop(f"dense cycle at amplitude {amplitude} left residual {abs(up[-1] - start):.3e}")
    dx = distance / points_per_swing
    # oriented area: integral of F dx going up minus going down over the same span
    area = np.trapezoid(up, dx=dx) - np.trapezoid(down, dx=dx)
    return LoopAreaRow(amplitude=float(amplitude), area=float(area), cycles=cycle)


def loop_area_diagnostic(
    params: FrictionParams, amplitudes: Sequence[float], points_per_swing: int = 4000
) -> LoopAreaReport:
    """Loop areas over several amplitudes plus the fitted power-law exponent.

    The exponent is the slope of log(area) against log(amplitude); it is
    reported for inspection and never asserted against a target value.
    """
    amps = sorted(float(a) for a in amplitudes)
    if not amps:
        raise DomainError("need at least one amplitude")
    rows = tuple(loop_area(params, a, points_per_swing) for a in amps)
    exponent = None
    if len(set(amps)) >= 2:
        slope, _ = np.polyfit(np.log([r.amplitude for r in rows]), np.log([r.area for r in rows]), 1)
        exponent = float(slope)
    return LoopAreaReport(rows=rows, exponent=exponent)
