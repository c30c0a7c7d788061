"""Steady-state (Stribeck) friction curve and presliding hysteresis.

The presliding branch that starts at a motion reversal is

    F = F_r + (F_target - F_r) * z * (1 - ln z)

where ``z`` is the scaled distance travelled since the reversal and
``F_target`` the signed steady-state friction. At ``z = 1`` the branch
meets the steady-state curve and the contact is in gross sliding.

Everything here is pure: parameters and states are frozen value objects
and every transition returns a new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

PARAM_KEYS = ("F_c", "F_s", "sigma", "V", "delta_exp", "s")


@dataclass(frozen=True)
class FrictionParams:
    """Model constants.

    Attributes
    ----------
    F_c : float
        Coulomb friction level.
    F_s : float
        Stiction level, the steady-state friction at vanishing velocity.
    sigma : float
        Linear viscous coefficient.
    V : float
        Stribeck velocity scale.
    delta_exp : float
        Stribeck shape exponent.
    s : float
        Presliding scale; ``z = s * distance`` since the last reversal.
    """

    F_c: float = 1.0
    F_s: float = 1.5
    sigma: float = 0.0
    V: float = 0.1
    delta_exp: float = 1.0
    s: float = 1.0

    def __post_init__(self):
        for key in PARAM_KEYS:
            value = getattr(self, key)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{key} must be a finite number, got {value!r}")
            object.__setattr__(self, key, float(value))
        if self.F_c <= 0:
            raise DomainError(f"F_c must be > 0, got {self.F_c}")
        if self.F_s < self.F_c:
            raise DomainError(f"F_s must be >= F_c, got F_s={self.F_s}, F_c={self.F_c}")
        if self.sigma < 0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")
        if self.V <= 0:
            raise DomainError(f"V must be > 0, got {self.V}")
        if self.delta_exp <= 0:
            raise DomainError(f"delta_exp must be > 0, got {self.delta_exp}")
        if self.s <= 0:
            raise DomainError(f"s must be > 0, got {self.s}")

    def as_dict(self) -> dict[str, float]:
        return {key: getattr(self, key) for key in PARAM_KEYS}

    def with_(self, **changes) -> "FrictionParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PreslidingState:
    """Reversal bookkeeping.

    ``z`` is the normalized distance since the last reversal (always
    nonnegative, direction lives in ``dir``), ``F_r`` the friction at that
    reversal.
    """

    z: float = 0.0
    F_r: float = 0.0
    dir: int = 0

    def __post_init__(self):
        if not (0.0 <= self.z <= 1.0):
            raise DomainError(f"presliding distance z must lie in [0, 1], got {self.z}")
        if not math.isfinite(self.F_r):
            raise DomainError(f"F_r must be finite, got {self.F_r}")
        if self.dir not in (-1, 0, 1):
            raise DomainError(f"dir must be -1, 0 or +1, got {self.dir}")
        if self.dir == 0 and (self.z != 0.0 or self.F_r != 0.0):
            raise DomainError("dir = 0 is reserved for the idle state (z = 0, F_r = 0)")


IDLE = PreslidingState()


def _sign(value: float) -> int:
    return (value > 0) - (value < 0)


def stribeck(params: FrictionParams, v: float) -> float:
    """Signed steady-state friction at velocity ``v`` (zero at ``v = 0``)."""
    if not math.isfinite(v):
        raise DomainError(f"velocity must be finite, got {v!r}")
    if v == 0.0:
        return 0.0
    p = params
    decay = math.exp(-((abs(v) / p.V) ** p.delta_exp))
    return math.copysign(p.F_c + (p.F_s - p.F_c) * decay, v) + p.sigma * v


def stribeck_magnitude(params: FrictionParams, speed: float) -> float:
    """``F_c + (F_s - F_c) exp(-(|v|/V)^delta) + sigma |v|``; equals ``F_s`` at rest."""
    p = params
    speed = abs(speed)
    return p.F_c + (p.F_s - p.F_c) * math.exp(-((speed / p.V) ** p.delta_exp)) + p.sigma * speed


def stribeck_curve(params: FrictionParams, v) -> np.ndarray:
    """Vectorized :func:`stribeck` over an array of velocities."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("velocities must be finite")
    p = params
    level = p.F_c + (p.F_s - p.F_c) * np.exp(-((np.abs(v) / p.V) ** p.delta_exp))
    return np.sign(v) * level + p.sigma * v


def presliding_shape(z: float) -> float:
    """Hysteresis shape ``z (1 - ln z)`` on [0, 1], continuous at ``z = 0``."""
    if not (0.0 <= z <= 1.0):
        raise DomainError(f"z must lie in [0, 1], got {z!r}")
    if z == 0.0:
        return 0.0
    return z * (1.0 - math.log(z))


def _shape(z: float) -> float:
    # unchecked twin of presliding_shape for the integrator's inner loop
    return 0.0 if z <= 0.0 else z * (1.0 - math.log(z))


def target_force(params: FrictionParams, state: PreslidingState, v: float) -> float:
    """Signed steady-state value the current branch converges to."""
    if v != 0.0:
        return stribeck(params, v)
    return state.dir * params.F_s


def friction_force(params: FrictionParams, state: PreslidingState, v: float) -> float:
    """Instantaneous friction on the presliding branch described by ``state``.

    Returns ``F_r`` at ``z = 0`` and the steady-state target at ``z = 1``.
    A velocity of exactly zero is read as the quasi-static limit of the
    current direction, so the target becomes ``dir * F_s``.
    """
    if not math.isfinite(v):
        raise DomainError(f"velocity must be finite, got {v!r}")
    # viscous friction may legitimately push a captured F_r past F_s
    if params.sigma == 0.0 and abs(state.F_r) > params.F_s * (1.0 + 1e-12):
        raise DomainError(f"|F_r| = {abs(state.F_r)} exceeds the stiction level {params.F_s}")
    target = target_force(params, state, v)
    if state.z == 1.0:
        return target
    return state.F_r + (target - state.F_r) * presliding_shape(state.z)


def advance_state(
    params: FrictionParams, state: PreslidingState, dx: float, v: float = 0.0
) -> PreslidingState:
    """Move the contact by a signed displacement ``dx``.

    Motion along ``dir`` (or any motion from idle) accumulates ``s * |dx|``
    onto ``z``, saturating at 1. Motion against ``dir`` is a reversal: the
    friction just before it (evaluated at velocity ``v``, quasi-static by
    default) becomes the new ``F_r`` and ``z`` restarts from zero.
    """
    if not math.isfinite(dx):
        raise DomainError(f"dx must be finite, got {dx!r}")
    direction = _sign(dx)
    if direction == 0:
        return state
    step = params.s * abs(dx)
    if state.dir == 0 or direction == state.dir:
        return PreslidingState(z=min(1.0, state.z + step), F_r=state.F_r, dir=direction)
    F_rev = friction_force(params, state, v)
    return PreslidingState(z=min(1.0, step), F_r=F_rev, dir=direction)


def reverse(state: PreslidingState, F_now: float) -> PreslidingState:
    """Reversal with an externally known pre-reversal friction value."""
    if state.dir == 0:
        raise DomainError("cannot reverse from the idle state")
    return PreslidingState(z=0.0, F_r=F_now, dir=-state.dir)


def relax_branch(F_prev: float, target: float, z_prev: float, z_next: float) -> float:
    """Carry a friction value along a branch from ``z_prev`` to ``z_next``.

    Exact solution of ``dF/dz = (target - F) * shape'(z) / (1 - shape(z))``
    for a frozen ``target``. When ``F_prev`` already lies on the branch
    ``F_r + (target - F_r) * shape(z)`` the result is that branch evaluated at
    ``z_next``; otherwise it pulls ``F`` onto ``target`` by ``z = 1``.
    """
    remaining = 1.0 - _shape(z_prev)
    if remaining <= 0.0 or z_next >= 1.0:
        return target
    ratio = (1.0 - _shape(z_next)) / remaining
    return target - (target - F_prev) * ratio

