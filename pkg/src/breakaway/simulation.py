"""Time-domain integration of a mass driven by a ramp force against friction.

The equation of motion is ``m x'' + F = k t``. The friction force ``F``
is carried as a state. Between reversals it is transported along the
presliding branch by :func:`breakaway.friction.relax_branch`, with the
branch target given by the steady-state curve at the current velocity.
This makes ``F`` depend on displacement history and not on the
instantaneous velocity, so inside a branch ``dF/dv = 0``. For a constant
target the transport reproduces
:func:`breakaway.friction.friction_force` exactly. At ``z = 1`` it hands
over to the steady-state curve.

Integration is fixed-step RK4. A change of velocity sign is localized by
bisection, then the presliding state is reset with the friction at that
instant as the new reversal value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, SimulationBlowUp, StepRejected
from .friction import IDLE, FrictionParams, PreslidingState, advance_state, friction_force, relax_branch

#: presliding resolution guard: at most this much z per step
MAX_Z_PER_STEP = 0.1
#: reversal instants are localized to this fraction of dt
BISECTION_FRACTION = 1e-3


@dataclass(frozen=True)
class SimulationConfig:
    """Integrator settings.

    ``dt``, ``t_end`` and ``eps_v`` may be left as ``None`` and are filled
    in by :meth:`resolve` from the friction parameters and the force rate.
    """

    m: float = 1e-4
    k: float = 1.0
    dt: float | None = None
    t_end: float | None = None
    eps_v: float | None = None
    z_th: float = 0.95
    v_th_detect: float | None = None
    stop_on_breakaway: bool = True
    sample_every: int = 1

    def resolve(self, params: FrictionParams) -> "SimulationConfig":
        """Return a copy with every default made concrete and validated."""
        dt = self.dt if self.dt is not None else default_dt(params, self.m, self.k)
        if self.t_end is not None:
            t_end = self.t_end
        elif self.k > 0:
            t_end = 4.0 * params.F_s / self.k
        else:
            t_end = 1.0
        eps_v = self.eps_v if self.eps_v is not None else 1e-8 * params.V
        cfg = replace(self, dt=float(dt), t_end=float(t_end), eps_v=float(eps_v))
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not self.m > 0:
            raise DomainError(f"mass m must be > 0, got {self.m}")
        if not (math.isfinite(self.k) and self.k >= 0):
            raise DomainError(f"force rate k must be >= 0, got {self.k}")
        if self.dt is None or not self.dt > 0:
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if self.t_end is None or not self.t_end > self.dt:
            raise DomainError(f"t_end must exceed dt, got t_end={self.t_end}, dt={self.dt}")
        if self.eps_v is None or not self.eps_v > 0:
            raise DomainError(f"eps_v must be > 0, got {self.eps_v}")
        if not (0.0 < self.z_th < 1.0):
            raise DomainError(f"z_th must lie in (0, 1), got {self.z_th}")
        if self.v_th_detect is not None and not self.v_th_detect > 0:
            raise DomainError(f"v_th_detect must be > 0, got {self.v_th_detect}")
        if int(self.sample_every) < 1:
            raise DomainError(f"sample_every must be >= 1, got {self.sample_every}")


def default_dt(params: FrictionParams, m: float, k: float) -> float:
    """Step resolving presliding with >= 2000 steps and a stable RK4 margin.

    The stability part bounds ``dt * omega`` where ``omega^2 = F_s s / m`` is
    the presliding stiffness scale over the mass.
    """
    stable = 0.1 * math.sqrt(m / (params.F_s * params.s))
    if k > 0:
        return min(params.F_c / k / 2000.0, stable)
    return stable


@dataclass(frozen=True)
class SimState:
    x: float = 0.0
    v: float = 0.0
    F: float = 0.0
    presliding: PreslidingState = IDLE


@dataclass(frozen=True)
class Detection:
    detector: str  # "z_th" or "velocity"
    t: float
    F_ba: float


@dataclass
class Trajectory:
    """Sampled ``(t, x, v, z, F, u)`` records plus break-away detections."""

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    z: np.ndarray
    F: np.ndarray
    u: np.ndarray
    detections: list[Detection] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    COLUMNS = ("t", "x", "v", "z", "F", "u")

    @property
    def breakaway(self) -> Detection | None:
        """Earliest detection, or None if no detector fired."""
        return min(self.detections, key=lambda d: d.t) if self.detections else None

    def detection(self, detector: str) -> Detection | None:
        for d in self.detections:
            if d.detector == detector:
                return d
        return None

    def table(self) -> np.ndarray:
        return np.column_stack([getattr(self, c) for c in self.COLUMNS])

    def __len__(self) -> int:
        return len(self.t)


class _Dynamics:
    """Raw-float kernel; one instance per run, never shared."""

    def __init__(self, params: FrictionParams, cfg: SimulationConfig):
        self.p = params
        self.cfg = cfg
        self.m = cfg.m
        self.k = cfg.k
        self.eps2 = cfg.eps_v * cfg.eps_v

    def target(self, v: float, d: int) -> float:
        p = self.p
        level = p.F_c + (p.F_s - p.F_c) * math.exp(-((abs(v) / p.V) ** p.delta_exp))
        # the branch direction fixes the sign; the regularized sign is only
        # needed from idle, where no branch exists yet
        direction = d if d else v / math.sqrt(v * v + self.eps2)
        return direction * level + p.sigma * v

    def branch_z(self, z0: float, d: int, dx: float) -> float:
        z = z0 + self.p.s * (d * dx if d else abs(dx))
        return 0.0 if z < 0.0 else (1.0 if z > 1.0 else z)

    def rk4(self, t, x, v, F, z0, d, h):
        """One RK4 step of length h on a fixed branch.

        Returns (dx, v_new, F_new, z_new).
        """
        k, m = self.k, self.m
        target, branch_z = self.target, self.branch_z

        def force(dx, vs):
            T = target(vs, d)
            return relax_branch(F, T, z0, branch_z(z0, d, dx)), T

        F1, T1 = force(0.0, v)
        a1 = (k * t - F1) / m
        v2 = v + 0.5 * h * a1
        F2, T2 = force(0.5 * h * v, v2)
        a2 = (k * (t + 0.5 * h) - F2) / m
        v3 = v + 0.5 * h * a2
        F3, T3 = force(0.5 * h * v2, v3)
        a3 = (k * (t + 0.5 * h) - F3) / m
        v4 = v + h * a3
        F4, T4 = force(h * v3, v4)
        a4 = (k * (t + h) - F4) / m
        dx = h / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v_new = v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        z_new = branch_z(z0, d, dx)
        if z_new >= 1.0:
            F_new = target(v_new, d)
        else:
            T_mean = (T1 + 2.0 * T2 + 2.0 * T3 + T4) / 6.0
            F_new = relax_branch(F, T_mean, z0, z_new)
        if abs(dx) * self.p.s > MAX_Z_PER_STEP:
            raise StepRejected(
                f"presliding resolution guard: step moved z by {abs(dx) * self.p.s:.3g} "
                f"> {MAX_Z_PER_STEP} at t={t:.6g}; reduce dt (currently {h:.3g})"
            )
        return dx, v_new, F_new, z_new

    def advance(self, t, x, v, F, z, F_r, d, h):
        """Advance by exactly h, splitting at velocity reversals.

        Returns the new raw state plus ``(t0, z0)`` of the last branch segment,
        which break-away interpolation needs.
        """
        t_seg, z_seg = t, z
        remaining = h
        while True:
            dx, v_new, F_new, z_new = self.rk4(t, x, v, F, z, d, remaining)
            if d != 0 and v_new * d < 0.0:
                lo, hi = 0.0, remaining
                tol = BISECTION_FRACTION * self.cfg.dt
                while hi - lo > tol:
                    mid = 0.5 * (lo + hi)
                    if self.rk4(t, x, v, F, z, d, mid)[1] * d < 0.0:
                        hi = mid
                    else:
                        lo = mid
                dx, v_new, F_new, z_new = self.rk4(t, x, v, F, z, d, hi)
                t, x, v, F = t + hi, x + dx, v_new, F_new
                z, F_r, d = 0.0, F_new, -d
                t_seg, z_seg = t, z
                remaining -= hi
                if remaining <= 0.0:
                    return (x, v, F, z, F_r, d), (t_seg, z_seg)
                continue
            if d == 0 and dx != 0.0:
                d = 1 if dx > 0 else -1
            return (x + dx, v_new, F_new, z_new, F_r, d), (t_seg, z_seg)


def step(params: FrictionParams, config: SimulationConfig, state: SimState, t: float) -> SimState:
    """Advance ``state`` from time ``t`` by one step of ``config.dt``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    cfg = config.resolve(params)
    pre = state.presliding
    raw, _ = _Dynamics(params, cfg).advance(t, state.x, state.v, state.F, pre.z, pre.F_r, pre.dir, cfg.dt)
    x, v, F, z, F_r, d = raw
    _check_finite(raw, t + cfg.dt)
    return SimState(x=x, v=v, F=F, presliding=PreslidingState(z=z, F_r=F_r if d else 0.0, dir=d))


def _check_finite(raw, t, last_sample=None):
    if not all(math.isfinite(value) for value in raw[:5]):
        raise SimulationBlowUp(f"non-finite state at t={t:.6g}", last_sample=last_sample)


def run(params: FrictionParams, config: SimulationConfig) -> Trajectory:
    """Integrate from rest under ``u = k t``.

    Detectors: ``z_th`` fires when the presliding distance first crosses the
    threshold, ``velocity`` (if ``v_th_detect`` is set) when the velocity
    first exceeds it. Crossing instants are interpolated within the step and
    the reported break-away force is ``k`` times that instant. With
    ``stop_on_breakaway`` the run ends once every enabled detector has fired.
    """
    cfg = config.resolve(params)
    dyn = _Dynamics(params, cfg)
    k, dt, z_th, v_det = cfg.k, cfg.dt, cfg.z_th, cfg.v_th_detect
    n_detectors = 1 + (v_det is not None)
    every = int(cfg.sample_every)

    x = v = F = z = F_r = 0.0
    d = 0
    n_steps = int(math.ceil(cfg.t_end / dt - 1e-9))
    rows = [(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)]
    detections: list[Detection] = []
    fired_z = fired_v = False

    for n in range(n_steps):
        t = n * dt
        raw, (t_seg, z_seg) = dyn.advance(t, x, v, F, z, F_r, d, dt)
        t_next = (n + 1) * dt
        _check_finite(raw, t_next, last_sample=rows[-1])
        v_prev = v
        x, v, F, z, F_r, d = raw
        if not fired_z and z >= z_th and z > z_seg:
            frac = (z_th - z_seg) / (z - z_seg) if z_seg < z_th else 0.0
            t_ba = t_seg + frac * (t_next - t_seg)
            detections.append(Detection("z_th", t_ba, k * t_ba))
            fired_z = True
        if v_det is not None and not fired_v and v >= v_det:
            frac = (v_det - v_prev) / (v - v_prev) if v_prev < v_det else 0.0
            t_ba = t + frac * dt
            detections.append(Detection("velocity", t_ba, k * t_ba))
            fired_v = True
        done = cfg.stop_on_breakaway and len(detections) == n_detectors
        if (n + 1) % every == 0 or done or n == n_steps - 1:
            rows.append((t_next, x, v, z, F, k * t_next))
        if done:
            break

    data = np.array(rows, dtype=float)
    detections.sort(key=lambda item: item.t)
    return Trajectory(
        *(data[:, i] for i in range(6)),
        detections=detections,
        meta={"k": k, "m": cfg.m, "dt": dt, "t_end": cfg.t_end, "z_th": z_th},
    )


def force_balance_residual(trajectory: Trajectory, detector: str = "z_th") -> float:
    """Largest ``|u - F|`` over the samples up to the given detection.

    Without that detection the whole record is used.
    """
    det = trajectory.detection(detector)
    mask = np.ones(len(trajectory), dtype=bool) if det is None else trajectory.t <= det.t
    return float(np.max(np.abs(trajectory.u[mask] - trajectory.F[mask])))


def reversal_cycle(
    params: FrictionParams, amplitude: float, cycles: int = 1, points_per_swing: int = 1000
) -> Trajectory:
    """Drive the contact quasi-statically along a triangle wave of ±amplitude.

    The record starts with virgin loading 0 -> +A and one settling swing
    +A -> -A. Then come ``cycles`` full cycles -A -> +A -> -A. ``t`` holds
    the travelled path length (unit driving speed), ``v`` is zero because
    friction is evaluated in the quasi-static limit, and ``u`` equals ``F``.
    ``meta["cycle_starts"]`` indexes the start of each full cycle.
    """
    if not (math.isfinite(amplitude) and amplitude > 0):
        raise DomainError(f"amplitude must be > 0, got {amplitude!r}")
    if int(cycles) < 1:
        raise DomainError(f"cycles must be >= 1, got {cycles}")
    n = int(points_per_swing)
    legs = [(amplitude, n // 2 or 1), (-2.0 * amplitude, n)]
    legs += [(2.0 * amplitude, n), (-2.0 * amplitude, n)] * int(cycles)

    state = IDLE
    x = path = 0.0
    xs, zs, Fs, ts = [0.0], [0.0], [0.0], [0.0]
    cycle_starts = []
    for leg, (span, count) in enumerate(legs):
        if leg >= 2 and leg % 2 == 0:
            cycle_starts.append(len(xs) - 1)
        dx = span / count
        for _ in range(count):
            state = advance_state(params, state, dx)
            x += dx
            path += abs(dx)
            xs.append(x)
            zs.append(state.z)
            Fs.append(friction_force(params, state, 0.0))
            ts.append(path)
    cycle_starts.append(len(xs) - 1)
    F = np.array(Fs)
    return Trajectory(
        t=np.array(ts),
        x=np.array(xs),
        v=np.zeros_like(F),
        z=np.array(zs),
        F=F,
        u=F.copy(),
        meta={"amplitude": amplitude, "cycles": int(cycles), "cycle_starts": cycle_starts},
    )


def loop_metrics(trajectory: Trajectory) -> tuple[float, float]:
    """(closure residual, enclosed area) of the last full cycle of a reversal record."""
    starts = trajectory.meta.get("cycle_starts")
    if not starts or len(starts) < 2:
        raise DomainError("trajectory carries no complete reversal cycle")
    i, j = starts[-2], starts[-1]
    x, F = trajectory.x[i : j + 1], trajectory.F[i : j + 1]
    closure = abs(F[-1] - F[0])
    area = float(np.sum(0.5 * (F[1:] + F[:-1]) * np.diff(x)))
    return closure, area
