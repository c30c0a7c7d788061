"""Command-line entry point.

Each subcommand writes its table(s) into ``--out`` together with a
``<subcommand>.manifest.json`` recording every resolved option.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from .analysis import (
    FIGURE_CHOICES,
    Z_THRESHOLD,
    SteadyStateChoice,
    breakaway_force,
    BreakawaySweep,
    default_k_grid,
    default_z_grid,
    threshold_velocity,
)
from .errors import BreakawayError, InputError
from .friction import FrictionParams, stribeck_curve
from .identification import breakaway_model, fit_breakaway_curve, fit_stribeck, stribeck_model
from .simulation import SimulationConfig, run


def parse_grid(text: str, name: str) -> np.ndarray:
    """Grid syntax: ``a,b,c`` | ``start:step:stop`` (inclusive) | ``log:start:stop:num``."""
    try:
        if text.startswith("log:"):
            start, stop, num = text[4:].split(":")
            grid = np.geomspace(float(start), float(stop), int(num))
        elif ":" in text:
            start, step, stop = (float(part) for part in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            grid = start + step * np.arange(max(count, 0))
        else:
            grid = np.array([float(part) for part in text.split(",") if part.strip()])
    except ValueError as exc:
        raise InputError(f"--{name}: cannot parse grid {text!r} ({exc})") from None
    if grid.size == 0:
        raise InputError(f"--{name}: grid {text!r} is empty")
    if not np.all(np.isfinite(grid)):
        raise InputError(f"--{name}: grid contains non-finite values")
    return grid


def default_sweep_grid() -> np.ndarray:
    # the rate-dependence spans decades around k ~ V * F_c, so sample logarithmically
    return np.geomspace(1e-6, 1e3, 271)


def _choices(text: str) -> list[SteadyStateChoice]:
    try:
        return [SteadyStateChoice.parse(part.strip()) for part in text.split(",") if part.strip()]
    except BreakawayError as exc:
        raise InputError(f"--choice: {exc}") from None


def _load_params(args) -> FrictionParams:
    return fio.read_params(args.params) if args.params else FrictionParams()


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _table_path(out: Path, stem: str, fmt_name: str) -> Path:
    return out / f"{stem}.{fmt_name}"


def _map(func, items, parallel: int):
    """Order-preserving map, optionally over worker processes."""
    if parallel and parallel > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _options(args) -> dict:
    skip = {"func", "command"}
    return {key: value for key, value in sorted(vars(args).items()) if key not in skip}


# -- subcommands ----------------------------------------------------------------


def cmd_stribeck_curve(args) -> list[Path]:
    params = _load_params(args)
    if not (args.v_min < args.v_max) or args.n < 2:
        raise InputError(f"--v-min/--v-max/--n: empty velocity range [{args.v_min}, {args.v_max}] with n={args.n}")
    v = np.linspace(args.v_min, args.v_max, args.n)
    F = stribeck_curve(params, v)
    out = _out_dir(args)
    outputs = [fio.write_table(_table_path(out, "stribeck_curve", args.format), ("v", "F"), zip(v, F), args.format)]
    if args.plot:
        from .plotting import stribeck_figure

        outputs.append(stribeck_figure(v, F, out / "stribeck_curve.svg"))
    return _finish(args, params, out, outputs)


def _phase_rows(task):
    params, choice, k, zs = task
    return [(k, z, threshold_velocity(params, choice, k, z)) for z in zs]


def cmd_phase_diagram(args) -> list[Path]:
    params = _load_params(args)
    (choice,) = _single_choice(args.choice)
    ks = np.sort(parse_grid(args.k_grid, "k-grid")) if args.k_grid else default_k_grid()
    zs = np.sort(parse_grid(args.z_grid, "z-grid")) if args.z_grid else default_z_grid()
    if args.z_max is not None:
        zs = zs[zs <= args.z_max]
    if np.any(ks <= 0):
        raise InputError("--k-grid: force rates must be positive")
    if zs.size == 0 or np.any((zs <= 0) | (zs >= 1)):
        raise InputError("--z-grid: values must lie strictly inside (0, 1)")
    tasks = [(params, choice, float(k), [float(z) for z in zs]) for k in ks]
    rows = [row for chunk in _map(_phase_rows, tasks, args.parallel) for row in chunk]
    out = _out_dir(args)
    outputs = [fio.write_table(_table_path(out, "phase_diagram", args.format), ("k", "z", "v"), rows, args.format)]
    if args.plot:
        from .plotting import phase_figure

        outputs.append(phase_figure(np.array(rows), out / "phase_diagram.svg"))
    return _finish(args, params, out, outputs)


def _single_choice(text):
    choices = _choices(text)
    if len(choices) != 1:
        raise InputError("--choice: exactly one steady-state choice expected")
    return choices


def _sweep_point(task):
    params, choice, k, z_th = task
    return breakaway_force(params, choice, k, z_th)


def cmd_breakaway_sweep(args) -> list[Path]:
    params = _load_params(args)
    choices = _choices(args.choices)
    ks = np.unique(parse_grid(args.k_grid, "k-grid")) if args.k_grid else default_sweep_grid()
    if np.any(ks <= 0):
        raise InputError("--k-grid: force rates must be positive")
    if not (0.0 < args.z_th < 1.0):
        raise InputError(f"--z-th: must lie in (0, 1), got {args.z_th}")
    tasks = [(params, choice, float(k), args.z_th) for choice in choices for k in ks]
    points = _map(_sweep_point, tasks, args.parallel)
    sweeps = []
    for i, choice in enumerate(choices):
        chunk = points[i * len(ks) : (i + 1) * len(ks)]
        sweeps.append(BreakawaySweep(z_th=args.z_th, choice=choice, points=tuple(chunk)))
    rows = [(p.k, p.v_th, p.F_ba, sweep.choice.value) for sweep in sweeps for p in sweep.points]
    out = _out_dir(args)
    outputs = [
        fio.write_table(
            _table_path(out, "breakaway_sweep", args.format), ("k", "v_th", "F_ba", "choice"), rows, args.format
        )
    ]
    if args.plot:
        from .plotting import breakaway_figure

        outputs.append(breakaway_figure(sweeps, out / "breakaway_sweep.svg"))
    return _finish(args, params, out, outputs)


def cmd_simulate(args) -> list[Path]:
    params = _load_params(args)
    cfg = SimulationConfig(
        m=args.m,
        k=args.k,
        dt=args.dt,
        t_end=args.t_end,
        eps_v=args.eps_v,
        z_th=args.z_th,
        v_th_detect=args.v_detect,
        stop_on_breakaway=not args.no_stop,
        sample_every=args.sample_every,
    )
    try:
        cfg = cfg.resolve(params)
    except BreakawayError as exc:
        raise InputError(str(exc)) from None
    # resolved values go to the manifest so reruns do not depend on defaults
    args.dt, args.t_end, args.eps_v = cfg.dt, cfg.t_end, cfg.eps_v
    traj = run(params, cfg)
    out = _out_dir(args)
    outputs = [fio.write_table(_table_path(out, "trajectory", args.format), traj.COLUMNS, traj.table(), args.format)]
    ba = traj.breakaway
    items = [
        ("k", cfg.k),
        ("t_ba", ba.t if ba else None),
        ("F_ba_sim", ba.F_ba if ba else None),
        ("detector", ba.detector if ba else "none"),
    ]
    for det in traj.detections:
        items += [(f"t_ba[{det.detector}]", det.t), (f"F_ba_sim[{det.detector}]", det.F_ba)]
    summary = out / "breakaway.txt"
    summary.write_text(fio.key_value_block(items))
    outputs.append(summary)
    if args.plot:
        from .plotting import trajectory_figure

        outputs.append(trajectory_figure(traj, out / "trajectory.svg"))
    print(summary.read_text(), end="")
    return _finish(args, params, out, outputs)


def cmd_fit(args) -> list[Path]:
    init = fio.read_params(args.init) if args.init else FrictionParams()
    data = fio.read_pairs(args.data)
    if args.mode == "stribeck":
        result = fit_stribeck(data, init, fit_delta=args.fit_delta, tol=args.tol)
    else:
        result = fit_breakaway_curve(data, init, z_th=args.z_th, fit_delta=args.fit_delta, tol=args.tol)
    out = _out_dir(args)
    meta = [
        f"mode = {args.mode}",
        f"residual_norm = {fio.fmt(result.residual_norm)}",
        f"iterations = {result.iterations}",
        f"converged = {fio.fmt(result.converged)}",
        f"free = {','.join(result.free)}",
    ]
    if args.format == "json":
        import json

        doc = {
            "params": result.params.as_dict(),
            "residual_norm": result.residual_norm,
            "iterations": result.iterations,
            "converged": result.converged,
            "free": list(result.free),
            "mode": args.mode,
        }
        path = out / "fit_result.json"
        path.write_text(json.dumps(doc, indent=2) + "\n")
    else:
        path = out / "fit_result.txt"
        fio.write_params(path, result.params, comments=meta)
    outputs = [path]
    if args.plot:
        from .plotting import fit_figure

        theta = result.params.as_dict()
        x = data[:, 0]
        grid = np.linspace(x.min(), x.max(), 400) if args.mode == "stribeck" else np.geomspace(x.min(), x.max(), 400)
        model = stribeck_model(theta, grid) if args.mode == "stribeck" else breakaway_model(theta, grid, args.z_th)
        label = "velocity" if args.mode == "stribeck" else "force rate k"
        outputs.append(fit_figure(x, data[:, 1], grid, model, label, out / "fit.svg", logx=args.mode != "stribeck"))
    print("\n".join(meta))
    return _finish(args, result.params, out, outputs, inputs={"data": args.data, "init": args.init})


def _finish(args, params, out, outputs, inputs=None):
    inputs = inputs if inputs is not None else {"params": args.params}
    fio.write_manifest(out, args.command, params, _options(args), inputs, outputs)
    return outputs


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="friction parameter file (key = value lines)")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--plot", action="store_true", help="also write an SVG figure")
    common.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes for grid sweeps")

    parser = argparse.ArgumentParser(prog="breakaway", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stribeck-curve", parents=[common], help="tabulate the steady-state friction curve")
    p.add_argument("--v-min", type=float, default=-1.0)
    p.add_argument("--v-max", type=float, default=1.0)
    p.add_argument("--n", type=int, default=401)
    p.set_defaults(func=cmd_stribeck_curve)

    p = sub.add_parser("phase-diagram", parents=[common], help="presliding velocity against distance")
    p.add_argument("--choice", default="Average")
    p.add_argument("--k-grid", help="default 0.01:2:30")
    p.add_argument("--z-grid", help="default 0.01:0.01:0.99")
    p.add_argument("--z-max", type=float, help="drop grid points above this z")
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("breakaway-sweep", parents=[common], help="break-away force against force rate")
    p.add_argument("--choices", default=",".join(c.value for c in FIGURE_CHOICES))
    p.add_argument("--k-grid", help="default log:1e-6:1e3:271")
    p.add_argument("--z-th", type=float, default=Z_THRESHOLD)
    p.set_defaults(func=cmd_breakaway_sweep)

    p = sub.add_parser("simulate", parents=[common], help="integrate the ramp-driven motion")
    p.add_argument("--m", type=float, default=1e-4)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--eps-v", type=float)
    p.add_argument("--z-th", type=float, default=Z_THRESHOLD)
    p.add_argument("--v-detect", type=float, help="enable the velocity detector at this speed")
    p.add_argument("--no-stop", action="store_true", help="run to t_end even after detection")
    p.add_argument("--sample-every", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common], help="identify parameters from data")
    p.add_argument("--data", required=True, help="two-column CSV")
    p.add_argument("--mode", choices=("stribeck", "breakaway"), default="stribeck")
    p.add_argument("--init", help="initial parameter file")
    p.add_argument("--z-th", type=float, default=Z_THRESHOLD)
    p.add_argument("--fit-delta", action="store_true")
    p.add_argument("--tol", type=float, help="residual norm required for convergence")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except BreakawayError as exc:
        print(f"breakaway {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
