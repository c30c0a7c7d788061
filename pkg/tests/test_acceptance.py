"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line that pytest prints in an
"acceptance criteria" section at the end of the run.
"""

import functools
import math
import time

import numpy as np
import pytest

from breakaway.analysis import (
    FIGURE_CHOICES,
    SteadyStateChoice,
    breakaway_force,
    breakaway_sweep,
    default_k_grid,
    phase_diagram,
)
from breakaway.cli import main
from breakaway.friction import FrictionParams, presliding_shape, stribeck, stribeck_curve
from breakaway.identification import fit_breakaway_curve, fit_stribeck
from breakaway.io import write_table
from breakaway.simulation import SimulationConfig, force_balance_residual, loop_metrics, reversal_cycle, run

PARAMS = FrictionParams(F_c=1.0, F_s=1.5, sigma=0.0)
ORACLE_RATES = (0.01, 0.1, 1.0, 10.0)
ORACLE_MASS = 1e-4


def test_criterion_1_stribeck_pinning(record):
    v = np.concatenate([-np.geomspace(1e-12, 1e6, 5000), np.geomspace(1e-12, 1e6, 5000)])
    magnitude = np.abs(stribeck_curve(PARAMS, v))
    bounded = bool(np.all((magnitude >= 1.0) & (magnitude <= 1.5)))
    low = abs(stribeck(PARAMS, 1e-12) - 1.5) / 1.5
    high = abs(stribeck(PARAMS, 1e3) - 1.0)
    ok = bounded and low <= 1e-6 and high <= 1e-6
    record(1, ok, f"bounded={bounded} rel(v->0+)={low:.1e} rel(v->inf)={high:.1e}")
    assert ok


def test_criterion_2_shape_analytics(record):
    at_one = abs(presliding_shape(1.0) - 1.0)
    at_inv_e = abs(presliding_shape(math.exp(-1)) - 2 / math.e)
    grid = np.linspace(0.0, 1.0, 10_000)
    values = np.array([presliding_shape(z) for z in grid])
    monotone = bool(np.all(np.diff(values) > 0))
    ok = at_one <= 1e-12 and at_inv_e <= 1e-12 and monotone
    record(2, ok, f"|shape(1)-1|={at_one:.1e} |shape(1/e)-2/e|={at_inv_e:.1e} strictly_increasing={monotone}")
    assert ok


def test_criterion_3_phase_diagram(record):
    start = time.perf_counter()
    ks = default_k_grid()
    z = np.linspace(0.01, 0.999999, 400)
    table = phase_diagram(PARAMS, SteadyStateChoice.AVERAGE, ks, z)
    doubled = phase_diagram(PARAMS, SteadyStateChoice.AVERAGE, 2 * ks, z)
    increasing = diverging = True
    for k in ks:
        v = table[table[:, 0] == k, 2]
        increasing &= bool(np.all(np.diff(v) > 0))
        diverging &= bool(v[-1] > 1e4 * v[0])
    linear = float(np.max(np.abs(doubled[:, 2] / (2 * table[:, 2]) - 1)))
    elapsed = time.perf_counter() - start
    ok = increasing and diverging and linear <= 1e-12 and elapsed < 1.0
    record(
        3,
        ok,
        f"k={ks[0]:g}..{ks[-1]:g} increasing={increasing} diverging={diverging} "
        f"doubling_err={linear:.1e} t={elapsed:.2f}s",
    )
    assert ok


def test_criterion_4_breakaway_sweeps(record):
    start = time.perf_counter()
    ks = np.geomspace(1e-6, 1e3, 400)
    curves = {c: breakaway_sweep(PARAMS, c, ks, z_th=0.95).F_ba for c in FIGURE_CHOICES}
    monotone = all(bool(np.all(np.diff(F) <= 0)) for F in curves.values())
    bounded = all(bool(np.all((F >= 1.0) & (F <= 1.5))) for F in curves.values())
    stack = np.vstack(list(curves.values()))
    spread = stack.max(axis=0) / stack.min(axis=0) - 1
    ends = max(spread[0], spread[-1])
    middle = float(spread.max())
    elapsed = time.perf_counter() - start
    ok = monotone and bounded and ends < 0.01 and middle > 0.01 and elapsed < 1.0
    record(
        4,
        ok,
        f"non_increasing={monotone} bounded={bounded} spread_at_ends={ends:.1e} "
        f"max_mid_spread={middle:.3f} t={elapsed:.2f}s",
    )
    assert ok


@functools.lru_cache(maxsize=None)
def _oracle_run(k, halve=False):
    cfg = SimulationConfig(m=ORACLE_MASS, k=k).resolve(PARAMS)
    if halve:
        cfg = SimulationConfig(m=ORACLE_MASS, k=k, dt=cfg.dt / 2, t_end=cfg.t_end)
    return run(PARAMS, cfg)


def test_criterion_5_simulation_matches_analysis(record):
    start = time.perf_counter()
    parts, ok = [], True
    for k in ORACLE_RATES:
        sim = _oracle_run(k).detection("z_th")
        fine = _oracle_run(k, halve=True).detection("z_th")
        analytic = breakaway_force(PARAMS, SteadyStateChoice.SELF_CONSISTENT, k, 0.95).F_ba
        if sim is None or fine is None:
            ok = False
            parts.append(f"k={k:g}: no detection")
            continue
        err = abs(sim.F_ba / analytic - 1)
        drift = abs(fine.F_ba / sim.F_ba - 1)
        ok &= err <= 0.05 and drift < 1e-3
        parts.append(f"k={k:g}: sim={sim.F_ba:.5f} analytic={analytic:.5f} err={err:.2%} dt/2_change={drift:.1e}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 30.0
    record(5, ok, "; ".join(parts) + f"; t={elapsed:.1f}s")
    assert ok


def test_criterion_6_quasi_static_balance(record):
    parts, ok = [], True
    for k in ORACLE_RATES:
        residual = force_balance_residual(_oracle_run(k))
        ok &= residual <= 0.01 * PARAMS.F_c
        parts.append(f"k={k:g}: max|u-F|={residual:.4f}")
    record(6, ok, "; ".join(parts) + " (limit 0.01)")
    assert ok


def test_criterion_7_loop_closure(record):
    start = time.perf_counter()
    traj = reversal_cycle(PARAMS, 0.5 / PARAMS.s, cycles=1)
    closure, area = loop_metrics(traj)
    elapsed = time.perf_counter() - start
    ok = closure <= 1e-6 * PARAMS.F_s and area >= 0 and elapsed < 5.0
    record(7, ok, f"closure={closure:.1e} area={area:.6f} t={elapsed:.2f}s")
    assert ok


def test_criterion_8_identification(record):
    start = time.perf_counter()
    truth = FrictionParams(F_c=1.0, F_s=1.5, sigma=0.05, V=0.1)
    v = np.concatenate([-np.geomspace(1e-3, 2.0, 20), np.geomspace(1e-3, 2.0, 20)])
    fit_a = fit_stribeck(np.column_stack([v, stribeck_curve(truth, v)]), truth.with_(F_c=1.2, F_s=1.2 * 1.5, sigma=0.04, V=0.12))
    keys_a = ("F_c", "F_s", "sigma", "V")
    err_a = max(abs(getattr(fit_a.params, key) / getattr(truth, key) - 1) for key in keys_a)

    truth_b = FrictionParams(F_c=1.0, F_s=1.5, V=0.1)
    ks = np.geomspace(1e-4, 1.0, 15)
    sweep = breakaway_sweep(truth_b, SteadyStateChoice.AVERAGE, ks)
    fit_b = fit_breakaway_curve(np.column_stack([sweep.k, sweep.F_ba]), truth_b.with_(F_c=0.8, F_s=1.8, V=0.08))
    keys_b = ("F_c", "F_s", "V")
    err_b = max(abs(getattr(fit_b.params, key) / getattr(truth_b, key) - 1) for key in keys_b)
    elapsed = time.perf_counter() - start
    ok = (
        err_a <= 1e-3
        and err_b <= 1e-2
        and fit_a.residual_norm <= 1e-8 * truth.F_c
        and fit_b.residual_norm <= 1e-8 * truth_b.F_c
        and elapsed < 10.0
    )
    record(
        8,
        ok,
        f"stribeck rel_err={err_a:.1e} residual={fit_a.residual_norm:.1e}; "
        f"breakaway rel_err={err_b:.1e} residual={fit_b.residual_norm:.1e}; t={elapsed:.2f}s",
    )
    assert ok


def test_criterion_9_cli_determinism(record, tmp_path):
    start = time.perf_counter()
    v = np.geomspace(1e-3, 2.0, 12)
    data = tmp_path / "data.csv"
    write_table(data, ("v", "F"), zip(v, stribeck_curve(PARAMS, v)))
    commands = {
        "stribeck-curve": (["stribeck-curve"], "stribeck_curve.csv"),
        "phase-diagram": (["phase-diagram"], "phase_diagram.csv"),
        "breakaway-sweep": (["breakaway-sweep"], "breakaway_sweep.csv"),
        "simulate": (["simulate", "--k", "1"], "trajectory.csv"),
        "fit": (["fit", "--data", str(data)], "fit_result.txt"),
    }
    mismatched = []
    for name, (argv, output) in commands.items():
        outputs = []
        for run_dir in ("first", "second"):
            out = tmp_path / name / run_dir
            assert main(argv + ["--out", str(out)]) == 0
            outputs.append((out / output).read_bytes())
        if outputs[0] != outputs[1]:
            mismatched.append(name)
    elapsed = time.perf_counter() - start
    ok = not mismatched and elapsed < 10.0
    record(9, ok, f"subcommands={len(commands)} mismatched={mismatched or 'none'} t={elapsed:.2f}s")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
