"""Parameter identification round trips and failure modes."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breakaway.analysis import SteadyStateChoice, breakaway_sweep
from breakaway.errors import DomainError, IdentifiabilityError
from breakaway.friction import FrictionParams, stribeck_curve
from breakaway.identification import breakaway_model, fit_breakaway_curve, fit_stribeck

TRUE = FrictionParams(F_c=1.0, F_s=1.5, sigma=0.05, V=0.1, delta_exp=1.0)
VELOCITIES = np.concatenate([-np.geomspace(1e-3, 2.0, 20)[::-1], np.geomspace(1e-3, 2.0, 20)])


def _stribeck_data(params, v=VELOCITIES):
    return np.column_stack([v, stribeck_curve(params, v)])


def _relative_errors(fit, truth, keys):
    return {key: abs(getattr(fit, key) - getattr(truth, key)) / abs(getattr(truth, key)) for key in keys}


def test_stribeck_round_trip():
    init = TRUE.with_(F_c=1.2, F_s=1.2, sigma=0.06, V=0.08)
    result = fit_stribeck(_stribeck_data(TRUE), init)
    assert result.converged
    assert result.residual_norm <= 1e-8 * TRUE.F_c
    assert max(_relative_errors(result.params, TRUE, ("F_c", "F_s", "sigma", "V")).values()) <= 1e-3


def test_stribeck_round_trip_with_exponent():
    truth = TRUE.with_(delta_exp=2.0)
    result = fit_stribeck(_stribeck_data(truth), truth.with_(delta_exp=1.6, V=0.12), fit_delta=True)
    assert result.residual_norm <= 1e-8
    assert max(_relative_errors(result.params, truth, ("F_c", "F_s", "V", "delta_exp")).values()) <= 1e-3


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(min_value=0.8, max_value=1.2), min_size=4, max_size=4))
def test_stribeck_round_trip_from_perturbed_init(scales):
    init = FrictionParams(
        F_c=TRUE.F_c * scales[0],
        F_s=max(TRUE.F_s * scales[1], TRUE.F_c * scales[0]),
        sigma=TRUE.sigma * scales[2],
        V=TRUE.V * scales[3],
    )
    result = fit_stribeck(_stribeck_data(TRUE), init)
    assert max(_relative_errors(result.params, TRUE, ("F_c", "F_s", "sigma", "V")).values()) <= 1e-3


def test_pure_coulomb_data_closes_the_gap():
    coulomb = FrictionParams(F_c=1.0, F_s=1.0)
    result = fit_stribeck(_stribeck_data(coulomb), FrictionParams(F_c=0.8, F_s=1.3, V=0.2), fit_sigma=False)
    assert result.params.F_s - result.params.F_c <= 1e-6


def test_objective_never_increases():
    result = fit_stribeck(_stribeck_data(TRUE), FrictionParams(F_c=0.5, F_s=3.0, sigma=0.0, V=0.5))
    history = np.array(result.objective_history)
    assert np.all(np.diff(history) <= 0)


def test_bounds_are_respected():
    bounds = {"F_s": (1.0, 1.4)}
    result = fit_stribeck(_stribeck_data(TRUE), FrictionParams(F_s=1.2), bounds=bounds)
    assert 1.0 <= result.params.F_s <= 1.4
    assert result.params.F_c <= result.params.F_s


@pytest.mark.parametrize("n", [2, 4])
def test_too_few_points(n):
    with pytest.raises(IdentifiabilityError):
        fit_stribeck(_stribeck_data(TRUE, VELOCITIES[-n:]))


def test_repeated_speed_is_not_identifiable():
    v = np.array([0.3, -0.3, 0.3, -0.3, 0.3, 0.3])
    with pytest.raises(IdentifiabilityError):
        fit_stribeck(_stribeck_data(TRUE, v))


def test_infeasible_init_rejected():
    with pytest.raises(DomainError):
        fit_stribeck(_stribeck_data(TRUE), FrictionParams(V=0.1), bounds={"V": (0.5, 1.0)})


def test_tolerance_controls_converged_flag():
    noisy = _stribeck_data(TRUE)
    noisy[::3, 1] += 1e-3
    assert not fit_stribeck(noisy, tol=1e-8).converged
    assert fit_stribeck(noisy, tol=1e-2).converged


def test_matches_reference_least_squares():
    scipy_optimize = pytest.importorskip("scipy.optimize")
    data = _stribeck_data(TRUE)
    data[::4, 1] += 0.01
    ours = fit_stribeck(data, FrictionParams(sigma=0.01))

    def residual(theta):
        p = FrictionParams(F_c=theta[0], F_s=max(theta[1], theta[0]), sigma=theta[2], V=theta[3])
        return stribeck_curve(p, data[:, 0]) - data[:, 1]

    ref = scipy_optimize.least_squares(residual, [1.0, 1.5, 0.01, 0.1], xtol=1e-14, ftol=1e-14, gtol=1e-14)
    fitted = [ours.params.F_c, ours.params.F_s, ours.params.sigma, ours.params.V]
    np.testing.assert_allclose(fitted, ref.x, rtol=1e-5)


def _breakaway_data(params, ks=np.geomspace(1e-4, 1.0, 12)):
    sweep = breakaway_sweep(params, SteadyStateChoice.AVERAGE, ks)
    return np.column_stack([sweep.k, sweep.F_ba])


def test_breakaway_model_mirrors_analysis():
    sweep = breakaway_sweep(TRUE.with_(sigma=0.0), SteadyStateChoice.AVERAGE, [0.001, 0.01, 0.1])
    model = breakaway_model(TRUE.with_(sigma=0.0).as_dict(), sweep.k)
    np.testing.assert_allclose(model, sweep.F_ba, rtol=1e-14)


def test_breakaway_round_trip():
    truth = FrictionParams(F_c=1.0, F_s=1.5, V=0.1)
    result = fit_breakaway_curve(_breakaway_data(truth), FrictionParams(F_c=1.15, F_s=1.3, V=0.12))
    assert result.converged
    assert result.residual_norm <= 1e-8 * truth.F_c
    assert max(_relative_errors(result.params, truth, ("F_c", "F_s", "V")).values()) <= 1e-2


def test_flat_breakaway_data_closes_the_gap():
    ks = np.geomspace(1e-4, 1.0, 12)
    flat = np.column_stack([ks, np.full_like(ks, 1.2)])
    result = fit_breakaway_curve(flat, FrictionParams(F_c=1.0, F_s=1.5, V=0.1))
    assert result.params.F_s - result.params.F_c <= 1e-6
    assert result.residual_norm <= 1e-8


def test_single_rate_not_identifiable():
    with pytest.raises(IdentifiabilityError):
        fit_breakaway_curve([[0.01, 1.1]])
    with pytest.raises(IdentifiabilityError):
        fit_breakaway_curve([[0.01, 1.1]] * 5)


def test_breakaway_rates_must_be_positive():
    with pytest.raises(DomainError):
        fit_breakaway_curve([[0.0, 1.5], [0.01, 1.1], [0.1, 1.0], [1.0, 1.0]])
