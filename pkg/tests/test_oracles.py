"""Recompute the frozen reference values at 50 significant digits."""

import pytest

mp = pytest.importorskip("mpmath").mp

from test_analysis import F_BA_AVERAGE, PHASE_V, V_TH_AVERAGE  # noqa: E402
from test_friction import FORCE_AT_INV_E, REVERSAL_F_R, STRIBECK_AT_V  # noqa: E402


@pytest.fixture(autouse=True)
def precision():
    with mp.workdps(50):
        yield


def _stribeck(v, F_c=1, F_s=mp.mpf("1.5"), V=mp.mpf("0.1")):
    return F_c + (F_s - F_c) * mp.exp(-abs(v) / V)


def _shape(z):
    return z * (1 - mp.log(z))


def test_friction_values():
    assert float(_stribeck(mp.mpf("0.1"))) == pytest.approx(STRIBECK_AT_V, rel=1e-15)
    assert float(_stribeck(mp.mpf("0.1")) * _shape(mp.e**-1)) == pytest.approx(FORCE_AT_INV_E, rel=1e-15)
    assert float(mp.mpf("1.5") * _shape(mp.mpf("0.5"))) == pytest.approx(REVERSAL_F_R, rel=1e-15)


def test_analysis_values():
    average = mp.mpf("1.25")
    v_th = mp.mpf("0.01") / (average * -mp.log(mp.mpf("0.95")))
    assert float(v_th) == pytest.approx(V_TH_AVERAGE, rel=1e-15)
    assert float(_stribeck(v_th)) == pytest.approx(F_BA_AVERAGE, rel=1e-15)
    assert float(mp.mpf("0.01") / (average * mp.log(2))) == pytest.approx(PHASE_V, rel=1e-15)
