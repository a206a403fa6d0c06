import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daopf.errors import MissingModelError, ValidationError
from daopf.post_optimal import SensitivityRange, itr, pv_range
from daopf.uncertainty import (
    BimodalWeibull, NormalLoad, adaptive_simpson, confidence, confidence_report, pdf_pv,
)


def _normal_mass(z):
    return math.erf(z / math.sqrt(2.0))


@pytest.fixture(scope="module")
def noon_pv():
    return BimodalWeibull.from_forecast(40.0, 60.0)


# -- quadrature ------------------------------------------------------------

@pytest.mark.parametrize("f, a, b, exact", [
    (lambda x: 3 * x * x - 2 * x + 1, -1.0, 2.0, 9.0),
    (lambda x: x ** 5, 0.0, 1.0, 1.0 / 6.0),
    (math.sin, 0.0, math.pi, 2.0),
    (math.exp, 0.0, 1.0, math.e - 1.0),
])
def test_simpson_against_closed_forms(f, a, b, exact):
    assert adaptive_simpson(f, a, b) == pytest.approx(exact, abs=1e-8)


def test_simpson_empty_interval():
    assert adaptive_simpson(math.sin, 1.0, 1.0) == 0.0
    assert adaptive_simpson(math.sin, 2.0, 1.0) == 0.0


def test_simpson_narrow_peak():
    # a spike much narrower than the initial panel width
    sigma = 1e-3
    f = lambda x: math.exp(-0.5 * ((x - 0.3) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    assert adaptive_simpson(f, 0.0, 1.0) == pytest.approx(1.0, abs=1e-7)


# -- PV model --------------------------------------------------------------

def test_single_component_mode():
    model = BimodalWeibull(w1=1.0, w2=0.0, c1=0.5, c2=1.0, k1=2.5, k2=3.0, eta=1.0, s_capacity=1.0)
    mode = 0.5 * ((2.5 - 1) / 2.5) ** (1 / 2.5)
    grid = np.linspace(0.01, 1.5, 20001)
    assert grid[np.argmax(model.pdf(grid))] == pytest.approx(mode, abs=1e-4)


def test_pv_density_normalised(noon_pv):
    lo, hi = noon_pv.support()
    assert adaptive_simpson(noon_pv.pdf, lo, hi) == pytest.approx(1.0, abs=1e-6)


def test_pv_density_zero_below_origin(noon_pv):
    np.testing.assert_array_equal(pdf_pv(noon_pv, np.array([-5.0, 0.0])), [0.0, 0.0])


def test_forecast_mean_is_reproduced(noon_pv):
    assert noon_pv.mean() == pytest.approx(40.0, rel=1e-12)
    assert noon_pv.mw_per_irradiance == pytest.approx(60.0)


def test_mixture_mean_against_sampling(noon_pv, rng):
    draws = noon_pv.sample(rng, 1_000_000)
    assert draws.mean() == pytest.approx(noon_pv.mean(), rel=5e-3)


def test_quadrature_against_sampling(noon_pv, rng):
    n = 200_000
    draws = noon_pv.sample(rng, n)
    lo, hi = 30.0, 50.0
    p = confidence(noon_pv, lo, hi)
    hits = np.mean((draws >= lo) & (draws <= hi))
    se = math.sqrt(p * (1 - p) / n)
    assert abs(hits - p) <= 3 * se


@pytest.mark.parametrize("kwargs, field", [
    (dict(w1=0.7, w2=0.7), "w1"),
    (dict(k1=0.0), "k1"),
    (dict(eta=-0.1), "eta"),
])
def test_pv_model_validation(kwargs, field):
    base = dict(w1=0.5, w2=0.5, c1=0.4, c2=0.8, k1=2.0, k2=3.0, eta=0.18, s_capacity=300.0)
    with pytest.raises(ValidationError) as info:
        BimodalWeibull(**{**base, **kwargs})
    assert info.value.field == field


def test_forecast_must_be_positive():
    with pytest.raises(ValidationError):
        BimodalWeibull.from_forecast(0.0, 60.0)


# -- load model and confidence ---------------------------------------------

def test_two_sigma_window_matches_erf():
    load = NormalLoad.from_pct(250.0, 5.0)
    half = 1.96 * load.sigma
    assert confidence(load, 250.0 - half, 250.0 + half) == pytest.approx(_normal_mass(1.96), abs=1e-7)


@pytest.mark.parametrize("z", [0.5, 1.0, 2.0, 3.0])
def test_symmetric_windows_match_erf(z):
    load = NormalLoad(mu=100.0, sigma=4.0)
    assert confidence(load, 100 - z * 4, 100 + z * 4) == pytest.approx(_normal_mass(z), abs=1e-7)


def test_full_support_is_certain(noon_pv):
    assert confidence(noon_pv, -math.inf, math.inf) == pytest.approx(1.0, abs=1e-6)
    assert confidence(NormalLoad(10.0, 1.0), -math.inf, math.inf) == pytest.approx(1.0, abs=1e-9)


def test_point_window_has_no_mass(noon_pv):
    assert confidence(noon_pv, 20.0, 20.0) == 0.0


def test_reversed_window_raises(noon_pv):
    with pytest.raises(ValueError):
        confidence(noon_pv, 30.0, 20.0)


def test_sigma_must_be_positive():
    with pytest.raises(ValidationError):
        NormalLoad(100.0, 0.0)


def test_wider_sigma_lowers_confidence():
    lo, hi = 240.0, 262.0
    levels = [confidence(NormalLoad.from_pct(250.0, pct), lo, hi) for pct in (2.0, 5.0, 10.0)]
    assert levels[0] >= levels[1] >= levels[2]


@given(st.floats(0.0, 40.0), st.floats(0.0, 20.0), st.floats(0.0, 20.0))
@settings(max_examples=50, deadline=None)
def test_confidence_monotone_in_window(lo, width, extra):
    model = BimodalWeibull.from_forecast(30.0, 60.0)
    inner = confidence(model, lo, lo + width)
    outer = confidence(model, lo - extra, lo + width + extra)
    assert 0.0 <= inner <= outer + 1e-9 <= 1.0 + 1e-9


# -- reports ---------------------------------------------------------------

def test_night_hour_is_not_applicable(schedule):
    hr = schedule.hour(2)
    sa = pv_range(hr.solution, hr.rowmap, 5, pv_mw=0.0, pv_capacity=60.0)
    (res,) = confidence_report(sa, {}, 2)
    assert not res.applicable


def test_missing_pv_model(schedule):
    hr = schedule.hour(12)
    with pytest.raises(MissingModelError):
        confidence_report(hr.sa[5], {}, 12)


def test_missing_load_model(schedule):
    with pytest.raises(MissingModelError):
        confidence_report(schedule.hour(12).itr, {"pv": None}, 12)


def test_range_without_pv_point():
    with pytest.raises(ValueError):
        confidence_report(SensitivityRange(0, -1.0, 1.0), {}, 1)


def test_system_window_and_per_bus(schedule):
    hr = schedule.hour(4)
    ranges = hr.itr
    model = NormalLoad.from_pct(ranges.loads.sum(), 5.0)
    out = confidence_report(ranges, {"load": model}, 4, per_bus=True, bus_ids=hr.rowmap.case.bus_ids)
    total = ranges.loads.sum()
    assert (out[0].lower, out[0].upper) == (total + ranges.total_dec, total + ranges.total_inc)
    assert len(out) == 1 + len(ranges.loads)
    zero = [r for r in out[1:] if not r.applicable]
    assert len(zero) == int(np.sum(ranges.loads == 0))


def _pv_conf(schedule, hour, bus):
    for res in schedule.hour(hour).confidence:
        if res.entity == f"pv@bus{bus}":
            return res.confidence
    raise LookupError(hour, bus)


def test_source_bus_at_least_as_confident_as_remote(schedule):
    for hr in schedule.hours:
        if hr.instance.pv_mw <= 0:
            continue
        assert _pv_conf(schedule, hr.hour, 5) >= _pv_conf(schedule, hr.hour, 29) - 1e-12


def test_peak_hours_less_confident_than_shoulders(schedule):
    pv = np.array([hr.instance.pv_mw for hr in schedule.hours])
    top = pv.max()
    peak = [hr.hour for hr in schedule.hours if hr.instance.pv_mw >= 0.75 * top]
    shoulder = [hr.hour for hr in schedule.hours if 0 < hr.instance.pv_mw <= 0.25 * top]
    assert peak and shoulder
    assert max(_pv_conf(schedule, h, 5) for h in peak) < min(_pv_conf(schedule, h, 5) for h in shoulder)


def test_load_ladder_in_reports(schedule):
    for hr in schedule.hours:
        levels = {r.model: r.confidence for r in hr.confidence if r.entity == "system_load"}
        assert levels["normal_2pct"] >= levels["normal_5pct"] >= levels["normal_10pct"]


def test_itr_window_confidence_is_probability(schedule):
    hr = schedule.hour(12)
    ranges = itr(hr.solution, hr.rowmap, hr.instance.bus_loads)
    (res,) = confidence_report(ranges, {"load": NormalLoad.from_pct(ranges.loads.sum(), 2.0)}, 12)
    assert 0.0 <= res.confidence <= 1.0
