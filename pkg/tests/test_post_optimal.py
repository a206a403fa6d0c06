import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daopf.dcopf import HourlyDcopfInstance, build
from daopf.errors import BasisInvalidError, DimensionError, OutOfRangeError, ZeroTotalDelta
from daopf.lp_core import solve
from daopf.post_optimal import (
    apply_update, basis_feasible, itr, participation_factors, pv_delta_vector, pv_range, r_matrix, sa_range,
    update_loads,
)

from conftest import two_bus_case


@pytest.fixture(scope="module")
def two_bus():
    # one generator at bus 1 (0..200 MW), 100 MW load at bus 2, line limit 150 MW
    case = two_bus_case(p_max=200.0, cap=150.0)
    lp, rowmap = build(case, HourlyDcopfInstance(case, 1, np.array([0.0, 100.0])))
    return solve(lp), rowmap


def _same_state(a, b):
    return (a.basis_set() == b.basis_set()
            and abs(a.objective - b.objective) <= 1e-7 * max(1.0, abs(b.objective))
            and np.abs(a.duals - b.duals).max() <= 1e-9)


def test_two_bus_sa_by_hand(two_bus):
    sol, rowmap = two_bus
    rng = sa_range(sol, rowmap.balance_row(2))
    # load may rise 50 MW before the line saturates, and fall 100 MW to zero dispatch
    assert rng.delta_max == pytest.approx(50.0)
    assert rng.delta_min == pytest.approx(-100.0)


def test_pv_view_flips_sign(two_bus):
    sol, rowmap = two_bus
    r = pv_range(sol, rowmap, 2, pv_mw=10.0, pv_capacity=60.0)
    assert (r.pv_delta_min, r.pv_delta_max) == (pytest.approx(-50.0), pytest.approx(100.0))
    assert r.pv_window == (pytest.approx(-40.0), pytest.approx(110.0))
    assert r.pv_min == 0.0 and r.pv_max == 60.0


def test_sa_row_out_of_range(two_bus):
    with pytest.raises(DimensionError):
        sa_range(two_bus[0], 99)


def test_unbounded_side_is_flagged(two_bus):
    sol, rowmap = two_bus
    r = sa_range(sol, rowmap.rows_of("gen_upper")[0])
    # more headroom on the upper limit never hurts the basis
    assert r.unbounded == (False, True)


@pytest.mark.parametrize("hour", [1, 4, 8, 12, 16, 20])
def test_sa_matches_resolve(schedule, hour):
    hr = schedule.hour(hour)
    sol = hr.solution
    for row in range(0, sol.lp.shape[0], 7):
        r = sa_range(sol, row)
        for end in (r.delta_min, r.delta_max):
            if not np.isfinite(end) or abs(end) < 1e-6:
                continue
            inside = np.array(sol.lp.b)
            inside[row] += 0.999 * end
            assert solve(sol.lp.with_rhs(inside)).basis_set() == sol.basis_set()


@pytest.mark.parametrize("hour", range(1, 25))
def test_itr_box_inside_sa_interval(schedule, hour):
    hr = schedule.hour(hour)
    ranges = itr(hr.solution, hr.rowmap, hr.instance.bus_loads)
    for j, bus in enumerate(hr.rowmap.case.buses):
        r = sa_range(hr.solution, hr.rowmap.balance_row(bus.id))
        assert r.delta_min - 1e-9 <= ranges.dec[j] <= 0.0 <= ranges.inc[j] <= r.delta_max + 1e-9


def test_itr_vertices_keep_feasibility(schedule, rng):
    hr = schedule.hour(12)
    sol, rowmap, loads = hr.solution, hr.rowmap, hr.instance.bus_loads
    ranges = itr(sol, rowmap, loads)
    for _ in range(200):
        corner = np.where(rng.random(len(loads)) < 0.5, ranges.dec, ranges.inc)
        assert basis_feasible(sol, sol.lp.b + rowmap.balance_rhs(corner))


def test_itr_unbounded_sides_are_capped(two_bus):
    sol, rowmap = two_bus
    ranges = itr(sol, rowmap, np.array([0.0, 100.0]))
    assert ranges.inc[1] == pytest.approx(50.0)
    # without a blocking row, the decrease is capped at the whole load and flagged
    assert ranges.dec[0] == 0.0
    assert ranges.total_dec == pytest.approx(-100.0)


def test_itr_loads_shape(two_bus):
    with pytest.raises(DimensionError):
        itr(two_bus[0], two_bus[1], np.ones(3))


def test_r_matrix_columns(schedule):
    hr = schedule.hour(5)
    R = r_matrix(hr.solution, hr.rowmap)
    np.testing.assert_array_equal(R, hr.solution.basis_inverse[:, hr.rowmap.balance_rows])


# -- participation factors -------------------------------------------------

def test_participation_sums_to_one(schedule, rng):
    for _ in range(200):
        hr = schedule.hours[rng.integers(len(schedule.hours))]
        ranges = itr(hr.solution, hr.rowmap, hr.instance.bus_loads)
        delta = rng.uniform(ranges.dec, ranges.inc)
        if abs(delta.sum()) < 1e-6:
            continue
        pf = participation_factors(hr.solution, hr.rowmap, delta, loads=hr.instance.bus_loads)
        assert abs(pf.beta.sum() - 1.0) <= 1e-9


def test_generators_at_limits_do_not_participate(schedule):
    hr = schedule.hour(12)
    loads = hr.instance.bus_loads
    ranges = itr(hr.solution, hr.rowmap, loads)
    pf = participation_factors(hr.solution, hr.rowmap, 0.5 * ranges.dec, loads=loads)
    lo, hi = hr.instance.bounds
    at_limit = (np.abs(hr.dispatch.gen_mw - lo) < 1e-9) | (np.abs(hr.dispatch.gen_mw - hi) < 1e-9)
    assert at_limit[3] and at_limit[4]  # generators 4 and 5 sit at their 10 MW floor
    assert np.all(pf.beta[at_limit] == 0.0)
    assert pf.beta[1] == pytest.approx(1.0)


def test_uniform_three_percent_drop_matches_resolve(schedule):
    hr = schedule.hour(12)
    loads = hr.instance.bus_loads
    delta = -0.03 * loads
    pf = participation_factors(hr.solution, hr.rowmap, delta, loads=loads)
    inst = HourlyDcopfInstance(hr.rowmap.case, 12, loads + delta, pv_bus=5, pv_mw=hr.instance.pv_mw,
                               prev_gen=schedule.hour(11).dispatch.gen_mw)
    fresh = solve(build(hr.rowmap.case, inst, ref_bus=1)[0])
    np.testing.assert_allclose(hr.dispatch.gen_mw + pf.delta_gen, fresh.x[:6], atol=1e-7)


def test_beta_invariant_under_scaling(schedule):
    hr = schedule.hour(9)
    loads = hr.instance.bus_loads
    ranges = itr(hr.solution, hr.rowmap, loads)
    delta = 0.6 * ranges.inc
    a = participation_factors(hr.solution, hr.rowmap, delta, loads=loads)
    b = participation_factors(hr.solution, hr.rowmap, 0.25 * delta, loads=loads)
    assert np.abs(a.beta - b.beta).max() <= 1e-12


def test_zero_total_delta(schedule):
    hr = schedule.hour(9)
    delta = np.zeros(hr.rowmap.nbus)
    delta[1], delta[2] = 0.01, -0.01
    with pytest.raises(ZeroTotalDelta):
        participation_factors(hr.solution, hr.rowmap, delta)


def test_out_of_range_delta_is_rejected(schedule):
    hr = schedule.hour(12)
    with pytest.raises(OutOfRangeError):
        participation_factors(hr.solution, hr.rowmap, pv_delta_vector(hr.rowmap, 5, -45.0))
    with pytest.raises(OutOfRangeError):
        participation_factors(hr.solution, hr.rowmap, -0.5 * hr.instance.bus_loads,
                              loads=hr.instance.bus_loads)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(1, 24))
@settings(max_examples=60, deadline=None)
def test_shrinking_never_rejects(schedule, u, shrink, hour):
    hr = schedule.hour(hour)
    loads = hr.instance.bus_loads
    ranges = itr(hr.solution, hr.rowmap, loads)
    delta = ranges.dec + u * (ranges.inc - ranges.dec)
    if abs(delta.sum()) < 1e-9 or abs((shrink * delta).sum()) < 1e-9:
        return
    participation_factors(hr.solution, hr.rowmap, delta, loads=loads)
    participation_factors(hr.solution, hr.rowmap, shrink * delta, loads=loads)


# -- updates ---------------------------------------------------------------

def test_zero_update_is_identity(schedule):
    sol = schedule.hour(3).solution
    new = apply_update(sol, np.zeros(sol.lp.shape[0]))
    np.testing.assert_array_equal(new.x, sol.x)
    assert new.objective == pytest.approx(sol.objective, rel=1e-15)


def test_update_keeps_basis_objects(schedule):
    hr = schedule.hour(12)
    new = update_loads(hr.solution, hr.rowmap, pv_delta_vector(hr.rowmap, 5, -2.0))
    assert new.basis is hr.solution.basis
    assert new.basis_inverse is hr.solution.basis_inverse
    assert new.duals is hr.solution.duals


def test_successive_equals_combined_equals_resolve(schedule):
    hr = schedule.hour(12)
    sol, rowmap = hr.solution, hr.rowmap
    first = update_loads(sol, rowmap, pv_delta_vector(rowmap, 5, -3.0))
    second = update_loads(first, rowmap, pv_delta_vector(rowmap, 5, -4.5))
    combined = update_loads(sol, rowmap, pv_delta_vector(rowmap, 5, -7.5))
    np.testing.assert_allclose(second.x, combined.x, atol=1e-10)
    fresh = solve(sol.lp.with_rhs(second.lp.b))
    assert _same_state(second, fresh)
    np.testing.assert_allclose(second.x, fresh.x, atol=1e-8)


def test_ranges_after_update_equal_cold_ranges(schedule):
    hr = schedule.hour(11)
    sol, rowmap = hr.solution, hr.rowmap
    new = update_loads(sol, rowmap, pv_delta_vector(rowmap, 5, -4.25))
    cold = solve(new.lp)
    warm_r = pv_range(new, rowmap, 5)
    cold_r = pv_range(cold, rowmap, 5)
    assert warm_r.delta_min == pytest.approx(cold_r.delta_min, abs=1e-8)
    assert warm_r.delta_max == pytest.approx(cold_r.delta_max, abs=1e-8)
    loads = hr.instance.bus_loads
    np.testing.assert_allclose(itr(new, rowmap, loads).dec, itr(cold, rowmap, loads).dec, atol=1e-8)


def test_infeasible_update_raises(schedule):
    hr = schedule.hour(12)
    with pytest.raises(BasisInvalidError):
        update_loads(hr.solution, hr.rowmap, pv_delta_vector(hr.rowmap, 5, -45.0))


def test_update_dimension_error(schedule):
    with pytest.raises(DimensionError):
        apply_update(schedule.hour(1).solution, np.zeros(3))


@given(st.integers(1, 24), st.integers(0, 10**6), st.floats(0.01, 0.99))
@settings(max_examples=80, deadline=None)
def test_update_equals_resolve_property(schedule, hour, row_seed, u):
    hr = schedule.hour(hour)
    sol = hr.solution
    row = row_seed % sol.lp.shape[0]
    r = sa_range(sol, row)
    lo, hi = max(r.delta_min, -100.0), min(r.delta_max, 100.0)
    delta = np.zeros(sol.lp.shape[0])
    delta[row] = lo + u * (hi - lo)
    new = apply_update(sol, delta)
    assert _same_state(new, solve(new.lp))


def test_pv_delta_vector(schedule):
    rowmap = schedule.hour(1).rowmap
    d = pv_delta_vector(rowmap, 5, 3.0)
    assert d[4] == -3.0 and np.count_nonzero(d) == 1
