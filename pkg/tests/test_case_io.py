import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from daopf.case_io import (
    Branch, Bus, Generator, NetworkCase, case_from_dict, case_to_dict, load_case, load_profile, make_profile,
    serialize_case, validate_case, write_case, write_csv, write_profile, write_tables,
)
from daopf.errors import ParseError, ValidationError

from conftest import two_bus_case


def _profile_text(loads, pv):
    lines = ["hour,system_load_mw,pv_mw"]
    lines += [f"{h},{l},{p}" for h, (l, p) in enumerate(zip(loads, pv), start=1)]
    return "\n".join(lines) + "\n"


def test_ieee30_fixture_shape(ieee30):
    assert ieee30.nbus == 30
    assert len(ieee30.branches) == 41
    assert sorted(g.bus for g in ieee30.generators) == [1, 2, 5, 8, 11, 13]


def test_ieee30_generator_limits(ieee30):
    by_bus = {g.bus: g for g in ieee30.generators}
    assert by_bus[2].p_max == 80
    assert by_bus[8].p_min == by_bus[11].p_min == 10
    assert by_bus[13].p_min == 12


def test_two_bus_case_is_valid(tmp_path):
    path = tmp_path / "two.json"
    write_case(two_bus_case(), path)
    case = load_case(path)
    assert case.nbus == 2
    assert case.bus_ids == [1, 2]


def test_unknown_branch_endpoint(tmp_path):
    data = case_to_dict(two_bus_case())
    data["branches"][0]["to_bus"] = 99
    with pytest.raises(ValidationError, match="branch endpoint 99 unknown") as info:
        case_from_dict(data)
    assert info.value.field == "branches[0].to_bus"


@pytest.mark.parametrize("section, key, value, field", [
    ("branches", "reactance", 0.0, "reactance"),
    ("branches", "capacity", -1.0, "capacity"),
    ("generators", "p_min", 400.0, "p_min"),
    ("generators", "ramp_up", -1.0, "ramp_up"),
    ("generators", "cost", -5.0, "cost"),
    ("buses", "load_fraction", 0.5, "load_fraction"),
])
def test_invariant_violations_name_the_field(section, key, value, field):
    data = case_to_dict(two_bus_case())
    data[section][-1][key] = value
    with pytest.raises(ValidationError) as info:
        case_from_dict(data)
    assert field in info.value.field


def test_duplicate_bus_ids():
    data = case_to_dict(two_bus_case())
    data["buses"][1]["id"] = 1
    with pytest.raises(ValidationError, match="duplicate"):
        case_from_dict(data)


def test_disconnected_network_rejected():
    case = NetworkCase(
        buses=(Bus(1, 0.5), Bus(2, 0.5), Bus(3, 0.0), Bus(4, 0.0)),
        branches=(Branch(1, 1, 2, 0.1, 10.0), Branch(2, 3, 4, 0.1, 10.0)),
        generators=(Generator(1, 1, 0, 10, 1, 1, 1),),
    )
    with pytest.raises(ValidationError, match="islands"):
        validate_case(case)


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        load_case(p)


def test_missing_section():
    with pytest.raises(ParseError, match="branches"):
        case_from_dict({"buses": [{"id": 1, "load_fraction": 1.0}], "generators": []})


def test_non_numeric_field():
    data = case_to_dict(two_bus_case())
    data["branches"][0]["capacity"] = "lots"
    with pytest.raises(ValidationError, match="expected a number"):
        case_from_dict(data)


def test_round_trip_fixture(ieee30, tmp_path):
    p = tmp_path / "again.json"
    p.write_text(serialize_case(ieee30))
    assert load_case(p) == ieee30


@st.composite
def random_cases(draw):
    n = draw(st.integers(2, 8))
    raw = draw(st.lists(st.floats(0.0, 10.0), min_size=n, max_size=n))
    total = sum(raw) or 1.0
    fracs = [r / total for r in raw] if sum(raw) else [1.0 / n] * n
    fracs[-1] = 1.0 - sum(fracs[:-1])
    if fracs[-1] < 0:
        fracs[-1] = 0.0
    buses = tuple(Bus(i + 1, f) for i, f in enumerate(fracs))
    branches = []
    for i in range(1, n):  # random spanning tree keeps one island
        parent = draw(st.integers(1, i))
        branches.append(Branch(i, parent, i + 1, draw(st.floats(0.01, 1.0)), draw(st.floats(1.0, 500.0))))
    gens = []
    for k in range(draw(st.integers(1, 4))):
        lo = draw(st.floats(0.0, 50.0))
        gens.append(Generator(k + 1, draw(st.integers(1, n)), lo, lo + draw(st.floats(0.0, 100.0)),
                              draw(st.floats(0.0, 50.0)), draw(st.floats(0.0, 50.0)), draw(st.floats(0.0, 60.0))))
    return NetworkCase(buses=buses, branches=tuple(branches), generators=tuple(gens),
                       base_mva=draw(st.sampled_from([1.0, 100.0])), name="random")


@given(random_cases())
@settings(max_examples=60, deadline=None)
def test_serialize_round_trip_property(case):
    try:
        validate_case(case)
    except ValidationError:
        return  # fraction rounding can miss the 1e-9 window; not what is under test
    assert case_from_dict(json.loads(serialize_case(case))) == case


@given(st.floats(1.0, 1e4))
@settings(max_examples=50, deadline=None)
def test_bus_loads_sum_to_system_load(ieee30, load):
    assert abs(ieee30.bus_loads(load).sum() - load) <= 1e-9 * max(1.0, load)


# -- profiles --------------------------------------------------------------

def test_fixture_profile_peaks(config, ieee30):
    prof = load_profile(config.profile_path, ieee30, pv_bus=5, pv_capacity=60.0)
    assert prof.H == 24
    assert int(np.argmax(prof.system_load)) + 1 == 4
    assert prof.load_at(4) == 283.4
    assert int(np.argmax(prof.pv_output)) + 1 == 12
    assert prof.pv_at(12) == 49.3


def test_bus_loads_each_hour(config, ieee30):
    prof = load_profile(config.profile_path, ieee30, pv_bus=5, pv_capacity=60.0)
    for h in prof.hours:
        assert abs(ieee30.bus_loads(prof.load_at(h)).sum() - prof.load_at(h)) <= 1e-9


def test_all_zero_pv_is_accepted(tmp_path, ieee30):
    p = tmp_path / "p.csv"
    p.write_text(_profile_text([100.0] * 24, [0.0] * 24))
    prof = load_profile(p, ieee30)
    assert prof.H == 24 and not prof.pv_output.any()


def test_short_profile_is_parse_error(tmp_path, ieee30):
    p = tmp_path / "p.csv"
    p.write_text(_profile_text([100.0] * 23, [0.0] * 23))
    with pytest.raises(ParseError, match="23"):
        load_profile(p, ieee30, hours=24)


def test_profile_bad_header(tmp_path, ieee30):
    p = tmp_path / "p.csv"
    p.write_text("hour,load,pv\n1,1,0\n")
    with pytest.raises(ParseError, match="header"):
        load_profile(p, ieee30, hours=1)


def test_profile_negative_load(tmp_path, ieee30):
    p = tmp_path / "p.csv"
    p.write_text(_profile_text([100.0, -1.0], [0.0, 0.0]))
    with pytest.raises(ValidationError) as info:
        load_profile(p, ieee30, hours=2)
    assert info.value.field == "system_load_mw"


def test_profile_unknown_pv_bus(tmp_path, ieee30):
    p = tmp_path / "p.csv"
    p.write_text(_profile_text([100.0], [1.0]))
    with pytest.raises(ValidationError, match="pv bus 77"):
        load_profile(p, ieee30, hours=1, pv_bus=77)


def test_profile_pv_over_capacity(ieee30):
    with pytest.raises(ValidationError, match="capacity"):
        make_profile([100.0], [61.0], ieee30, pv_bus=5, pv_capacity=60.0)


def test_profile_pv_without_bus(ieee30):
    with pytest.raises(ValidationError, match="no pv bus"):
        make_profile([100.0], [1.0], ieee30)


def test_profile_round_trip(tmp_path, config, ieee30):
    prof = load_profile(config.profile_path, ieee30, pv_bus=5, pv_capacity=60.0)
    p = tmp_path / "p.csv"
    write_profile(prof, p)
    again = load_profile(p, ieee30, pv_bus=5, pv_capacity=60.0)
    np.testing.assert_array_equal(again.system_load, prof.system_load)
    np.testing.assert_array_equal(again.pv_output, prof.pv_output)


def test_write_csv_formats(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ("a", "b", "c"), [(1, math.inf, 0.1 + 0.2), ("x", -math.inf, 2.0)])
    assert p.read_text().splitlines() == ["a,b,c", "1,inf,0.3", "x,-inf,2"]


def test_write_tables(tmp_path):
    paths = write_tables({"one": (("h",), [(1,)]), "two": (("h",), [])}, tmp_path / "out")
    assert [p.name for p in paths] == ["one.csv", "two.csv"]
