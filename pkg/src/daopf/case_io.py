"""Network case and hourly profile ingestion, validation and result writers.

Case files are JSON with the fields of :class:`NetworkCase` (snake_case).
Profiles are CSV with header ``hour,system_load_mw,pv_mw`` and 1-based hours.
"""
import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ParseError, ValidationError

FRACTION_TOL = 1e-9
PROFILE_HEADER = ("hour", "system_load_mw", "pv_mw")


@dataclass(frozen=True)
class Bus:
    id: int
    load_fraction: float = 0.0


@dataclass(frozen=True)
class Branch:
    id: int
    from_bus: int
    to_bus: int
    reactance: float
    capacity: float


@dataclass(frozen=True)
class Generator:
    id: int
    bus: int
    p_min: float
    p_max: float
    ramp_up: float
    ramp_down: float
    cost: float


@dataclass(frozen=True)
class NetworkCase:
    buses: tuple
    branches: tuple
    generators: tuple
    base_mva: float = 100.0
    name: str = ""

    @property
    def bus_ids(self):
        return [b.id for b in self.buses]

    @property
    def bus_index(self):
        return {b.id: i for i, b in enumerate(self.buses)}

    @property
    def load_fractions(self):
        return np.array([b.load_fraction for b in self.buses])

    @property
    def nbus(self):
        return len(self.buses)

    def bus_loads(self, system_load):
        return system_load * self.load_fractions


@dataclass(frozen=True, eq=False)
class HourlyProfile:
    system_load: np.ndarray
    pv_output: np.ndarray
    pv_bus: int = None
    pv_capacity: float = None
    hours: tuple = field(default=())

    def __post_init__(self):
        if not self.hours:
            object.__setattr__(self, "hours", tuple(range(1, len(self.system_load) + 1)))

    @property
    def H(self):
        return len(self.hours)

    def load_at(self, hour):
        return float(self.system_load[hour - 1])

    def pv_at(self, hour):
        return float(self.pv_output[hour - 1])


# -- case ------------------------------------------------------------------

_REQUIRED = {
    "buses": ("id",),
    "branches": ("id", "from_bus", "to_bus", "reactance", "capacity"),
    "generators": ("id", "bus", "p_min", "p_max", "ramp_up", "ramp_down", "cost"),
}


def _records(data, key, cls):
    if key not in data or not isinstance(data[key], list):
        raise ParseError(f"case is missing the list field {key!r}")
    out = []
    for i, rec in enumerate(data[key]):
        if not isinstance(rec, dict):
            raise ParseError(f"{key}[{i}] is not an object")
        missing = [f for f in _REQUIRED[key] if f not in rec]
        if missing:
            raise ParseError(f"{key}[{i}] missing field(s) {', '.join(missing)}")
        try:
            out.append(cls(**rec))
        except TypeError as exc:
            raise ParseError(f"{key}[{i}]: {exc}") from None
    return tuple(out)


def case_from_dict(data):
    """Build and validate a :class:`NetworkCase` from a parsed JSON object."""
    if not isinstance(data, dict):
        raise ParseError("case root must be a JSON object")
    case = NetworkCase(
        buses=_records(data, "buses", Bus),
        branches=_records(data, "branches", Branch),
        generators=_records(data, "generators", Generator),
        base_mva=float(data.get("base_mva", 100.0)),
        name=str(data.get("name", "")),
    )
    validate_case(case)
    return case


def validate_case(case):
    for key in ("buses", "branches", "generators"):
        for i, rec in enumerate(getattr(case, key)):
            for name, value in asdict(rec).items():
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ValidationError(f"{key}[{i}].{name}: expected a number", f"{key}[{i}].{name}")
                if isinstance(value, float) and not math.isfinite(value):
                    raise ValidationError(f"{key}[{i}].{name}: must be finite", f"{key}[{i}].{name}")
    if not case.buses:
        raise ValidationError("case has no buses", "buses")
    if case.base_mva <= 0:
        raise ValidationError("base_mva must be positive", "base_mva")
    ids = case.bus_ids
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise ValidationError(f"duplicate bus id(s) {dup}", "buses.id")
    known = set(ids)
    for i, b in enumerate(case.buses):
        if b.load_fraction < 0:
            raise ValidationError(f"buses[{i}].load_fraction must be >= 0", f"buses[{i}].load_fraction")
    total = sum(b.load_fraction for b in case.buses)
    if abs(total - 1.0) > FRACTION_TOL:
        raise ValidationError(f"load fractions sum to {total!r}, expected 1", "buses.load_fraction")
    for i, br in enumerate(case.branches):
        for end in ("from_bus", "to_bus"):
            bus = getattr(br, end)
            if bus not in known:
                raise ValidationError(f"branch endpoint {bus} unknown", f"branches[{i}].{end}")
        if br.from_bus == br.to_bus:
            raise ValidationError(f"branch {br.id} is a self-loop", f"branches[{i}]")
        if br.reactance <= 0:
            raise ValidationError(f"branch {br.id} reactance must be > 0", f"branches[{i}].reactance")
        if br.capacity <= 0:
            raise ValidationError(f"branch {br.id} capacity must be > 0", f"branches[{i}].capacity")
    if not case.generators:
        raise ValidationError("case has no generators", "generators")
    for i, g in enumerate(case.generators):
        where = f"generators[{i}]"
        if g.bus not in known:
            raise ValidationError(f"generator bus {g.bus} unknown", f"{where}.bus")
        if g.p_min > g.p_max:
            raise ValidationError(f"generator {g.id}: p_min > p_max", f"{where}.p_min")
        if g.p_min < 0:
            raise ValidationError(f"generator {g.id}: p_min must be >= 0", f"{where}.p_min")
        if g.ramp_up < 0 or g.ramp_down < 0:
            raise ValidationError(f"generator {g.id}: ramp rates must be >= 0", f"{where}.ramp_up")
        if g.cost < 0:
            raise ValidationError(f"generator {g.id}: cost must be >= 0", f"{where}.cost")
    if len(case.buses) > 1:
        idx = case.bus_index
        rows = [idx[br.from_bus] for br in case.branches]
        cols = [idx[br.to_bus] for br in case.branches]
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(case.nbus, case.nbus))
        n_islands, _ = connected_components(graph, directed=False)
        if n_islands != 1:
            raise ValidationError(f"network has {n_islands} islands; a single island is required", "branches")


def load_case(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read case file {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from None
    return case_from_dict(data)


def case_to_dict(case):
    return {
        "name": case.name,
        "base_mva": case.base_mva,
        "buses": [asdict(b) for b in case.buses],
        "branches": [asdict(b) for b in case.branches],
        "generators": [asdict(g) for g in case.generators],
    }


def serialize_case(case):
    return json.dumps(case_to_dict(case), indent=2)


def write_case(case, path):
    Path(path).write_text(serialize_case(case) + "\n")


# -- profile ---------------------------------------------------------------

def load_profile(path, case, *, hours=24, pv_bus=None, pv_capacity=None):
    """Read an hourly profile and check it against ``case``.

    ``pv_bus``/``pv_capacity`` come from the run configuration, not the CSV.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    except OSError as exc:
        raise ParseError(f"cannot read profile {path}: {exc}") from None
    if not rows:
        raise ParseError(f"{path}: empty profile")
    header = tuple(c.strip() for c in rows[0])
    if header != PROFILE_HEADER:
        raise ParseError(f"{path}: header must be {','.join(PROFILE_HEADER)}, got {','.join(header)}")
    body = rows[1:]
    if len(body) != hours:
        raise ParseError(f"{path}: {len(body)} data rows but H={hours} declared")
    load = np.empty(hours)
    pv = np.empty(hours)
    for i, row in enumerate(body):
        if len(row) != 3:
            raise ParseError(f"{path}: row {i + 2} has {len(row)} fields, expected 3")
        try:
            hour, load[i], pv[i] = int(row[0]), float(row[1]), float(row[2])
        except ValueError:
            raise ParseError(f"{path}: row {i + 2} is not numeric") from None
        if hour != i + 1:
            raise ParseError(f"{path}: row {i + 2} has hour {hour}, expected {i + 1}")
    return make_profile(load, pv, case, pv_bus=pv_bus, pv_capacity=pv_capacity)


def make_profile(system_load, pv_output, case, *, pv_bus=None, pv_capacity=None):
    load = np.asarray(system_load, dtype=float)
    pv = np.asarray(pv_output, dtype=float)
    if load.shape != pv.shape or load.ndim != 1:
        raise ValidationError("load and pv series must be 1-d and equally long", "profile")
    bad = np.flatnonzero(~(load > 0))
    if bad.size:
        raise ValidationError(f"system load must be > 0 (hour {bad[0] + 1})", "system_load_mw")
    bad = np.flatnonzero(~(pv >= 0))
    if bad.size:
        raise ValidationError(f"pv output must be >= 0 (hour {bad[0] + 1})", "pv_mw")
    if pv_bus is not None and pv_bus not in case.bus_index:
        raise ValidationError(f"pv bus {pv_bus} unknown", "pv_bus")
    if pv_capacity is not None:
        bad = np.flatnonzero(pv > pv_capacity)
        if bad.size:
            raise ValidationError(
                f"pv output {pv[bad[0]]} MW exceeds capacity {pv_capacity} MW (hour {bad[0] + 1})", "pv_mw"
            )
    if pv_bus is None and np.any(pv > 0):
        raise ValidationError("profile has pv output but no pv bus was given", "pv_bus")
    load.setflags(write=False)
    pv.setflags(write=False)
    return HourlyProfile(system_load=load, pv_output=pv, pv_bus=pv_bus, pv_capacity=pv_capacity)


def write_profile(profile, path):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_HEADER)
        for h, load, pv in zip(profile.hours, profile.system_load, profile.pv_output):
            w.writerow([h, repr(float(load)), repr(float(pv))])


# -- result writers --------------------------------------------------------

def _cell(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10g}"
    return v


def write_csv(path, header, rows):
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_tables(tables, outdir):
    """Write ``{name: (header, rows)}`` as ``outdir/name.csv``; returns the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, (header, rows) in tables.items():
        p = outdir / f"{name}.csv"
        write_csv(p, header, rows)
        paths.append(p)
    return paths
