"""Day-ahead loop: hour-linked solves, post-optimal analysis, events, timing.

Each hour is solved cold; the previous hour's dispatch only enters through
the ramp-folded generator bounds. Events are handled on the retained basis
of their hour and fall back to a re-solve when they leave the certified
ranges. Events do not carry over into later hours.
"""
import csv
import logging
import math
import statistics
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import kernels
from .case_io import load_case, load_profile, write_json, write_tables
from .dcopf import HourlyDcopfInstance, build, extract_dispatch
from .errors import (
    BasisInvalidError, DaopfError, HourInfeasibleError, OutOfRangeError, ParseError, ValidationError,
)
from .lmp import gsf_matrix, lmp_report
from .lp_core import LpStatus, SimplexOptions, solve
from .post_optimal import itr, participation_factors, pv_range, update_loads
from .uncertainty import BimodalWeibull, NormalLoad, confidence_report

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger(__name__)

EVENT_HEADER = ("hour", "kind", "target", "mw")
EVENT_KINDS = ("pv_delta", "load_delta")
BENCH_CATEGORIES = ("sa", "itr", "beta", "range_update")


# -- configuration ---------------------------------------------------------

@dataclass(frozen=True)
class UncertaintyConfig:
    w1: float = 0.45
    w2: float = 0.55
    k1: float = 2.0
    k2: float = 3.5
    scale_ratio: float = 2.0
    eta: float = 0.18
    rated_irradiance: float = 1.0
    load_sigma_pct: tuple = (2.0, 5.0, 10.0)

    def pv_model(self, forecast_mw, capacity_mw):
        return BimodalWeibull.from_forecast(
            forecast_mw, capacity_mw, w1=self.w1, w2=self.w2, k1=self.k1, k2=self.k2,
            scale_ratio=self.scale_ratio, eta=self.eta, rated_irradiance=self.rated_irradiance,
        )


@dataclass(frozen=True)
class RunConfig:
    case_path: Path
    profile_path: Path
    pv_bus: int = None
    pv_capacity: float = None
    reference_bus: int = None
    hours: int = 24
    analysis_buses: tuple = ()
    events_path: Path = None
    output_dir: Path = Path("out")
    feas_tol: float = 1e-9
    opt_tol: float = 1e-8
    reinvert_every: int = 50
    uncertainty: UncertaintyConfig = field(default_factory=UncertaintyConfig)

    def simplex_options(self):
        return SimplexOptions(feas_tol=self.feas_tol, opt_tol=self.opt_tol, reinvert_every=self.reinvert_every)


# config-file key -> RunConfig field
_FILE_KEYS = {"case": "case_path", "profile": "profile_path", "events": "events_path"}
_PATH_FIELDS = ("case_path", "profile_path", "events_path")


def _parse_scalar(text):
    """Read an override value with TOML syntax, falling back to a bare string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _coerce(name, value, default):
    try:
        if name in _PATH_FIELDS or name == "output_dir":
            return None if value in (None, "") else Path(value)
        if name in ("pv_bus", "reference_bus"):
            return None if value in (None, "", "none") else int(value)
        if name == "pv_capacity":
            return None if value in (None, "", "none") else float(value)
        if isinstance(default, tuple) or name in ("analysis_buses", "load_sigma_pct"):
            items = value if isinstance(value, (list, tuple)) else str(value).split(",")
            kind = int if name == "analysis_buses" else float
            return tuple(kind(v) for v in items)
        if isinstance(default, bool):
            return bool(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"bad value {value!r} for {name}", name) from None
    return value


def config_from_mapping(data, base_dir=".", overrides=None):
    """Build a :class:`RunConfig` from parsed TOML plus ``--key value`` overrides.

    Input paths in ``data`` resolve against ``base_dir``; override paths and
    ``output_dir`` resolve against the working directory. Override keys may
    name an ``[uncertainty]`` field directly or as ``uncertainty.<key>``.
    """
    base_dir = Path(base_dir)
    top = {f.name: f.default for f in fields(RunConfig) if f.name != "uncertainty"}
    unc_defaults = UncertaintyConfig()
    unc_names = {f.name for f in fields(UncertaintyConfig)}
    values, unc = {}, {}

    def put(key, value, from_file):
        key = key.replace("-", "_")
        name = _FILE_KEYS.get(key, key)
        if name.startswith("uncertainty."):
            name = name.split(".", 1)[1]
            if name not in unc_names:
                raise ValidationError(f"unknown uncertainty parameter {name!r}", name)
        if name in top:
            v = _coerce(name, value, top[name])
            if from_file and name in _PATH_FIELDS and v is not None and not v.is_absolute():
                v = base_dir / v
            values[name] = v
        elif name in unc_names:
            unc[name] = _coerce(name, value, getattr(unc_defaults, name))
        else:
            raise ValidationError(f"unknown configuration key {key!r}", key)

    for key, value in data.items():
        if key == "uncertainty":
            if not isinstance(value, dict):
                raise ParseError("[uncertainty] must be a table")
            for k, v in value.items():
                put(f"uncertainty.{k}", v, True)
        else:
            put(key, value, True)
    for key, value in (overrides or {}).items():
        put(key, _parse_scalar(value) if isinstance(value, str) else value, False)

    for name in ("case_path", "profile_path"):
        if name not in values:
            raise ValidationError(f"configuration needs {name.split('_')[0]!r}", name)
    for name in _PATH_FIELDS:
        p = values.get(name)
        if p is not None and not p.exists():
            raise ValidationError(f"{name.split('_')[0]} file {p} does not exist", name)
    cfg = RunConfig(**values, uncertainty=replace(unc_defaults, **unc))
    if cfg.hours < 1:
        raise ValidationError("hours must be >= 1", "hours")
    return cfg


def load_config(path, overrides=None):
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return config_from_mapping(data, path.parent, overrides)


def default_config_path():
    return Path(__file__).parent / "data" / "ieee30.toml"


def load_inputs(cfg):
    case = load_case(cfg.case_path)
    if cfg.pv_bus is not None and cfg.pv_bus not in case.bus_index:
        raise ValidationError(f"pv bus {cfg.pv_bus} unknown", "pv_bus")
    if cfg.reference_bus is not None and cfg.reference_bus not in case.bus_index:
        raise ValidationError(f"reference bus {cfg.reference_bus} unknown", "reference_bus")
    bad = [b for b in cfg.analysis_buses if b not in case.bus_index]
    if bad:
        raise ValidationError(f"analysis bus {bad[0]} unknown", "analysis_buses")
    profile = load_profile(cfg.profile_path, case, hours=cfg.hours, pv_bus=cfg.pv_bus,
                           pv_capacity=cfg.pv_capacity)
    return case, profile


# -- hourly solve ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HourResult:
    hour: int
    instance: HourlyDcopfInstance
    rowmap: object
    solution: object
    dispatch: object
    lmp: object = None
    sa: dict = None  # bus id -> SensitivityRange (PV view)
    itr: object = None
    confidence: tuple = ()

    @property
    def objective(self):
        return self.solution.objective

    @property
    def system_load(self):
        return float(self.instance.bus_loads.sum())


def solve_hour(case, instance, ref_bus=None, options=None):
    lp, rowmap = build(case, instance, ref_bus=ref_bus)
    sol = solve(lp, options)
    if sol.status is LpStatus.INFEASIBLE:
        raise HourInfeasibleError(instance.hour, sol.phase1_objective)
    if sol.status is not LpStatus.OPTIMAL:
        raise DaopfError(f"hour {instance.hour}: LP is {sol.status.value}")
    return sol, rowmap


def analyse_hour(cfg, case, instance, sol, rowmap, gsf=None):
    """LMPs, SA ranges at the analysis buses, ITR and confidence for one solved hour."""
    hour = instance.hour
    lmp = lmp_report(sol, rowmap, case, gsf)
    pv_mw = instance.pv_mw
    buses = list(dict.fromkeys(([cfg.pv_bus] if cfg.pv_bus is not None else []) + list(cfg.analysis_buses)))
    sa = {b: pv_range(sol, rowmap, b, pv_mw=pv_mw, pv_capacity=cfg.pv_capacity) for b in buses}
    ranges = itr(sol, rowmap, instance.bus_loads)

    conf = []
    unc = cfg.uncertainty
    models = {}
    if pv_mw > 0 and cfg.pv_capacity:
        models["pv"] = unc.pv_model(pv_mw, cfg.pv_capacity)
    for b in buses:
        conf.extend(confidence_report(sa[b], models, hour, entity=f"pv@bus{b}"))
    for pct in unc.load_sigma_pct:
        models["load"] = NormalLoad.from_pct(ranges.loads.sum(), pct)
        for res in confidence_report(ranges, models, hour):
            conf.append(replace(res, model=f"normal_{pct:g}pct"))
    return {"lmp": lmp, "sa": sa, "itr": ranges, "confidence": tuple(conf)}


@dataclass(frozen=True, eq=False)
class ScheduleReport:
    config: RunConfig
    case: object
    profile: object
    hours: tuple

    @property
    def total_cost(self):
        return float(sum(h.objective for h in self.hours))

    def hour(self, h):
        return self.hours[h - 1]

    def tables(self):
        case = self.case
        summary, dispatch, lmp, sa, itr_rows, conf, plot = [], [], [], [], [], [], []
        for hr in self.hours:
            h, inst, d = hr.hour, hr.instance, hr.dispatch
            lo, hi = inst.bounds
            summary.append((h, hr.system_load, inst.pv_mw, float(inst.net_loads.sum()), d.total_generation,
                            hr.objective, hr.solution.iterations))
            for k, g in enumerate(case.generators):
                dispatch.append((h, g.id, g.bus, float(d.gen_mw[k]), float(lo[k]), float(hi[k])))
                plot.append((h, f"gen_{g.id}_mw", float(d.gen_mw[k])))
            plot.append((h, "system_load_mw", hr.system_load))
            plot.append((h, "pv_mw", inst.pv_mw))
            if hr.lmp is not None:
                cong = hr.lmp.congestion
                for j, bus in enumerate(case.buses):
                    lmp.append((h, bus.id, float(hr.lmp.lmp[j]), hr.lmp.energy, float(cong[j]),
                                float(hr.lmp.balance_duals[j])))
                plot.append((h, "lmp_energy", hr.lmp.energy))
            for bus, r in (hr.sa or {}).items():
                ub_lo, ub_hi = r.unbounded
                sa.append((h, bus, r.pv_mw, r.delta_min, r.delta_max, r.pv_delta_min, r.pv_delta_max,
                           r.pv_min, r.pv_max, bool(ub_hi), bool(ub_lo)))
                plot.append((h, f"pv_delta_min_bus{bus}", r.pv_delta_min))
                plot.append((h, f"pv_delta_max_bus{bus}", r.pv_delta_max))
            if hr.itr is not None:
                t = hr.itr
                for j, bus in enumerate(case.buses):
                    itr_rows.append((h, bus.id, float(t.loads[j]), float(t.dec[j]), float(t.inc[j]),
                                     bool(t.dec_unbounded[j]), bool(t.inc_unbounded[j])))
                plot.append((h, "itr_total_dec_mw", t.total_dec))
                plot.append((h, "itr_total_inc_mw", t.total_inc))
            for c in hr.confidence:
                conf.append((h, c.entity, c.model, c.lower, c.upper,
                             "n/a" if c.confidence is None else c.confidence))
                if c.confidence is not None:
                    plot.append((h, f"confidence_{c.entity}_{c.model}", c.confidence))
        return {
            "summary": (("hour", "system_load_mw", "pv_mw", "net_load_mw", "total_gen_mw", "objective",
                         "iterations"), summary),
            "dispatch": (("hour", "generator", "bus", "p_mw", "lower_mw", "upper_mw"), dispatch),
            "lmp": (("hour", "bus", "lmp", "energy", "congestion", "balance_dual"), lmp),
            "sa_ranges": (("hour", "bus", "pv_mw", "load_delta_min", "load_delta_max", "pv_delta_min",
                           "pv_delta_max", "pv_min", "pv_max", "pv_min_unbounded", "pv_max_unbounded"), sa),
            "itr": (("hour", "bus", "load_mw", "dec_mw", "inc_mw", "dec_unbounded", "inc_unbounded"), itr_rows),
            "confidence": (("hour", "entity", "model", "lower_mw", "upper_mw", "confidence"), conf),
            "plot_data": (("hour", "series", "value"), plot),
        }

    def write(self, outdir=None):
        outdir = Path(outdir or self.config.output_dir)
        paths = write_tables(self.tables(), outdir)
        write_json(outdir / "schedule.json", {
            "hours": len(self.hours), "total_cost": self.total_cost,
            "objective": [h.objective for h in self.hours],
        })
        return paths


def hour_instance(case, profile, hour, prev_gen=None):
    return HourlyDcopfInstance(
        case=case, hour=hour, bus_loads=case.bus_loads(profile.load_at(hour)),
        pv_bus=profile.pv_bus, pv_mw=profile.pv_at(hour), prev_gen=prev_gen,
    )


def run_schedule(cfg, case=None, profile=None, analyse=True):
    """Solve hours 1..H in order and analyse each optimal basis."""
    if case is None or profile is None:
        case, profile = load_inputs(cfg)
    options = cfg.simplex_options()
    ref_bus = cfg.reference_bus if cfg.reference_bus is not None else case.buses[0].id
    gsf = gsf_matrix(case, ref_bus) if analyse else None
    prev = None
    out = []
    for h in profile.hours:
        inst = hour_instance(case, profile, h, prev)
        sol, rowmap = solve_hour(case, inst, ref_bus, options)
        disp = extract_dispatch(sol, rowmap)
        extra = analyse_hour(cfg, case, inst, sol, rowmap, gsf) if analyse else {}
        out.append(HourResult(hour=h, instance=inst, rowmap=rowmap, solution=sol, dispatch=disp, **extra))
        prev = disp.gen_mw
        log.debug("hour %d: cost %.6g, %d pivots", h, sol.objective, sol.iterations)
    return ScheduleReport(config=cfg, case=case, profile=profile, hours=tuple(out))


# -- events ----------------------------------------------------------------

@dataclass(frozen=True)
class UncertaintyEvent:
    hour: int
    kind: str
    target: object  # bus id, "system", or tuple of bus ids
    mw: object  # float, or tuple matching a bus tuple

    def net_load_delta(self, case):
        """Per-bus net-load change (PV enters with a flipped sign)."""
        d = np.zeros(case.nbus)
        sign = -1.0 if self.kind == "pv_delta" else 1.0
        if self.target == "system":
            d += sign * self.mw * case.load_fractions
        elif isinstance(self.target, tuple):
            mws = self.mw if isinstance(self.mw, tuple) else (self.mw / len(self.target),) * len(self.target)
            for bus, mw in zip(self.target, mws):
                d[case.bus_index[bus]] += sign * mw
        else:
            d[case.bus_index[self.target]] += sign * self.mw
        return d


def _parse_target(text):
    text = text.strip()
    if text == "system":
        return text
    parts = [p for p in text.split(";") if p.strip()]
    ids = tuple(int(p) for p in parts)
    return ids[0] if len(ids) == 1 else ids


def load_events(path, case=None, hours=None):
    """Read an event script ``hour,kind,target,mw``.

    ``target`` is a bus id, ``system`` (spread by load fractions) or a
    ``;``-separated bus list; with a list, ``mw`` is either one total
    split evenly or a matching ``;``-separated list.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ParseError(f"cannot read events {path}: {exc}") from None
    if not rows or tuple(c.strip() for c in rows[0]) != EVENT_HEADER:
        raise ParseError(f"{path}: header must be {','.join(EVENT_HEADER)}")
    events = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise ParseError(f"{path}: row {i} has {len(row)} fields, expected 4")
        kind = row[1].strip()
        if kind == "load_delta_vector":
            kind = "load_delta"
        if kind not in EVENT_KINDS:
            raise ParseError(f"{path}: row {i} has unknown kind {kind!r}")
        try:
            hour = int(row[0])
            target = _parse_target(row[2])
            mw_parts = tuple(float(v) for v in row[3].split(";") if v.strip())
        except ValueError:
            raise ParseError(f"{path}: row {i} is not numeric") from None
        if len(mw_parts) > 1 and not (isinstance(target, tuple) and len(target) == len(mw_parts)):
            raise ParseError(f"{path}: row {i} mw list does not match its bus list")
        mw = mw_parts if len(mw_parts) > 1 else mw_parts[0]
        ev = UncertaintyEvent(hour=hour, kind=kind, target=target, mw=mw)
        validate_event(ev, case, hours)
        events.append(ev)
    return events


def validate_event(ev, case=None, hours=None):
    if hours is not None and not 1 <= ev.hour <= hours:
        raise ValidationError(f"event hour {ev.hour} outside 1..{hours}", "hour")
    if case is not None and ev.target != "system":
        for bus in ev.target if isinstance(ev.target, tuple) else (ev.target,):
            if bus not in case.bus_index:
                raise ValidationError(f"event bus {bus} unknown", "target")


@dataclass(frozen=True, eq=False)
class EventOutcome:
    index: int
    event: UncertaintyEvent
    path: str  # "updated" or "re-optimized"
    status: str  # "optimal", or "infeasible" when a re-solve failed and the event was rejected
    delta_net_load: np.ndarray
    beta: np.ndarray = None
    delta_gen: np.ndarray = None
    objective_before: float = None
    objective_after: float = None
    range_before: dict = None
    range_after: dict = None
    solution: object = None
    reason: str = ""

    @property
    def absorbed(self):
        return self.path == "updated"


def _pct_change(before, after):
    """Change of a range's width in percent; negative means the range shrank."""
    if before == 0 or not (math.isfinite(before) and math.isfinite(after)):
        return float("nan")
    return 100.0 * (abs(after) - abs(before)) / abs(before)


@dataclass(frozen=True, eq=False)
class EventReport:
    outcomes: tuple
    case: object

    @property
    def fallbacks(self):
        return sum(1 for o in self.outcomes if not o.absorbed)

    def tables(self):
        ev_rows, beta_rows = [], []
        keys = ("pv_delta_min", "pv_delta_max", "itr_total_dec", "itr_total_inc")
        for o in self.outcomes:
            e = o.event
            target = ";".join(map(str, e.target)) if isinstance(e.target, tuple) else e.target
            mw = ";".join(f"{v:g}" for v in e.mw) if isinstance(e.mw, tuple) else e.mw
            row = [o.index, e.hour, e.kind, target, mw, o.path, o.status,
                   float(o.delta_net_load.sum()), o.objective_before, o.objective_after]
            for k in keys:
                b = (o.range_before or {}).get(k, float("nan"))
                a = (o.range_after or {}).get(k, float("nan"))
                row += [b, a, _pct_change(b, a)]
            ev_rows.append(tuple(row))
            if o.beta is not None:
                for k, g in enumerate(self.case.generators):
                    beta_rows.append((o.index, e.hour, g.id, float(o.beta[k]), float(o.delta_gen[k])))
        header = ["event", "hour", "kind", "target", "mw", "path", "status", "net_load_change_mw",
                  "objective_before", "objective_after"]
        for k in keys:
            header += [f"{k}_before", f"{k}_after", f"{k}_change_pct"]
        return {
            "events": (tuple(header), ev_rows),
            "participation": (("event", "hour", "generator", "beta", "delta_mw"), beta_rows),
        }

    def write(self, outdir):
        return write_tables(self.tables(), outdir)


def _range_summary(sol, rowmap, pv_bus, gross_loads, pv_mw, pv_capacity):
    out = {}
    if pv_bus is not None:
        r = pv_range(sol, rowmap, pv_bus, pv_mw=pv_mw, pv_capacity=pv_capacity)
        out.update(pv_delta_min=r.pv_delta_min, pv_delta_max=r.pv_delta_max)
    t = itr(sol, rowmap, gross_loads)
    out.update(itr_total_dec=t.total_dec, itr_total_inc=t.total_inc)
    return out


def run_events(cfg, events, schedule=None, options=None):
    """Apply events hour by hour on the retained bases of ``schedule``."""
    if schedule is None:
        schedule = run_schedule(cfg, analyse=False)
    case = schedule.case
    options = options or cfg.simplex_options()
    by_hour = {}
    for ev in events:
        validate_event(ev, case, len(schedule.hours))
        by_hour.setdefault(ev.hour, []).append(ev)

    outcomes = []
    index = 0
    for hour in sorted(by_hour):
        hr = schedule.hour(hour)
        sol, rowmap = hr.solution, hr.rowmap
        gross = hr.instance.bus_loads.copy()
        pv_mw = hr.instance.pv_mw
        for ev in by_hour[hour]:
            index += 1
            delta = ev.net_load_delta(case)
            before = _range_summary(sol, rowmap, cfg.pv_bus, gross, pv_mw, cfg.pv_capacity)
            new_gross = gross + (delta if ev.kind == "load_delta" else 0.0)
            new_pv = pv_mw + (ev.mw if ev.kind == "pv_delta" and ev.target == cfg.pv_bus else 0.0)
            common = dict(index=index, event=ev, delta_net_load=delta, objective_before=sol.objective,
                          range_before=before)
            try:
                pf = participation_factors(sol, rowmap, delta, loads=gross)
                new_sol = update_loads(sol, rowmap, delta)
            except (OutOfRangeError, BasisInvalidError) as exc:
                new_sol = solve(sol.lp.with_rhs(sol.lp.b + rowmap.balance_rhs(delta)), options)
                if new_sol.status is not LpStatus.OPTIMAL:
                    log.warning("event %d (hour %d): re-solve is %s; event rejected",
                                index, hour, new_sol.status.value)
                    outcomes.append(EventOutcome(**common, path="re-optimized", status=new_sol.status.value,
                                                 objective_after=sol.objective, range_after=before,
                                                 solution=sol, reason=str(exc)))
                    continue
                log.info("event %d (hour %d): re-optimized (%s)", index, hour, exc)
                sol, gross, pv_mw = new_sol, new_gross, new_pv
                outcomes.append(EventOutcome(
                    **common, path="re-optimized", status="optimal", objective_after=sol.objective,
                    range_after=_range_summary(sol, rowmap, cfg.pv_bus, gross, pv_mw, cfg.pv_capacity),
                    solution=sol, reason=str(exc)))
                continue
            sol, gross, pv_mw = new_sol, new_gross, new_pv
            log.info("event %d (hour %d): absorbed, beta=%s, delta_gen=%s MW", index, hour,
                     np.round(pf.beta, 6).tolist(), np.round(pf.delta_gen, 6).tolist())
            outcomes.append(EventOutcome(
                **common, path="updated", status="optimal", beta=pf.beta, delta_gen=pf.delta_gen,
                objective_after=sol.objective,
                range_after=_range_summary(sol, rowmap, cfg.pv_bus, gross, pv_mw, cfg.pv_capacity),
                solution=sol))
    return EventReport(outcomes=tuple(outcomes), case=case)


# -- timing ----------------------------------------------------------------

@dataclass(frozen=True)
class TimingReport:
    hour: int
    repeat: int
    backend: str
    median_s: dict  # category -> seconds, exactly BENCH_CATEGORIES
    cold_solve_s: float

    @property
    def update_path_s(self):
        return self.median_s["range_update"]

    @property
    def speedup(self):
        return self.cold_solve_s / self.update_path_s

    def to_dict(self):
        return {
            "hour": self.hour, "repeat": self.repeat, "backend": self.backend,
            "median_ms": {k: 1e3 * v for k, v in self.median_s.items()},
            "cold_solve_ms": 1e3 * self.cold_solve_s, "speedup_vs_cold_solve": self.speedup,
        }


def _median_time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def bench(cfg, repeat=100, hour=None, case=None, profile=None):
    """Median wall time of the post-optimal operations on one hour.

    ``range_update`` is one full update step: absorb a load change and
    recompute the PV range and tolerance ranges on the result. The cold
    solve baseline times :func:`~daopf.lp_core.solve` on the same LP.
    """
    if repeat < 1:
        raise ValidationError("repeat must be >= 1", "repeat")
    if case is None or profile is None:
        case, profile = load_inputs(cfg)
    if hour is None:
        hour = int(np.argmax(profile.pv_output)) + 1 if np.any(profile.pv_output > 0) else 1
    schedule = run_schedule(cfg, case, profile, analyse=False)
    hr = schedule.hour(hour)
    sol, rowmap, loads = hr.solution, hr.rowmap, hr.instance.bus_loads
    pv_bus = cfg.pv_bus if cfg.pv_bus is not None else case.buses[0].id
    pv_mw = hr.instance.pv_mw
    options = cfg.simplex_options()

    ranges = itr(sol, rowmap, loads)
    delta = 0.5 * ranges.dec
    if not delta.any():
        delta = 0.5 * ranges.inc

    def range_update():
        new = update_loads(sol, rowmap, delta)
        pv_range(new, rowmap, pv_bus, pv_mw=pv_mw)
        itr(new, rowmap, loads + delta)

    timed = {
        "sa": lambda: pv_range(sol, rowmap, pv_bus, pv_mw=pv_mw),
        "itr": lambda: itr(sol, rowmap, loads),
        "beta": lambda: participation_factors(sol, rowmap, delta, loads=loads),
        "range_update": range_update,
    }
    medians = {k: _median_time(timed[k], repeat) for k in BENCH_CATEGORIES}
    cold = _median_time(lambda: solve(sol.lp, options), max(5, repeat // 10))
    return TimingReport(hour=hour, repeat=repeat, backend=kernels.BACKEND, median_s=medians, cold_solve_s=cold)
