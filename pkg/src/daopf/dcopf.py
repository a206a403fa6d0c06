"""Map one hour of the ramp-constrained DC-OPF into an equality-form LP.

Column order is ``[P_g (ng) | theta (nbus) | slacks]``; the generator
columns come first so the basic generator values can be read straight off
``x``. Rows are grouped as::

    gen_upper   P_g + s            =  hi        (ramp-folded upper bound)
    gen_lower  -P_g + s            = -lo
    line_fwd    F_l(theta) + s     =  cap_l
    line_rev    F_l(theta) - s     = -cap_l
    bus_balance sum P_g - flows    =  P_load - P_pv

with ``F_l = base/x_l * (theta_from - theta_to)`` in MW.

Angles enter as ``theta' = theta + ANGLE_SHIFT >= 0`` so the sign bound
never binds for realistic spreads. The reference bus angle is pinned at
zero (its column is kept but fixed, and dropped by the solver's presolve);
the shift constant of its neighbours moves to the RHS, recorded in
``RowMap.rhs_offset``. Without the pin the angle level is free and the LP
parks the lowest-angle bus on ``theta' = 0``, which then shows up as a
spurious blocking row in every range computation.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleBoundsError
from .lp_core import StandardLp

log = logging.getLogger(__name__)

ROW_KINDS = ("gen_upper", "gen_lower", "line_fwd", "line_rev", "bus_balance")
ANGLE_SHIFT = math.pi


@dataclass(frozen=True, eq=False)
class HourlyDcopfInstance:
    case: object
    hour: int
    bus_loads: np.ndarray
    pv_bus: int = None
    pv_mw: float = 0.0
    prev_gen: np.ndarray = None

    def __post_init__(self):
        loads = np.array(self.bus_loads, dtype=float)
        if loads.shape != (self.case.nbus,):
            raise ValueError(f"bus_loads has shape {loads.shape}, expected ({self.case.nbus},)")
        object.__setattr__(self, "bus_loads", loads)
        if self.prev_gen is not None:
            object.__setattr__(self, "prev_gen", np.array(self.prev_gen, dtype=float))

    @property
    def bounds(self):
        gens = self.case.generators
        lo = np.array([g.p_min for g in gens], dtype=float)
        hi = np.array([g.p_max for g in gens], dtype=float)
        if self.prev_gen is not None:
            lo = np.maximum(lo, self.prev_gen - np.array([g.ramp_down for g in gens]))
            hi = np.minimum(hi, self.prev_gen + np.array([g.ramp_up for g in gens]))
        return lo, hi

    @property
    def net_loads(self):
        net = self.bus_loads.copy()
        if self.pv_bus is not None:
            net[self.case.bus_index[self.pv_bus]] -= self.pv_mw
        return net


@dataclass(frozen=True, eq=False)
class RowMap:
    case: object
    kinds: tuple
    owners: tuple
    ng: int
    nbus: int
    nline: int
    ref_bus: int
    rhs_offset: np.ndarray = None

    def rows_of(self, kind):
        start = {"gen_upper": 0, "gen_lower": self.ng, "line_fwd": 2 * self.ng,
                 "line_rev": 2 * self.ng + self.nline, "bus_balance": 2 * self.ng + 2 * self.nline}[kind]
        size = {"gen_upper": self.ng, "gen_lower": self.ng, "line_fwd": self.nline,
                "line_rev": self.nline, "bus_balance": self.nbus}[kind]
        return np.arange(start, start + size)

    @property
    def balance_rows(self):
        return self.rows_of("bus_balance")

    def balance_row(self, bus_id):
        return int(self.balance_rows[self.case.bus_index[bus_id]])

    @property
    def gen_cols(self):
        return np.arange(self.ng)

    @property
    def angle_cols(self):
        return np.arange(self.ng, self.ng + self.nbus)

    @property
    def m(self):
        return len(self.kinds)

    @property
    def ref_col(self):
        return self.ng + self.case.bus_index[self.ref_bus]

    def bus_net_loads(self, b):
        """Per-bus net loads carried by an RHS vector of this layout."""
        rows = self.balance_rows
        return np.asarray(b, dtype=float)[rows] - self.rhs_offset[rows]

    def balance_rhs(self, bus_delta):
        """Embed a per-bus vector (bus order) into an RHS-sized vector."""
        out = np.zeros(self.m)
        out[self.balance_rows] = bus_delta
        return out


@dataclass(frozen=True)
class Dispatch:
    gen_mw: np.ndarray
    angles: np.ndarray
    flows: np.ndarray

    @property
    def total_generation(self):
        return float(self.gen_mw.sum())


def _incidence(case):
    idx = case.bus_index
    K = np.zeros((len(case.branches), case.nbus))
    for l, br in enumerate(case.branches):
        K[l, idx[br.from_bus]] = 1.0
        K[l, idx[br.to_bus]] = -1.0
    y = np.array([case.base_mva / br.reactance for br in case.branches])
    return K, y


def build(case, instance, ref_bus=None):
    """Return ``(StandardLp, RowMap)`` for one hour.

    ``ref_bus`` defaults to the first bus of the case.
    """
    lo, hi = instance.bounds
    bad = np.flatnonzero(lo > hi)
    if bad.size:
        k = bad[0]
        raise InfeasibleBoundsError(
            f"hour {instance.hour}: generator {case.generators[k].id} bounds collapse "
            f"(lo={lo[k]:.6g} > hi={hi[k]:.6g})", f"generators[{k}]"
        )
    ng, nb, nl = len(case.generators), case.nbus, len(case.branches)
    idx = case.bus_index
    K, y = _incidence(case)
    flow = y[:, None] * K  # line flow per unit angle, MW/rad
    cap = np.array([br.capacity for br in case.branches], dtype=float)

    m = 2 * ng + 2 * nl + nb
    ns = 2 * ng + 2 * nl
    n = ng + nb + ns
    A = np.zeros((m, n))
    th = slice(ng, ng + nb)
    gu, gl = np.arange(ng), np.arange(ng, 2 * ng)
    lf, lr = np.arange(2 * ng, 2 * ng + nl), np.arange(2 * ng + nl, 2 * ng + 2 * nl)
    bal = np.arange(2 * ng + 2 * nl, m)

    A[gu, np.arange(ng)] = 1.0
    A[gl, np.arange(ng)] = -1.0
    A[lf, th] = flow
    A[lr, th] = flow
    slack_sign = np.concatenate([np.ones(2 * ng + nl), -np.ones(nl)])
    A[np.arange(ns), ng + nb + np.arange(ns)] = slack_sign
    for k, g in enumerate(case.generators):
        A[bal[idx[g.bus]], k] = 1.0
    A[bal, th] = -K.T @ flow

    ref_bus = case.buses[0].id if ref_bus is None else ref_bus
    ref_col = ng + idx[ref_bus]
    # A theta = A (theta' - shift) on the non-reference columns; theta rows sum to zero
    offset = -ANGLE_SHIFT * A[:, ref_col]
    b = np.concatenate([hi, -lo, cap, -cap, instance.net_loads]) + offset
    c = np.zeros(n)
    c[:ng] = [g.cost for g in case.generators]

    labels = (
        [f"pg[{g.id}]" for g in case.generators]
        + [f"theta[{bus.id}]" for bus in case.buses]
        + [f"s_gen_upper[{g.id}]" for g in case.generators]
        + [f"s_gen_lower[{g.id}]" for g in case.generators]
        + [f"s_line_fwd[{br.id}]" for br in case.branches]
        + [f"s_line_rev[{br.id}]" for br in case.branches]
    )
    kinds = ("gen_upper",) * ng + ("gen_lower",) * ng + ("line_fwd",) * nl + ("line_rev",) * nl + ("bus_balance",) * nb
    owners = (
        tuple(g.id for g in case.generators) * 2
        + tuple(br.id for br in case.branches) * 2
        + tuple(bus.id for bus in case.buses)
    )
    offset.setflags(write=False)
    rowmap = RowMap(case=case, kinds=kinds, owners=owners, ng=ng, nbus=nb, nline=nl,
                    ref_bus=ref_bus, rhs_offset=offset)
    return StandardLp(c=c, A=A, b=b, column_labels=tuple(labels), fixed=(ref_col,)), rowmap


def extract_dispatch(sol, rowmap, zero_tol=1e-9):
    """Generator MW, reference-bus angles (rad) and branch flows (MW)."""
    assert sol.optimal, "dispatch requested from a non-optimal solution"
    case = rowmap.case
    ng, nb = rowmap.ng, rowmap.nbus
    theta = sol.x[ng:ng + nb]
    ref = case.bus_index[rowmap.ref_bus]
    at_zero = [i for i in np.flatnonzero(theta <= zero_tol) if i != ref]
    if at_zero:
        log.warning("angle shift bound binds at bus(es) %s; ranges there reflect the shift, not the network",
                    [case.buses[i].id for i in at_zero])
    angles = theta - ANGLE_SHIFT
    angles[ref] = 0.0
    K, y = _incidence(case)
    flows = y * (K @ angles)
    return Dispatch(gen_mw=sol.x[:ng].copy(), angles=angles, flows=flows)
