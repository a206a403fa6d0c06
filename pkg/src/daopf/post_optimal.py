"""Uncertainty handling from a retained optimal basis, without re-optimisation.

Everything here reads ``B^-1`` and the basic values of an optimal
:class:`~daopf.lp_core.LpSolution`:

* :func:`sa_range` -- admissible change of one RHS entry (PV at a bus is a
  negative load on that bus's balance row, so its range is the sign-flipped
  balance-row range);
* :func:`itr` -- individual tolerance ranges for simultaneous, independent
  load changes at all buses;
* :func:`participation_factors` -- generator shares of a load/PV change;
* :func:`apply_update` -- move the basic solution to a new RHS while keeping
  basis, inverse and duals; ranges recomputed on the result are the
  successive range updates.
"""
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import BasisInvalidError, DimensionError, OutOfRangeError, ZeroTotalDelta

FEAS_TOL = 1e-9
# entries of B^-1 below this are treated as structural zeros
ALPHA_TOL = 1e-10
INF = float("inf")


@dataclass(frozen=True)
class SensitivityRange:
    row: int
    delta_min: float
    delta_max: float
    # PV view of a balance row (None for other rows)
    pv_mw: float = None
    pv_capacity: float = None

    @property
    def pv_delta_min(self):
        return -self.delta_max

    @property
    def pv_delta_max(self):
        return -self.delta_min

    @property
    def unbounded(self):
        return (np.isinf(self.delta_min), np.isinf(self.delta_max))

    @property
    def pv_window(self):
        """Admissible absolute PV output (MW), unclipped; may be infinite."""
        return self.pv_mw + self.pv_delta_min, self.pv_mw + self.pv_delta_max

    @property
    def pv_min(self):
        lo = self.pv_window[0]
        return max(0.0, lo)

    @property
    def pv_max(self):
        hi = self.pv_window[1]
        if self.pv_capacity is not None:
            return min(self.pv_capacity, hi)
        return hi

    def contains(self, delta):
        return self.delta_min <= delta <= self.delta_max


@dataclass(frozen=True, eq=False)
class ToleranceRanges:
    loads: np.ndarray
    dec: np.ndarray  # <= 0, capped at -|P_l| when unblocked
    inc: np.ndarray  # >= 0, capped at +|P_l| when unblocked
    dec_unbounded: np.ndarray
    inc_unbounded: np.ndarray
    fractions: np.ndarray  # per basic row

    def contains(self, delta_loads, tol=1e-12):
        d = np.asarray(delta_loads, dtype=float)
        return bool(np.all(d >= self.dec - tol) and np.all(d <= self.inc + tol))

    @property
    def total_dec(self):
        return float(self.dec.sum())

    @property
    def total_inc(self):
        return float(self.inc.sum())


@dataclass(frozen=True, eq=False)
class ParticipationFactors:
    beta: np.ndarray
    delta_gen: np.ndarray
    total_delta_load: float


def _require_optimal(sol):
    if not sol.optimal:
        raise ValueError(f"post-optimal analysis needs an optimal solution, got {sol.status.value}")


def sa_range(sol, row, *, pv_mw=None, pv_capacity=None):
    """Range of ``delta`` with ``B^-1 (b + delta e_row) >= 0``.

    Pass ``pv_mw`` for a balance row hosting PV to get the PV view
    (``pv_delta_min/max`` and the absolute window).
    """
    _require_optimal(sol)
    m = sol.basis_inverse.shape[0]
    if not 0 <= row < m:
        raise DimensionError(f"row {row} outside 0..{m - 1}")
    alpha = sol.basis_inverse[:, row]
    dmin, dmax = kernels.sa_bounds(sol.x_basic, alpha, ALPHA_TOL)
    return SensitivityRange(row=int(row), delta_min=dmin, delta_max=dmax,
                            pv_mw=None if pv_mw is None else float(pv_mw), pv_capacity=pv_capacity)


def pv_range(sol, rowmap, bus_id, pv_mw=0.0, pv_capacity=None):
    """SA range for a PV injection at ``bus_id`` (negative load on its balance row)."""
    return sa_range(sol, rowmap.balance_row(bus_id), pv_mw=pv_mw, pv_capacity=pv_capacity)


def r_matrix(sol, rowmap):
    """Columns of ``B^-1`` at the bus balance rows, shape (m, nbus)."""
    return np.ascontiguousarray(sol.basis_inverse[:, rowmap.balance_rows])


def itr(sol, rowmap, loads):
    """Individual tolerance ranges for simultaneous per-bus load changes.

    A row's fraction is ``x_i / sum_k |R_ik P_k|`` (zero on primal-degenerate
    rows); bus ``j`` may rise by ``|P_j| * min{fraction_i : R_ij < 0}`` and
    fall by ``|P_j| * min{fraction_i : R_ij > 0}``.
    """
    _require_optimal(sol)
    loads = np.asarray(loads, dtype=float)
    if loads.shape != (rowmap.nbus,):
        raise DimensionError(f"loads has shape {loads.shape}, expected ({rowmap.nbus},)")
    R = r_matrix(sol, rowmap)
    fractions = kernels.itr_fractions(R, sol.x_basic, loads, ALPHA_TOL, FEAS_TOL)
    dec, inc = kernels.itr_bounds(R, fractions, loads, ALPHA_TOL)
    scale = np.abs(loads)
    dec_unb, inc_unb = np.isinf(dec), np.isinf(inc)
    dec = np.where(dec_unb, -scale, dec)
    inc = np.where(inc_unb, scale, inc)
    return ToleranceRanges(loads=loads, dec=dec, inc=inc, dec_unbounded=dec_unb,
                           inc_unbounded=inc_unb, fractions=fractions)


def basis_feasible(sol, b_new, tol=FEAS_TOL):
    return bool(np.all(sol.basis_inverse @ b_new >= -tol))


def _check_in_range(sol, rowmap, delta_loads, loads):
    support = np.flatnonzero(delta_loads)
    if support.size == 1:
        j = support[0]
        rng = sa_range(sol, int(rowmap.balance_rows[j]))
        if not rng.contains(delta_loads[j]):
            raise OutOfRangeError(
                f"bus {rowmap.case.buses[j].id}: change {delta_loads[j]:.6g} MW outside "
                f"[{rng.delta_min:.6g}, {rng.delta_max:.6g}]"
            )
        return
    ranges = itr(sol, rowmap, loads if loads is not None else rowmap_loads(sol, rowmap))
    if not ranges.contains(delta_loads):
        worst = int(np.argmax(np.maximum(delta_loads - ranges.inc, ranges.dec - delta_loads)))
        raise OutOfRangeError(
            f"load change at bus {rowmap.case.buses[worst].id} ({delta_loads[worst]:.6g} MW) is outside "
            f"its tolerance range [{ranges.dec[worst]:.6g}, {ranges.inc[worst]:.6g}]"
        )


def rowmap_loads(sol, rowmap):
    """Net bus loads currently on the balance rows of ``sol``."""
    return rowmap.bus_net_loads(sol.lp.b)


def participation_factors(sol, rowmap, delta_loads, loads=None):
    """Generator shares of a net-load change (PV changes enter with flipped sign).

    Single-bus changes are checked against that bus's SA range, multi-bus
    changes against the tolerance ranges built on ``loads``.
    """
    _require_optimal(sol)
    delta_loads = np.asarray(delta_loads, dtype=float)
    if delta_loads.shape != (rowmap.nbus,):
        raise DimensionError(f"delta_loads has shape {delta_loads.shape}, expected ({rowmap.nbus},)")
    total = float(delta_loads.sum())
    if total == 0.0:
        raise ZeroTotalDelta("total load change is zero; participation factors are undefined")
    _check_in_range(sol, rowmap, delta_loads, loads)
    dxb = r_matrix(sol, rowmap) @ delta_loads
    delta_gen = np.zeros(rowmap.ng)
    pos = {int(j): i for i, j in enumerate(sol.basis)}
    for k in range(rowmap.ng):
        if k in pos:
            delta_gen[k] = dxb[pos[k]]
    return ParticipationFactors(beta=delta_gen / total, delta_gen=delta_gen, total_delta_load=total)


def apply_update(sol, delta_b):
    """Absorb an RHS change with the retained basis.

    Returns a new solution with refreshed ``x`` and objective; ``basis``,
    ``basis_inverse`` and ``duals`` are the very same arrays.
    """
    _require_optimal(sol)
    delta_b = np.asarray(delta_b, dtype=float)
    if delta_b.shape != sol.lp.b.shape:
        raise DimensionError(f"delta_b has shape {delta_b.shape}, expected {sol.lp.b.shape}")
    b_new = sol.lp.b + delta_b
    xb = sol.basis_inverse @ b_new
    if np.any(xb < -FEAS_TOL):
        i = int(np.argmin(xb))
        raise BasisInvalidError(
            f"basic variable {sol.lp.column_labels[sol.basis[i]]} would become {xb[i]:.6g}; re-optimise"
        )
    x = np.zeros_like(sol.x)
    x[sol.basis] = xb
    x.setflags(write=False)
    lp = sol.lp.with_rhs(b_new)
    return replace(sol, lp=lp, x=x, objective=float(sol.lp.c[sol.basis] @ xb))


def update_loads(sol, rowmap, delta_net_loads):
    """:func:`apply_update` for a per-bus net-load change."""
    return apply_update(sol, rowmap.balance_rhs(np.asarray(delta_net_loads, dtype=float)))


def pv_delta_vector(rowmap, bus_id, delta_pv):
    """Per-bus net-load change caused by a PV change at ``bus_id``."""
    d = np.zeros(rowmap.nbus)
    d[rowmap.case.bus_index[bus_id]] = -delta_pv
    return d
