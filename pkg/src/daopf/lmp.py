"""Locational marginal prices from the retained basis.

The balance-row duals are the LMPs directly. They are also rebuilt as an
energy price (the reference-bus dual) plus congestion terms
``GSF^T mu``, where ``mu_l`` is the sum of the two line-limit row duals.
The two routes must agree; the mismatch is kept on the report.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .dcopf import _incidence
from .errors import SingularNetworkError

log = logging.getLogger(__name__)

CROSS_CHECK_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class LmpReport:
    energy: float  # lambda, currency/MWh
    mu: np.ndarray  # per line
    gsf: np.ndarray  # line x bus
    lmp: np.ndarray  # per bus, composed from energy + congestion
    balance_duals: np.ndarray

    @property
    def congestion(self):
        return self.gsf.T @ self.mu

    @property
    def max_mismatch(self):
        return float(np.abs(self.lmp - self.balance_duals).max())


def gsf_matrix(case, ref_bus):
    """DC shift factors: MW on each line per MW injected at a bus and withdrawn at ``ref_bus``."""
    idx = case.bus_index
    if ref_bus not in idx:
        raise KeyError(f"reference bus {ref_bus} not in case")
    K, y = _incidence(case)
    Bbus = K.T @ (y[:, None] * K)
    keep = np.array([i for i in range(case.nbus) if i != idx[ref_bus]], dtype=int)
    Bred = Bbus[np.ix_(keep, keep)]
    try:
        X = np.linalg.inv(Bred)
    except np.linalg.LinAlgError:
        raise SingularNetworkError("reduced susceptance matrix is singular; network is not connected") from None
    if np.linalg.cond(Bred) > 1e14:
        raise SingularNetworkError("reduced susceptance matrix is numerically singular")
    gsf = np.zeros((len(case.branches), case.nbus))
    gsf[:, keep] = (y[:, None] * K[:, keep]) @ X
    return gsf


def lmp_report(sol, rowmap, case=None, gsf=None):
    """Split the optimal duals into energy and congestion components."""
    case = rowmap.case if case is None else case
    if gsf is None:
        gsf = gsf_matrix(case, rowmap.ref_bus)
    duals = sol.duals
    bal = np.asarray(duals[rowmap.balance_rows])
    mu = np.asarray(duals[rowmap.rows_of("line_fwd")] + duals[rowmap.rows_of("line_rev")])
    energy = float(bal[case.bus_index[rowmap.ref_bus]])
    lmp = energy + gsf.T @ mu
    report = LmpReport(energy=energy, mu=mu, gsf=gsf, lmp=lmp, balance_duals=bal)
    if report.max_mismatch > CROSS_CHECK_TOL:
        log.warning("LMP decomposition disagrees with balance duals by %.3g", report.max_mismatch)
    return report
