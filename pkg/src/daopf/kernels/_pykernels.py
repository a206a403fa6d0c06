"""Pure numpy implementations of the inner-loop kernels.

These are the reference versions; ``_ckernels.pyx`` must agree with them
to rounding.
"""
import numpy as np

INF = float("inf")


def eta_update(binv, d, r):
    """Pivot the explicit basis inverse on row ``r`` in place.

    ``d`` is the entering column expressed in the current basis (B^-1 a_q).
    """
    pivot_row = binv[r] / d[r]
    binv -= np.outer(d, pivot_row)
    binv[r] = pivot_row


def ratio_test(x, d, basis, pivot_tol, tie_tol):
    """Harris-free textbook ratio test.

    Returns ``(row, step)``; ``row == -1`` when no entry of ``d`` exceeds
    ``pivot_tol`` (the entering column is an unbounded ray). Ratios within
    ``tie_tol`` of the minimum are ties, resolved by the lowest basic
    column index.
    """
    mask = d > pivot_tol
    if not mask.any():
        return -1, INF
    rows = np.flatnonzero(mask)
    ratios = np.maximum(x[rows], 0.0) / d[rows]
    theta = ratios.min()
    tied = rows[ratios <= theta + tie_tol * (1.0 + theta)]
    r = int(tied[np.argmin(basis[tied])])
    return r, max(x[r], 0.0) / d[r]


def sa_bounds(x, alpha, tol):
    """Admissible (delta_min, delta_max) for x + delta * alpha >= 0."""
    xc = np.maximum(x, 0.0)
    neg = alpha < -tol
    pos = alpha > tol
    dmax = (-xc[neg] / alpha[neg]).min() if neg.any() else INF
    dmin = (-xc[pos] / alpha[pos]).max() if pos.any() else -INF
    return float(dmin), float(dmax)


def itr_fractions(R, x, loads, alpha_tol, feas_tol):
    """Per-row tolerance fraction x_i / sum_k |R_ik * P_k|."""
    Rc = np.where(np.abs(R) > alpha_tol, R, 0.0)
    denom = np.abs(Rc * loads[None, :]).sum(axis=1)
    out = np.full(x.shape[0], INF)
    active = denom > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out[active] = np.where(x[active] <= feas_tol, 0.0, x[active] / denom[active])
    return out


def itr_bounds(R, delta, loads, alpha_tol):
    """Per-bus (dec, inc) load changes from row fractions; +-inf when unblocked."""
    d = delta[:, None]
    up = np.where(R < -alpha_tol, d, INF).min(axis=0)
    down = np.where(R > alpha_tol, d, INF).min(axis=0)
    scale = np.abs(loads)
    zero = scale == 0.0
    with np.errstate(invalid="ignore"):
        inc = np.where(zero, 0.0, scale * up)
        dec = np.where(zero, 0.0, -scale * down)
    return dec, inc
