"""Two-phase revised simplex for ``min c'x  s.t.  Ax = b, x >= 0``.

The solver keeps an explicit basis inverse (product-form eta updates with
periodic re-inversion) because the post-optimal routines consume its
columns directly. Pricing is Dantzig's rule; after ``3m`` consecutive
degenerate pivots it falls back to Bland's rule until the objective moves
again. Ratio-test ties go to the lowest column index so that the final
basis is reproducible.
"""
import enum
import logging
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import DimensionError, NumericalError

log = logging.getLogger(__name__)


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class StandardLp:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    column_labels: tuple = None
    fixed: tuple = ()  # columns held at zero; dropped by presolve

    def __post_init__(self):
        A = self.A
        if hasattr(A, "toarray"):
            A = A.toarray()
        A = np.array(A, dtype=float)
        c = np.array(self.c, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        if A.ndim != 2:
            raise DimensionError("A must be a matrix")
        m, n = A.shape
        if c.shape != (n,) or b.shape != (m,):
            raise DimensionError(f"shape mismatch: A {A.shape}, c {c.shape}, b {b.shape}")
        if m > n:
            raise DimensionError(f"more rows than columns ({m} > {n})")
        zero_rows = np.flatnonzero(~A.any(axis=1))
        if zero_rows.size:
            raise DimensionError(f"constraint row {zero_rows[0]} is all zero")
        labels = self.column_labels
        if labels is None:
            labels = tuple(f"x{j}" for j in range(n))
        elif len(labels) != n:
            raise DimensionError(f"{len(labels)} column labels for {n} columns")
        for arr in (A, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "column_labels", tuple(labels))
        fixed = tuple(sorted({int(j) for j in self.fixed}))
        if fixed and not 0 <= fixed[0] <= fixed[-1] < n:
            raise DimensionError("fixed column index out of range")
        object.__setattr__(self, "fixed", fixed)

    @property
    def shape(self):
        return self.A.shape

    def with_rhs(self, b):
        b = np.asarray(b, dtype=float)
        if b.shape != self.b.shape:
            raise DimensionError(f"rhs has shape {b.shape}, expected {self.b.shape}")
        return replace(self, b=b)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    lp: StandardLp
    x: np.ndarray = None
    basis: np.ndarray = None
    basis_inverse: np.ndarray = None
    duals: np.ndarray = None
    objective: float = float("nan")
    iterations: int = 0
    phase1_objective: float = 0.0
    ray: np.ndarray = None

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL

    @property
    def x_basic(self):
        return self.x[self.basis]

    def basis_set(self):
        return frozenset(int(j) for j in self.basis)


@dataclass
class SimplexOptions:
    feas_tol: float = 1e-9
    opt_tol: float = 1e-8
    pivot_tol: float = 1e-9
    tie_tol: float = 1e-12
    reinvert_every: int = 50
    max_condition: float = 1e12
    max_iter: int = None
    bland_after: int = None  # degenerate pivots before Bland's rule; default 3m
    final_reinvert: bool = True


@dataclass
class _State:
    A: np.ndarray  # working matrix, sign-normalised rows, artificials appended
    b: np.ndarray
    basis: np.ndarray
    binv: np.ndarray
    xb: np.ndarray
    n_real: int
    pivots: int = 0
    since_reinvert: int = 0
    degenerate_run: int = 0


def condition_estimate(B, binv):
    return np.linalg.norm(B, 1) * np.linalg.norm(binv, 1)


class RevisedSimplex:
    def __init__(self, options=None, **overrides):
        self.options = replace(options or SimplexOptions(), **overrides)

    # -- linear algebra --------------------------------------------------

    def _reinvert(self, st):
        B = st.A[:, st.basis]
        try:
            binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise NumericalError("basis matrix is singular") from None
        cond = condition_estimate(B, binv)
        if not np.isfinite(cond) or cond > self.options.max_condition:
            raise NumericalError(f"basis condition estimate {cond:.3g} exceeds {self.options.max_condition:.0e}")
        st.binv = np.ascontiguousarray(binv)
        st.xb = st.binv @ st.b
        st.since_reinvert = 0

    def _pivot(self, st, q, r, d):
        step = max(st.xb[r], 0.0) / d[r]
        st.xb -= step * d
        st.xb[r] = step
        st.basis[r] = q
        kernels.eta_update(st.binv, d, r)
        st.pivots += 1
        st.since_reinvert += 1
        if st.since_reinvert >= self.options.reinvert_every:
            self._reinvert(st)
        return step

    # -- phases ----------------------------------------------------------

    def _iterate(self, st, cost, allowed, max_iter):
        """Run simplex pivots with ``cost`` over columns flagged in ``allowed``.

        Returns ``None`` at optimality or the entering column index when the
        problem is unbounded along it.
        """
        opt = self.options
        m = st.A.shape[0]
        bland_after = opt.bland_after if opt.bland_after is not None else 3 * m
        while True:
            if st.pivots >= max_iter:
                raise NumericalError(f"iteration limit {max_iter} reached")
            pi = cost[st.basis] @ st.binv
            reduced = cost - pi @ st.A
            reduced[~allowed] = 0.0
            reduced[st.basis] = 0.0
            candidates = np.flatnonzero(reduced < -opt.opt_tol)
            if candidates.size == 0:
                return None
            if st.degenerate_run >= bland_after:
                q = int(candidates[0])
            else:
                q = int(candidates[np.argmin(reduced[candidates])])
            d = st.binv @ st.A[:, q]
            r, step = kernels.ratio_test(st.xb, d, st.basis, opt.pivot_tol, opt.tie_tol)
            if r < 0:
                return q
            step = self._pivot(st, q, r, d)
            if step <= opt.feas_tol:
                st.degenerate_run += 1
            else:
                st.degenerate_run = 0

    def _drive_out_artificials(self, st):
        n = st.n_real
        for r in range(len(st.basis)):
            if st.basis[r] < n:
                continue
            row = st.binv[r] @ st.A[:, :n]
            row[st.basis[st.basis < n]] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) <= 1e-9:
                raise NumericalError(f"constraint matrix is rank deficient (row {r} is redundant)")
            d = st.binv @ st.A[:, j]
            st.xb[r] = 0.0
            self._pivot(st, j, r, d)

    # -- driver ----------------------------------------------------------

    def _initial_state(self, lp):
        A0, b0 = lp.A, lp.b
        m, n = A0.shape
        sign = np.where(b0 < 0, -1.0, 1.0)
        A1 = A0 * sign[:, None]
        b1 = b0 * sign
        nnz = (A1 != 0).sum(axis=0)
        basis = np.full(m, -1, dtype=np.int_)
        diag = np.ones(m)
        for j in np.flatnonzero(nnz == 1):
            i = int(np.flatnonzero(A1[:, j])[0])
            if basis[i] < 0 and A1[i, j] > 0:
                basis[i] = j
                diag[i] = A1[i, j]
        art_rows = np.flatnonzero(basis < 0)
        n_art = art_rows.size
        art = np.zeros((m, n_art))
        art[art_rows, np.arange(n_art)] = 1.0
        basis[art_rows] = n + np.arange(n_art)
        A_ext = np.ascontiguousarray(np.hstack([A1, art]))
        binv = np.diag(1.0 / diag)
        st = _State(A=A_ext, b=b1, basis=basis, binv=binv, xb=binv @ b1, n_real=n)
        return st, sign

    def solve(self, lp):
        if not lp.fixed:
            return self._solve(lp)
        n = lp.shape[1]
        keep = np.setdiff1d(np.arange(n), lp.fixed)
        reduced = StandardLp(c=lp.c[keep], A=lp.A[:, keep], b=lp.b,
                             column_labels=tuple(lp.column_labels[j] for j in keep))
        sol = self._solve(reduced)
        expanded = {"lp": lp}
        if sol.x is not None:
            x = np.zeros(n)
            x[keep] = sol.x
            basis = keep[sol.basis]
            for arr in (x, basis):
                arr.setflags(write=False)
            expanded.update(x=x, basis=basis)
        if sol.ray is not None:
            ray = np.zeros(n)
            ray[keep] = sol.ray
            expanded["ray"] = ray
        return replace(sol, **expanded)

    def _solve(self, lp):
        opt = self.options
        m, n = lp.shape
        max_iter = opt.max_iter if opt.max_iter is not None else 50 * (m + n)
        st, sign = self._initial_state(lp)
        n_total = st.A.shape[1]

        phase1_obj = 0.0
        if n_total > n:
            cost1 = np.zeros(n_total)
            cost1[n:] = 1.0
            allowed = np.ones(n_total, dtype=bool)
            self._iterate(st, cost1, allowed, max_iter)
            self._reinvert(st)
            phase1_obj = float(cost1[st.basis] @ st.xb)
            tol = opt.feas_tol * max(1.0, float(np.abs(lp.b).max()))
            if phase1_obj > tol:
                log.debug("phase 1 residual %.3g > %.3g: infeasible", phase1_obj, tol)
                return LpSolution(LpStatus.INFEASIBLE, lp, iterations=st.pivots, phase1_objective=phase1_obj)
            self._drive_out_artificials(st)
            st.degenerate_run = 0

        cost2 = np.zeros(n_total)
        cost2[:n] = lp.c
        allowed = np.zeros(n_total, dtype=bool)
        allowed[:n] = True
        st.A = np.ascontiguousarray(st.A[:, :n])
        cost2 = cost2[:n]
        allowed = allowed[:n]
        entering = self._iterate(st, cost2, allowed, max_iter)
        if entering is not None:
            d = st.binv @ st.A[:, entering]
            ray = np.zeros(n)
            ray[entering] = 1.0
            ray[st.basis] = -d
            return LpSolution(LpStatus.UNBOUNDED, lp, iterations=st.pivots,
                              phase1_objective=phase1_obj, ray=ray)

        basis = st.basis.copy()
        if opt.final_reinvert:
            B = lp.A[:, basis]
            try:
                binv = np.linalg.inv(B)
            except np.linalg.LinAlgError:
                raise NumericalError("optimal basis matrix is singular") from None
        else:
            # working rows were scaled by sign: B1 = D B  =>  B^-1 = B1^-1 D
            binv = st.binv * sign[None, :]
            B = lp.A[:, basis]
        cond = condition_estimate(B, binv)
        if not np.isfinite(cond) or cond > opt.max_condition:
            raise NumericalError(f"optimal basis condition estimate {cond:.3g} exceeds {opt.max_condition:.0e}")
        binv = np.ascontiguousarray(binv)
        x = np.zeros(n)
        x[basis] = binv @ lp.b
        duals = lp.c[basis] @ binv
        for arr in (x, basis, binv, duals):
            arr.setflags(write=False)
        return LpSolution(
            LpStatus.OPTIMAL, lp, x=x, basis=basis, basis_inverse=binv, duals=duals,
            objective=float(lp.c @ x), iterations=st.pivots, phase1_objective=phase1_obj,
        )


def solve(lp, options=None, **overrides):
    """Solve ``lp`` from scratch; see :class:`RevisedSimplex`."""
    return RevisedSimplex(options, **overrides).solve(lp)


def refresh_basic_solution(sol, b_new):
    """Basic values ``B^-1 b_new`` for the retained basis. Feasibility is not checked."""
    b_new = np.asarray(b_new, dtype=float)
    if b_new.shape != (sol.basis_inverse.shape[0],):
        raise DimensionError(f"rhs has shape {b_new.shape}, expected ({sol.basis_inverse.shape[0]},)")
    return sol.basis_inverse @ b_new


def dump_lp(lp, path, basis=None):
    """Write A, b, c (and optionally a basis) in a coordinate text format."""
    m, n = lp.shape
    rows, cols = np.nonzero(lp.A)
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"% A: {m} x {n}\n{m} {n} {rows.size}\n")
        for i, j in zip(rows, cols):
            fh.write(f"{i + 1} {j + 1} {lp.A[i, j]!r}\n")
        fh.write("% b\n" + "\n".join(repr(float(v)) for v in lp.b) + "\n")
        fh.write("% c\n" + "\n".join(repr(float(v)) for v in lp.c) + "\n")
        if basis is not None:
            fh.write("% basis (1-based column indices)\n" + " ".join(str(int(j) + 1) for j in basis) + "\n")
