"""Inner-loop kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it was built and importable; set
``DAOPF_KERNELS=python`` to force the fallback. Both expose the same five
functions operating on C-contiguous float64 arrays.
"""
import os

import numpy as np

from . import _pykernels

_ck = None
if os.environ.get("DAOPF_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _ck
    except ImportError:
        _ck = None

BACKENDS = {"python": _pykernels}
if _ck is not None:
    BACKENDS["compiled"] = _ck

BACKEND = "compiled" if _ck is not None else "python"
_impl = BACKENDS[BACKEND]


def use_backend(name):
    """Switch the active backend ("compiled" or "python"); returns the previous name."""
    global BACKEND, _impl
    if name not in BACKENDS:
        raise ValueError(f"kernel backend {name!r} not available; have {sorted(BACKENDS)}")
    previous = BACKEND
    BACKEND, _impl = name, BACKENDS[name]
    return previous


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def eta_update(binv, d, r):
    _impl.eta_update(binv, _c(d), int(r))


def ratio_test(x, d, basis, pivot_tol, tie_tol):
    return _impl.ratio_test(_c(x), _c(d), np.ascontiguousarray(basis, dtype=np.int_),
                            float(pivot_tol), float(tie_tol))


def sa_bounds(x, alpha, tol):
    return _impl.sa_bounds(_c(x), _c(alpha), float(tol))


def itr_fractions(R, x, loads, alpha_tol, feas_tol):
    return _impl.itr_fractions(_c(R), _c(x), _c(loads), float(alpha_tol), float(feas_tol))


def itr_bounds(R, delta, loads, alpha_tol):
    return _impl.itr_bounds(_c(R), _c(delta), _c(loads), float(alpha_tol))
