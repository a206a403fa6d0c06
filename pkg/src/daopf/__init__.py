"""Day-ahead DC optimal power flow with post-optimal uncertainty handling."""
from .case_io import load_case, load_profile
from .dcopf import HourlyDcopfInstance, build, extract_dispatch
from .errors import DaopfError
from .lmp import gsf_matrix, lmp_report
from .lp_core import LpSolution, LpStatus, StandardLp, refresh_basic_solution, solve
from .post_optimal import apply_update, itr, participation_factors, pv_range, sa_range
from .scheduler import RunConfig, bench, load_config, load_events, run_events, run_schedule
from .uncertainty import BimodalWeibull, NormalLoad, confidence, confidence_report

__version__ = "0.1.0"

__all__ = [
    "BimodalWeibull", "DaopfError", "HourlyDcopfInstance", "LpSolution", "LpStatus", "NormalLoad", "RunConfig",
    "StandardLp", "apply_update", "bench", "build", "confidence", "confidence_report", "extract_dispatch",
    "gsf_matrix", "itr", "lmp_report", "load_case", "load_config", "load_events", "load_profile",
    "participation_factors", "pv_range", "refresh_basic_solution", "run_events", "run_schedule", "sa_range",
    "solve",
]
