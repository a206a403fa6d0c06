"""PV and load uncertainty models, used only to put a probability on ranges.

Nothing in the dispatch or update path reads these distributions. A
confidence level is the probability mass of a model inside an admissible
MW window, integrated with adaptive Simpson quadrature.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import MissingModelError, ValidationError
from .post_optimal import SensitivityRange, ToleranceRanges

QUAD_TOL = 1e-8
# tail mass left out when an infinite window is truncated to the support
TAIL_MASS = 1e-14
_INITIAL_PANELS = 64
_MAX_DEPTH = 60


@dataclass(frozen=True)
class BimodalWeibull:
    """Two-component Weibull mixture on irradiance, mapped to MW by ``eta * s_capacity``.

    ``c1``/``c2`` are in kW/m^2; ``s_capacity`` is chosen so that
    ``eta * s_capacity * g`` is in MW.
    """
    w1: float
    w2: float
    c1: float
    c2: float
    k1: float
    k2: float
    eta: float
    s_capacity: float

    def __post_init__(self):
        if min(self.w1, self.w2) < 0 or abs(self.w1 + self.w2 - 1.0) > 1e-12:
            raise ValidationError(f"mixture weights must be >= 0 and sum to 1, got {self.w1}, {self.w2}", "w1")
        for name in ("c1", "c2", "k1", "k2", "eta", "s_capacity"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}", name)

    @classmethod
    def from_forecast(cls, mean_mw, capacity_mw, *, w1=0.45, w2=0.55, k1=2.0, k2=3.5,
                      scale_ratio=2.0, eta=0.18, rated_irradiance=1.0):
        """Scale both components (fixed ``c2/c1``) so the mean output equals ``mean_mw``.

        The plant delivers ``capacity_mw`` at ``rated_irradiance``.
        """
        if not mean_mw > 0:
            raise ValidationError(f"forecast must be positive, got {mean_mw}", "pv_mw")
        s = capacity_mw / (eta * rated_irradiance)
        g_mean = mean_mw / (eta * s)
        unit = w1 * math.gamma(1 + 1 / k1) + w2 * scale_ratio * math.gamma(1 + 1 / k2)
        c1 = g_mean / unit
        return cls(w1=w1, w2=w2, c1=c1, c2=scale_ratio * c1, k1=k1, k2=k2, eta=eta, s_capacity=s)

    @property
    def mw_per_irradiance(self):
        return self.eta * self.s_capacity

    def _components(self):
        return ((self.w1, self.c1, self.k1), (self.w2, self.c2, self.k2))

    def irradiance_pdf(self, g):
        g = np.asarray(g, dtype=float)
        out = np.zeros_like(g)
        pos = g > 0
        for w, c, k in self._components():
            if w == 0:
                continue
            z = g[pos] / c
            out[pos] += w * (k / c) * z ** (k - 1) * np.exp(-z ** k)
        return out

    def pdf(self, p):
        """Density of P_PV per MW; zero for p <= 0."""
        scale = self.mw_per_irradiance
        return self.irradiance_pdf(np.asarray(p, dtype=float) / scale) / scale

    def mean(self):
        return self.mw_per_irradiance * sum(w * c * math.gamma(1 + 1 / k) for w, c, k in self._components())

    def sample(self, rng, size):
        first = rng.random(size) < self.w1
        g = np.where(first, self.c1 * rng.weibull(self.k1, size), self.c2 * rng.weibull(self.k2, size))
        return self.mw_per_irradiance * g

    def support(self):
        top = max(c * (-math.log(TAIL_MASS)) ** (1 / k) for w, c, k in self._components() if w > 0)
        return 0.0, self.mw_per_irradiance * top


@dataclass(frozen=True)
class NormalLoad:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}", "sigma")

    @classmethod
    def from_pct(cls, mu, pct):
        return cls(mu=float(mu), sigma=abs(mu) * pct / 100.0)

    def pdf(self, p):
        z = (np.asarray(p, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    def mean(self):
        return self.mu

    def sample(self, rng, size):
        return rng.normal(self.mu, self.sigma, size)

    def support(self):
        half = 12.0 * self.sigma  # tail beyond 12 sigma is ~1e-33
        return self.mu - half, self.mu + half


def pdf_pv(model, p):
    return model.pdf(p)


def _simpson_panel(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = float(f(m))
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f, a, b, tol=QUAD_TOL, panels=_INITIAL_PANELS):
    """Integrate scalar ``f`` over [a, b] to absolute tolerance ``tol``.

    The interval is first cut into ``panels`` equal pieces so a narrow peak
    cannot slip between the first few sample points; each piece is then
    bisected until the Richardson error estimate passes.
    """
    if b <= a:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    fe = [float(f(x)) for x in edges]
    total = 0.0
    stack = []
    for i in range(panels):
        lo, hi = float(edges[i]), float(edges[i + 1])
        m, fm, whole = _simpson_panel(f, lo, fe[i], hi, fe[i + 1])
        stack.append((lo, fe[i], m, fm, hi, fe[i + 1], whole, tol / panels, 0))
    while stack:
        lo, flo, m, fm, hi, fhi, whole, eps, depth = stack.pop()
        lm, flm, left = _simpson_panel(f, lo, flo, m, fm)
        rm, frm, right = _simpson_panel(f, m, fm, hi, fhi)
        err = left + right - whole
        if depth >= _MAX_DEPTH or abs(err) <= 15.0 * eps:
            total += left + right + err / 15.0
        else:
            stack.append((lo, flo, lm, flm, m, fm, left, eps / 2, depth + 1))
            stack.append((m, fm, rm, frm, hi, fhi, right, eps / 2, depth + 1))
    return total


def confidence(model, lower, upper, tol=QUAD_TOL):
    """Probability mass of ``model`` in [lower, upper]; infinite ends are cut at the support."""
    if lower > upper:
        raise ValueError(f"lower {lower} exceeds upper {upper}")
    lo_s, hi_s = model.support()
    a, b = max(lower, lo_s), min(upper, hi_s)
    if b <= a:
        return 0.0
    pdf = model.pdf
    value = adaptive_simpson(lambda x: pdf(x), a, b, tol)
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class ConfidenceResult:
    hour: int
    entity: str
    lower: float
    upper: float
    confidence: float = None  # None when not applicable
    model: str = ""

    @property
    def applicable(self):
        return self.confidence is not None


def confidence_report(ranges, models, hour, *, entity=None, per_bus=False, bus_ids=None):
    """Confidence levels for one hour's ranges.

    ``models`` maps ``"pv"`` to a :class:`BimodalWeibull` and/or ``"load"``
    to a :class:`NormalLoad` of total system load. A PV range must carry
    ``pv_mw`` (see :func:`~daopf.post_optimal.pv_range`). With ``per_bus``
    a tolerance-range report also covers each bus at the same relative
    sigma as the system model.
    """
    if isinstance(ranges, SensitivityRange):
        if ranges.pv_mw is None:
            raise ValueError("sensitivity range has no PV operating point; build it with pv_range")
        entity = entity or f"pv_row_{ranges.row}"
        lower, upper = ranges.pv_window
        if ranges.pv_mw <= 0:
            return [ConfidenceResult(hour, entity, lower, upper, None, "pv")]
        if models.get("pv") is None:
            raise MissingModelError(f"no PV model configured for hour {hour}")
        return [ConfidenceResult(hour, entity, lower, upper, confidence(models["pv"], lower, upper), "pv")]

    if isinstance(ranges, ToleranceRanges):
        model = models.get("load")
        if model is None:
            raise MissingModelError(f"no load model configured for hour {hour}")
        total = float(ranges.loads.sum())
        lower, upper = total + ranges.total_dec, total + ranges.total_inc
        out = [ConfidenceResult(hour, entity or "system_load", lower, upper,
                                confidence(model, lower, upper), "load")]
        if per_bus:
            rel = model.sigma / abs(model.mu)
            ids = bus_ids if bus_ids is not None else range(len(ranges.loads))
            for j, bus in enumerate(ids):
                p = float(ranges.loads[j])
                lo, hi = p + ranges.dec[j], p + ranges.inc[j]
                if p == 0:
                    out.append(ConfidenceResult(hour, f"bus_{bus}", lo, hi, None, "load"))
                    continue
                bus_model = NormalLoad(mu=p, sigma=rel * abs(p))
                out.append(ConfidenceResult(hour, f"bus_{bus}", lo, hi, confidence(bus_model, lo, hi), "load"))
        return out

    raise TypeError(f"unsupported range type {type(ranges).__name__}")
