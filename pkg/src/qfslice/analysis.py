"""Closed-form constants: Margulis tube radius, the c0 bound, scaling limits."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .discreteness import markov_third_trace

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
CONVERGENCE_TOL = 1e-6

# widths of the published windows, smallest and largest, per Tr A
PUBLISHED_WINDOWS = {8.0: (16.0, 32.0, 128.0), 100.0: (128.0, 2560.0, 12800.0)}


@dataclass(frozen=True)
class TubeRadius:
    r: float

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError("tube radius must be non-negative")


def _check_tube_domain(lam: float) -> float:
    lam = float(lam)
    u = math.cosh(lam)
    if not (lam > 0 and u < SQRT2):
        raise ValueError(f"tube formula needs 0 < lambda and cosh(lambda) < sqrt(2); got lambda={lam}")
    return u


def meyerhoff_sinh2(lam: float) -> float:
    """sinh^2 of the tube radius about a geodesic of length lam."""
    u = _check_tube_domain(lam)
    return 0.5 * (math.sqrt(3 - 2 * u) / (u - 1) - 1)


def meyerhoff_radius(lam: float) -> TubeRadius:
    return TubeRadius(math.asinh(math.sqrt(max(meyerhoff_sinh2(lam), 0.0))))


def c0_lower_bound() -> float:
    """Length below which the tube's cross-section area 4 pi sinh^2(r/2) reaches 2 pi.

    sinh^2(r/2) = 1/2 means sinh^2 r = 3, and the tube formula then gives
    cosh(lambda) = (48 + 5 sqrt 2) / 49.
    """
    return math.acosh((48 + 5 * SQRT2) / 49)


def scaling_constant(trA: float) -> float:
    """Attracting fixed point of z -> trA - 1/z."""
    trA = float(trA)
    if not trA > 2:
        raise ValueError("scaling constant needs trA > 2 (trA = 2 is the parabolic limit, value 1)")
    return trA * (1 + math.sqrt(1 - (2 / trA) ** 2)) / 2


def repelling_point(trA: float) -> float:
    return trA * (1 - math.sqrt(1 - (2 / trA) ** 2)) / 2


@dataclass
class ScalingReport:
    trA: float
    trB: complex
    trAB: complex
    ratios: list[complex]
    limit: float
    converged_at: int | None
    status: str = "converged"
    traces: list[complex] = field(default_factory=list, repr=False)

    def rows(self):
        """(n, Tr A^n B, ratio_n, |ratio_n - limit|) for n >= 1."""
        for n, z in enumerate(self.ratios, start=1):
            yield n, self.traces[n] if n < len(self.traces) else None, z, abs(z - self.limit)


def scaling_convergence(trA: float, trB: complex, nmax: int,
                        trAB: complex | None = None,
                        tol: float = CONVERGENCE_TOL) -> ScalingReport:
    """Ratios Tr A^n B / Tr A^(n-1) B, n = 1..nmax, and when they settle.

    Tr AB defaults to the larger root of the Fricke equation. Traces are
    rescaled as they grow, which leaves the ratios untouched.
    """
    if not trA > 2:
        raise ValueError("trA must exceed 2")
    if nmax < 3:
        raise ValueError("nmax must be >= 3")
    trB = complex(trB)
    if trAB is None:
        trAB = markov_third_trace(trA, trB)[0]
    trAB = complex(trAB)
    limit = scaling_constant(trA)
    report = ScalingReport(trA, trB, trAB, [], limit, None)

    if trB != 0 and abs(trAB / trB - repelling_point(trA)) <= 1e-12 * max(1.0, abs(trAB / trB)):
        # the repelling fixed point is invariant; the orbit never leaves it
        report.ratios = [trAB / trB] * nmax
        report.status = "repelling-fixed-point"
        return report

    prev, cur = trB, trAB
    traces = [prev, cur]
    scale = 1.0
    for n in range(1, nmax + 1):
        if n > 1:
            prev, cur = cur, trA * cur - prev
            traces.append(cur * scale)
        if prev == 0:
            report.status = "degenerate"
            break
        z = cur / prev
        report.ratios.append(z)
        if report.converged_at is None and abs(z - limit) < tol:
            report.converged_at = n
        m = max(abs(prev), abs(cur))
        if m > 1e100:
            prev, cur, scale = prev / m, cur / m, scale * m
    report.traces = traces
    if report.converged_at is None and report.status == "converged":
        report.status = "not-converged"
    return report


def published_window_ratio(trA: float) -> float | None:
    widths = PUBLISHED_WINDOWS.get(float(trA))
    if widths is None:
        return None
    return widths[-1] / widths[0]


def window_ratio_gap(trA: float) -> float | None:
    """Relative gap between the published zoom ratio and the scaling constant."""
    ratio = published_window_ratio(trA)
    if ratio is None:
        return None
    k = scaling_constant(trA)
    return abs(ratio - k) / k


def figure_scale_check(trA: float) -> float:
    k = scaling_constant(trA)
    ratio = published_window_ratio(trA)
    if ratio is not None:
        log.info("trA=%g: scaling constant %.6f, published window ratio %g, gap %.3f%%",
                 trA, k, ratio, 100 * window_ratio_gap(trA))
    else:
        log.info("trA=%g: scaling constant %.6f (no published windows)", trA, k)
    return k


def w21_hyperbolic_scan(re_range: tuple[float, float], im_values, n: int = 400) -> list[tuple[complex, complex]]:
    """Points d off the positive real axis where Tr W_{2/1}(d) is real with modulus > 2.

    Along each horizontal line Im d = const the sign changes of Im Tr W_{2/1}
    are bracketed on an n-point grid and refined with brentq. Returns
    (d, Tr W_{2/1}(d)) pairs. Experimental probe of the Earle slice.
    """
    from scipy.optimize import brentq

    from .groups import EarleParam, trace_W21

    def tw(re, im):
        return trace_W21(EarleParam(complex(re, im)))

    hits = []
    r0, r1 = re_range
    for im in im_values:
        if abs(im) < 1e-12:
            continue
        xs = [r0 + k * (r1 - r0) / (n - 1) for k in range(n)]
        vals = [tw(x, im).imag for x in xs]
        for k in range(n - 1):
            if xs[k] <= 0 or vals[k] == 0 or vals[k] * vals[k + 1] > 0:
                continue
            re = brentq(lambda u: tw(u, im).imag, xs[k], xs[k + 1], xtol=1e-13)
            t = tw(re, im)
            if abs(t.real) > 2:
                hits.append((complex(re, im), t))
    return hits
