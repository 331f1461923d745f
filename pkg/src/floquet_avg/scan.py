"""Parameter-space exploration for the damped-Meissner pendulum.

Stability bitmaps over (omega, eps) grids, boundary extraction by
bisection on a scalar margin, and exact-versus-approximate boundary
comparison tables.  Grid cells and omega samples are independent work
items; they may be evaluated by a thread pool, but results are always
assembled in index order so output is schedule-independent.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import averaging, pendulum, stability
from .errors import BracketError, ModelError
from .exactmono import exact_monodromy_pc, exact_monodromy_rk, pc_to_ppoly
from .stability import StabilityReport

EXACT_METHODS = ("exact-pc", "exact-rk")
ORDER_METHODS = tuple(f"order{k}" for k in range(1, averaging.MAX_ORDER + 1))

RK_STEPS_PER_PIECE = 256

# exact-boundary brackets are seeded from the order-4 prediction +/-30%,
# clipped at the p/n midpoint so a bracket never straddles the whole band
_BRACKET_REL = 0.30


def axis_samples(axis) -> np.ndarray:
    lo, hi, count = axis
    if count < 2 or not lo < hi:
        raise ModelError(f"axis needs count >= 2 and min < max, got {axis!r}")
    return np.linspace(lo, hi, int(count))


def range_samples(rng) -> np.ndarray:
    """Like axis_samples but a single-point range (count 1) is allowed."""
    lo, hi, count = rng
    if count == 1 and lo == hi:
        return np.array([float(lo)])
    return axis_samples(rng)


@dataclass(frozen=True)
class ScanGrid:
    """Verdict bitmap plus margins over an (omega, eps) grid.

    Arrays are indexed [eps_index, omega_index] (eps-major, matching the
    CSV row order).
    """

    omega_axis: tuple
    eps_axis: tuple
    beta: float
    method: str
    verdicts: np.ndarray
    margin_trace: np.ndarray
    margin_det: np.ndarray

    @property
    def omega_samples(self) -> np.ndarray:
        return axis_samples(self.omega_axis)

    @property
    def eps_samples(self) -> np.ndarray:
        return axis_samples(self.eps_axis)


def order_of_method(method: str) -> Optional[int]:
    if method in ORDER_METHODS:
        return int(method[len("order"):])
    return None


def _order_report(params: pendulum.PendulumParams, order: int,
                  tolerance: float) -> StabilityReport:
    sys = pendulum.series_split(params)
    x0, h_terms = averaging.standard_form(sys)
    avg = averaging.run_recursion(h_terms, sys.period, order)
    mono = averaging.assemble_monodromy(x0, avg, sys.period)
    trace = float(sum(mono.trace_by_order))
    det = stability.det_series_expansion(sys, avg, order)
    return stability.report_from_trace_det(trace, det, tolerance)


def point_report(omega: float, eps: float, beta: float, method: str,
                 tolerance: float = stability.DEFAULT_TOLERANCE) -> StabilityReport:
    """Classify one parameter point with the requested method."""
    params = pendulum.PendulumParams(omega, eps, beta)
    if method == "exact-pc":
        return stability.classify(exact_monodromy_pc(pendulum.jacobians(params)), tolerance)
    if method == "exact-rk":
        j = pc_to_ppoly(pendulum.jacobians(params))
        return stability.classify(exact_monodromy_rk(j, RK_STEPS_PER_PIECE), tolerance)
    order = order_of_method(method)
    if order is None:
        raise ModelError(f"unknown method {method!r}")
    return _order_report(params, order, tolerance)


def scan_region(omega_axis, eps_axis, beta: float, method: str,
                threads: Optional[int] = None,
                tolerance: float = stability.DEFAULT_TOLERANCE) -> ScanGrid:
    """Stability verdict for every grid point, deterministic in any schedule."""
    omegas = axis_samples(omega_axis)
    epss = axis_samples(eps_axis)
    if method not in EXACT_METHODS and order_of_method(method) is None:
        raise ModelError(f"unknown method {method!r}")
    shape = (epss.size, omegas.size)
    verdicts = np.empty(shape, dtype="<U8")
    margin_trace = np.empty(shape)
    margin_det = np.empty(shape)

    def work(flat_index):
        ie, io = divmod(flat_index, omegas.size)
        report = point_report(omegas[io], epss[ie], beta, method, tolerance)
        verdicts[ie, io] = report.verdict.value
        margin_trace[ie, io] = report.margin_trace
        margin_det[ie, io] = report.margin_det

    indices = range(epss.size * omegas.size)
    nthreads = _resolve_threads(threads)
    if nthreads <= 1:
        for idx in indices:
            work(idx)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(work, indices))
    return ScanGrid(tuple(omega_axis), tuple(eps_axis), beta, method,
                    verdicts, margin_trace, margin_det)


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("FLOQUET_AVG_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def boundary_margin(omega: float, beta: float, method: str):
    """Scalar margin in eps whose zero is the requested boundary curve.

    Exact methods bisect the exponential-product margin; order-K methods
    use the order-K trace partial sum against the graded determinant
    truncation, so their zeros coincide with the closed-form boundary
    expressions of the same order.
    """
    if method in ("exact", "exact-pc", "exact-rk"):
        def margin(eps):
            return stability.margin_exact(pendulum.PendulumParams(omega, eps, beta))
        return margin
    order = order_of_method(method)
    if order is None:
        raise ModelError(f"unknown method {method!r}")

    def margin(eps):
        report = _order_report(pendulum.PendulumParams(omega, eps, beta), order, 0.0)
        return report.margin_trace

    return margin


def bisect_boundary(omega: float, beta: float, eps_bracket, method: str,
                    tol: float = 1e-10) -> float:
    """Bisection on the scalar margin; the bracket must straddle a sign change."""
    lo, hi = float(eps_bracket[0]), float(eps_bracket[1])
    if not lo < hi:
        raise ModelError(f"bad bracket {eps_bracket!r}")
    margin = boundary_margin(omega, beta, method)
    m_lo, m_hi = margin(lo), margin(hi)
    if m_lo == 0.0:
        return lo
    if m_hi == 0.0:
        return hi
    if (m_lo < 0.0) == (m_hi < 0.0):
        raise BracketError(lo, hi, m_lo, m_hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        m_mid = margin(mid)
        if m_mid == 0.0:
            return mid
        if (m_mid < 0.0) == (m_lo < 0.0):
            lo, m_lo = mid, m_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundaryCurve:
    branch: str
    method: str
    points: tuple  # ((omega, eps), ...) with omega strictly increasing
    omitted: int = 0


def _exact_bracket(omega: float, beta: float, branch: str):
    """Order-4 seeded bracket for the exact first-domain boundary."""
    eps_p = pendulum.order4_root(omega, beta, "p")
    eps_n = pendulum.order4_root(omega, beta, "n")
    seed = eps_p if branch == "p" else eps_n
    if seed is None or seed <= 0.0:
        return None
    lo = (1.0 - _BRACKET_REL) * seed
    hi = (1.0 + _BRACKET_REL) * seed
    if eps_p is not None and eps_n is not None and eps_p < eps_n:
        mid = 0.5 * (eps_p + eps_n)
        if branch == "p":
            hi = min(hi, mid)
        else:
            lo = max(lo, mid)
    if not lo < hi:
        return None
    return lo, hi


def trace_boundary(omega_range, beta: float, branch: str, method: str,
                   tol: float = 1e-10) -> BoundaryCurve:
    """First-domain boundary curve over an omega range.

    order2/order4 evaluate their closed forms; exact methods bisect the
    exact margin inside an order-4-seeded bracket.  Samples whose branch
    vanishes or whose bracket shows no sign change are omitted.
    """
    if branch not in ("p", "n"):
        raise ModelError(f"branch must be 'p' or 'n', got {branch!r}")
    omegas = range_samples(omega_range) if not isinstance(omega_range, np.ndarray) else omega_range
    points = []
    omitted = 0
    for omega in omegas:
        eps = _boundary_sample(float(omega), beta, branch, method, tol)
        if eps is None:
            omitted += 1
        else:
            points.append((float(omega), eps))
    return BoundaryCurve(branch, method, tuple(points), omitted)


def _boundary_sample(omega, beta, branch, method, tol) -> Optional[float]:
    if method == "order2":
        o2 = pendulum.boundary_order2(omega, beta)
        return o2.eps_p if branch == "p" else o2.eps_n
    if method == "order4":
        return pendulum.order4_root(omega, beta, branch)
    if method in ("exact", "exact-pc", "exact-rk"):
        bracket = _exact_bracket(omega, beta, branch)
        if bracket is None:
            return None
        try:
            return bisect_boundary(omega, beta, bracket, "exact", tol)
        except BracketError:
            return None
    raise ModelError(f"unknown boundary method {method!r}")


@dataclass(frozen=True)
class ComparisonRow:
    omega: float
    branch: str
    eps_exact: Optional[float]
    eps_order2: Optional[float]
    eps_order4: Optional[float]

    @property
    def err2(self) -> Optional[float]:
        if self.eps_exact is None or self.eps_order2 is None:
            return None
        return abs(self.eps_order2 - self.eps_exact)

    @property
    def err4(self) -> Optional[float]:
        if self.eps_exact is None or self.eps_order4 is None:
            return None
        return abs(self.eps_order4 - self.eps_exact)


@dataclass(frozen=True)
class ComparisonTable:
    beta: float
    rows: tuple
    summary: dict = field(compare=False)

    def branch_rows(self, branch: str):
        return [r for r in self.rows if r.branch == branch]


def compare_boundaries(omega_range, beta: float, tol: float = 1e-10) -> ComparisonTable:
    """Exact vs order-2 vs order-4 first-domain boundaries per branch."""
    omegas = range_samples(omega_range) if not isinstance(omega_range, np.ndarray) else omega_range
    rows = []
    for branch in ("p", "n"):
        for omega in omegas:
            omega = float(omega)
            rows.append(ComparisonRow(
                omega=omega,
                branch=branch,
                eps_exact=_boundary_sample(omega, beta, branch, "exact", tol),
                eps_order2=_boundary_sample(omega, beta, branch, "order2", tol),
                eps_order4=_boundary_sample(omega, beta, branch, "order4", tol),
            ))
    summary = {}
    for branch in ("p", "n"):
        for name in ("err2", "err4"):
            errs = [getattr(r, name) for r in rows
                    if r.branch == branch and getattr(r, name) is not None]
            summary[f"{branch}_{name}_max"] = max(errs) if errs else math.nan
            summary[f"{branch}_{name}_mean"] = float(np.mean(errs)) if errs else math.nan
    return ComparisonTable(beta, tuple(rows), summary)
