"""Stability verdicts and signed margins for 2-DOF monodromy matrices.

For a 2x2 monodromy matrix F the multipliers are the roots of
rho^2 - tr(F) rho + det(F) = 0 and the stability conditions are
|tr F| - 1 <= det F <= 1, strict for asymptotic stability.  Both are
reported as signed margins (positive inside, zero on the boundary), so
boundary tracing reduces to scalar root finding:

    margin_trace = det(F) + 1 - |tr(F)|
    margin_det   = 1 - det(F)

Strict-versus-nonstrict cannot be resolved in floating point, so verdicts
carry an explicit Marginal band of half-width ``tolerance``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import pendulum
from .averaging import AveragedExpansion, SeriesSystem
from .errors import ModelError
from .exactmono import exact_monodromy_pc
from .ppoly import pp_average
from .smallmat import as_matrix, roots_from_trace_det

DEFAULT_TOLERANCE = 1e-9


class Verdict(enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StabilityReport:
    trace: float
    determinant: float
    multipliers: tuple
    margin_trace: float
    margin_det: float
    verdict: Verdict
    tolerance: float


def report_from_trace_det(trace: float, det: float,
                          tolerance: float = DEFAULT_TOLERANCE) -> StabilityReport:
    """Build the full report from the two scalar invariants of F."""
    if tolerance < 0.0:
        raise ModelError("tolerance must be >= 0")
    margin_trace = det + 1.0 - abs(trace)
    margin_det = 1.0 - det
    if margin_trace > tolerance and margin_det > tolerance:
        verdict = Verdict.STABLE
    elif margin_trace < -tolerance or margin_det < -tolerance:
        verdict = Verdict.UNSTABLE
    else:
        verdict = Verdict.MARGINAL
    return StabilityReport(
        trace=trace,
        determinant=det,
        multipliers=roots_from_trace_det(trace, det),
        margin_trace=margin_trace,
        margin_det=margin_det,
        verdict=verdict,
        tolerance=tolerance,
    )


def classify(f, tolerance: float = DEFAULT_TOLERANCE) -> StabilityReport:
    """Verdict and margins for a 2x2 monodromy matrix."""
    f = as_matrix(f)
    if f.shape[0] != 2:
        raise ModelError("classification is defined for 2x2 monodromy matrices only")
    tr = float(f[0, 0] + f[1, 1])
    det = float(f[0, 0] * f[1, 1] - f[0, 1] * f[1, 0])
    return report_from_trace_det(tr, det, tolerance)


def margin_exact(params: pendulum.PendulumParams) -> float:
    """Signed distance to the exact pendulum stability boundary.

    exp(-2*pi*beta*omega) + 1 - |tr(exp(pi J-) exp(pi J+))|: positive
    inside the stability domain, zero on the boundary, negative outside.
    The determinant is the closed form, the trace comes from the
    exponential-product monodromy.
    """
    f = exact_monodromy_pc(pendulum.jacobians(params))
    det = math.exp(-2.0 * math.pi * params.beta * params.omega)
    return det + 1.0 - abs(float(f[0, 0] + f[1, 1]))


def det_series(sys: SeriesSystem, avg: AveragedExpansion) -> float:
    """Liouville-consistent determinant of the order-N approximation.

    exp(T tr J0) * exp((tr A_1 + ... + tr A_N) T).  The A-traces equal the
    averaged J-term traces, so for systems whose trace content stops at a
    computed order this is the exact determinant.
    """
    t = sys.period
    total = float(np.trace(sys.J0))
    for a in avg.A:
        total += float(np.trace(a))
    return math.exp(total * t)


def det_series_expansion(sys: SeriesSystem, avg: AveragedExpansion,
                         order: int | None = None) -> float:
    """Graded truncation of the determinant expansion at the given order.

    Expands exp(sum_j tr(A_j) T) as a power series in the grading
    parameter and keeps terms of grade <= order; the J0 factor
    exp(T tr J0) is grade 0 and multiplies the whole truncation.  This is
    the determinant an order-K boundary condition is solved against (the
    trace partial sum is truncated the same way), so approximate-boundary
    root finding reproduces the closed-form boundary curves.
    """
    if order is None:
        order = avg.order
    if order > avg.order:
        raise ModelError(f"requested order {order} exceeds computed order {avg.order}")
    t = sys.period
    # scalar graded series: coeff[j] = tr(A_j) * T for j >= 1
    coeff = np.zeros(order + 1)
    for j, a in enumerate(avg.A[:order], start=1):
        coeff[j] = float(np.trace(a)) * t
    series = np.zeros(order + 1)
    series[0] = 1.0
    power = np.zeros(order + 1)
    power[0] = 1.0
    for m in range(1, order + 1):
        nxt = np.zeros(order + 1)
        for i in range(order + 1):
            if power[i] == 0.0:
                continue
            for j in range(1, order + 1 - i):
                nxt[i + j] += power[i] * coeff[j]
        power = nxt
        series += power / math.factorial(m)
    return math.exp(float(np.trace(sys.J0)) * t) * float(series.sum())


def trace_identity_residuals(sys: SeriesSystem, avg: AveragedExpansion) -> list[float]:
    """|tr(A_j) - (1/T) integral tr(J_j)| for each computed order.

    The identity holds in any dimension for every j >= 1; a violation
    points at a broken recursion or a mis-graded input.
    """
    out = []
    for j, a in enumerate(avg.A, start=1):
        if j <= len(sys.terms):
            avg_j = pp_average(sys.terms[j - 1])
            expect = float(np.trace(avg_j))
        else:
            expect = 0.0
        out.append(abs(float(np.trace(a)) - expect))
    return out
