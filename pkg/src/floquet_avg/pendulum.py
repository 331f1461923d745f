"""Inverted pendulum with square-wave pivot acceleration and viscous damping.

The pivot acceleration is +/-c, flipping sign every half period (period
normalized to 2*pi).  Linearized about the inverted position the system is
piecewise constant:

    J(t) = [[0, 1], [omega^2 + eps, -beta*omega]]   on [0, pi)
    J(t) = [[0, 1], [omega^2 - eps, -beta*omega]]   on [pi, 2*pi)

with omega^2 = g/l the relative eigenfrequency squared, eps = c/l the
relative excitation acceleration, and beta = b/g the damping coefficient.

The graded split for the averaging engine puts the excitation at order 1
and the restoring/damping block at order 2 (omega^2 and beta*omega each
count as order 2): that is the only assignment under which the constant
block lands in a single term, and it is what the closed-form second- and
fourth-order boundary expressions below are derived from.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .averaging import SeriesSystem
from .errors import ModelError
from .exactmono import PiecewiseConstantSystem
from .ppoly import PiecewisePolyMatrix

PERIOD = 2.0 * math.pi

MODEL_NAME = "meissner-damped"


@dataclass(frozen=True)
class PendulumParams:
    """Dimensionless parameters: eigenfrequency, excitation, damping."""

    omega: float
    eps: float
    beta: float

    def __post_init__(self):
        for name in ("omega", "eps", "beta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0.0):
                raise ModelError(f"{name} must be finite and >= 0, got {v!r}")


def jacobians(p: PendulumParams) -> PiecewiseConstantSystem:
    """The two half-period Jacobians as a piecewise-constant system."""
    w2 = p.omega ** 2
    d = -p.beta * p.omega
    j_plus = np.array([[0.0, 1.0], [w2 + p.eps, d]])
    j_minus = np.array([[0.0, 1.0], [w2 - p.eps, d]])
    return PiecewiseConstantSystem(PERIOD, ((math.pi, j_plus), (math.pi, j_minus)))


def series_split(p: PendulumParams) -> SeriesSystem:
    """Graded series J0 + J1(t) + J2 feeding the averaging engine.

    J0 is the free drift, J1 the sign-flipping excitation (order 1), J2
    the constant restoring-plus-damping block (order 2).
    """
    j0 = np.array([[0.0, 1.0], [0.0, 0.0]])
    breaks = np.array([0.0, math.pi, PERIOD])
    exc_plus = np.array([[0.0, 0.0], [p.eps, 0.0]])
    j1 = PiecewisePolyMatrix(
        PERIOD, breaks, (exc_plus[:, :, None].copy(), -exc_plus[:, :, None])
    )
    j2_mat = np.array([[0.0, 0.0], [p.omega ** 2, -p.beta * p.omega]])
    j2 = PiecewisePolyMatrix.constant(j2_mat, PERIOD)
    return SeriesSystem(PERIOD, j0, (j1, j2))


class Order2Boundary(NamedTuple):
    eps_p: float
    eps_n: Optional[float]


def boundary_order2(omega: float, beta: float) -> Order2Boundary:
    """Second-order closed-form boundaries of the first stability domain.

    eps_p = (2*sqrt(3)/pi) * omega
    eps_n = (2*sqrt(3)/pi) * sqrt(omega^2 - beta*omega/pi + 1/pi^2)

    A negative radicand (possible only for beta > pi*omega + 1/(pi*omega),
    far outside the expansion's validity) reports the n-boundary as absent.
    """
    _check_params(omega, beta)
    scale = 2.0 * math.sqrt(3.0) / math.pi
    eps_p = scale * omega
    radicand = omega ** 2 - beta * omega / math.pi + 1.0 / math.pi ** 2
    eps_n = scale * math.sqrt(radicand) if radicand >= 0.0 else None
    return Order2Boundary(eps_p, eps_n)


@dataclass(frozen=True)
class BoundaryRoot:
    """One positive eps root of a fourth-order boundary quartic."""

    branch: str  # 'p' or 'n'
    domain: str  # 'first' or 'second'
    eps: float


def quartic_coefficients(omega: float, beta: float, branch: str):
    """(a, b, c) of a*x^2 + b*x + c = 0 with x = eps^2 for the branch.

    Both branches share a = pi^8/1260 and the middle coefficient
    b = -(pi^4/3)(1 + 4*pi^2*omega^2/15 - pi*beta*omega); they differ in
    the constant term.
    """
    if branch not in ("p", "n"):
        raise ModelError(f"branch must be 'p' or 'n', got {branch!r}")
    pi = math.pi
    a = pi ** 8 / 1260.0
    b = -(pi ** 4 / 3.0) * (1.0 + 4.0 * pi ** 2 * omega ** 2 / 15.0 - pi * beta * omega)
    if branch == "p":
        c = 4.0 * pi ** 2 * omega ** 2 * (1.0 + pi ** 2 * omega ** 2 / 3.0 - beta * omega * pi)
    else:
        c = 4.0 * (
            1.0
            - beta * pi * omega
            + pi ** 2 * omega ** 2 * (1.0 + pi ** 2 * omega ** 2 / 3.0 - beta * omega * pi + beta ** 2)
        )
    return a, b, c


def boundary_order4(omega: float, beta: float) -> list[BoundaryRoot]:
    """Fourth-order boundaries: positive roots of the two quartics in eps.

    Each quartic is a quadratic in eps^2; real roots are labeled by
    magnitude -- the smaller eps^2 root bounds the first stability domain,
    the larger the second.  Complex eps^2 roots mean the branch has no
    boundary at this omega.
    """
    _check_params(omega, beta)
    roots = []
    for branch in ("p", "n"):
        a, b, c = quartic_coefficients(omega, beta, branch)
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            continue
        sq = math.sqrt(disc)
        # stable quadratic: larger-magnitude root first, mate via c/(a*x1)
        x1 = (-b + sq) / (2.0 * a) if b <= 0.0 else (-b - sq) / (2.0 * a)
        x2 = c / (a * x1) if x1 != 0.0 else 0.0
        lo, hi = sorted((x1, x2))
        if lo > 0.0:
            roots.append(BoundaryRoot(branch, "first", math.sqrt(lo)))
        if hi > 0.0:
            roots.append(BoundaryRoot(branch, "second", math.sqrt(hi)))
    return roots


def order4_root(omega: float, beta: float, branch: str, domain: str = "first") -> Optional[float]:
    """Convenience lookup into :func:`boundary_order4`."""
    for root in boundary_order4(omega, beta):
        if root.branch == branch and root.domain == domain:
            return root.eps
    return None


def _check_params(omega: float, beta: float):
    if not (np.isfinite(omega) and omega >= 0.0):
        raise ModelError(f"omega must be finite and >= 0, got {omega!r}")
    if not (np.isfinite(beta) and beta >= 0.0):
        raise ModelError(f"beta must be finite and >= 0, got {beta!r}")
