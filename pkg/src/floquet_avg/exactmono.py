"""Exact monodromy oracles.

Two independent routes to X(T) for a linear T-periodic system:

* closed-form products of matrix exponentials when the coefficient matrix
  is piecewise constant, and
* a fixed-step classical RK4 integrator of dX/dt = J(t) X for any
  piecewise-polynomial J, with steps confined to each smooth piece so no
  stage straddles a discontinuity.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import rk4_monodromy_core
from .errors import ModelError
from .ppoly import PiecewisePolyMatrix, to_dense
from .smallmat import as_matrix, matexp


@dataclass(frozen=True)
class PiecewiseConstantSystem:
    """T-periodic system with a constant coefficient matrix per segment."""

    period: float
    segments: tuple  # ((duration, matrix), ...)

    def __post_init__(self):
        if not (np.isfinite(self.period) and self.period > 0):
            raise ModelError("period must be positive and finite")
        segs = []
        total = 0.0
        dim = None
        for duration, mat in self.segments:
            duration = float(duration)
            if not (np.isfinite(duration) and duration > 0):
                raise ModelError("segment durations must be positive")
            mat = as_matrix(mat)
            if dim is None:
                dim = mat.shape[0]
            elif mat.shape[0] != dim:
                raise ModelError("all segment matrices must share one dimension")
            segs.append((duration, mat))
            total += duration
        if abs(total - self.period) > 1e-12 * self.period:
            raise ModelError(
                f"segment durations sum to {total:g}, expected the period {self.period:g}"
            )
        object.__setattr__(self, "segments", tuple(segs))

    @property
    def dim(self) -> int:
        return self.segments[0][1].shape[0]


def exact_monodromy_pc(sys: PiecewiseConstantSystem) -> np.ndarray:
    """Product of segment exponentials; later segments multiply on the left.

    For two half-period segments this is exp(d2*M2) @ exp(d1*M1) -- the
    order matters and getting it backwards is the classic Floquet sign
    error, hence the explicit left-multiplication here.
    """
    f = np.eye(sys.dim)
    for duration, mat in sys.segments:
        f = matexp(mat, duration) @ f
    return f


def exact_monodromy_rk(j: PiecewisePolyMatrix, steps_per_piece: int) -> np.ndarray:
    """RK4 fundamental matrix at t = T for dX/dt = J(t) X, X(0) = I."""
    if steps_per_piece < 16:
        raise ModelError("steps_per_piece must be at least 16")
    breaks, coeffs = to_dense(j)
    return rk4_monodromy_core(breaks, coeffs, steps_per_piece)


def pc_to_ppoly(sys: PiecewiseConstantSystem) -> PiecewisePolyMatrix:
    """Degree-0 piecewise-polynomial view of a piecewise-constant system."""
    breaks = np.concatenate(([0.0], np.cumsum([d for d, _ in sys.segments])))
    breaks[-1] = sys.period
    pieces = tuple(mat[:, :, None].copy() for _, mat in sys.segments)
    return PiecewisePolyMatrix(sys.period, breaks, pieces)


def pc_from_ppoly(j: PiecewisePolyMatrix) -> PiecewiseConstantSystem:
    """Inverse view when every piece has degree 0."""
    if j.max_degree > 0:
        raise ModelError("system is not piecewise constant (degree > 0 pieces)")
    segments = []
    for k, piece in enumerate(j.pieces):
        duration = j.breakpoints[k + 1] - j.breakpoints[k]
        segments.append((float(duration), piece[:, :, 0].copy()))
    return PiecewiseConstantSystem(j.period, tuple(segments))
