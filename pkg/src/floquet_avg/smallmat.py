"""Dense real square-matrix arithmetic for small dimensions (n <= 8).

Matrices are plain float64 numpy arrays of shape (n, n).  The two
operations that matter for Floquet analysis live here: the matrix
exponential and the eigenvalues of a 2x2 monodromy matrix.
"""

import math

import numpy as np

from ._kernels import matexp_core
from .errors import ModelError, NumericRangeError

MAX_DIM = 8
MATEXP_NORM_GUARD = 1.0e6


def as_matrix(entries) -> np.ndarray:
    """Coerce to a finite square float64 array of dimension 1..8."""
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ModelError(f"expected a square matrix, got shape {m.shape}")
    if not 1 <= m.shape[0] <= MAX_DIM:
        raise ModelError(f"dimension {m.shape[0]} outside supported range 1..{MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise ModelError("matrix entries must be finite")
    return m


def norm1(m) -> float:
    """Matrix 1-norm (maximum absolute column sum)."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.abs(m).sum(axis=0).max())


def matexp(m, t: float) -> np.ndarray:
    """exp(m * t) by scaling and squaring.

    The argument is scaled so its 1-norm is at most 0.5, the Taylor
    series is summed until the next term drops below 2**-53 of the
    partial sum (at most 30 terms), and the result is squared back.

    Parameters
    ----------
    m : array_like
        Square matrix, dimension 1..8, finite entries.
    t : float
        Time; the exponential of ``m * t`` is returned.
    """
    m = as_matrix(m)
    if not math.isfinite(t):
        raise ModelError("time must be finite")
    a = m * t
    if norm1(a) > MATEXP_NORM_GUARD:
        raise NumericRangeError(
            f"||M*t||_1 = {norm1(a):.3g} exceeds the overflow guard {MATEXP_NORM_GUARD:g}"
        )
    return matexp_core(np.ascontiguousarray(a))


def roots_from_trace_det(tr: float, det: float) -> tuple[complex, complex]:
    """Both roots of rho^2 - tr*rho + det = 0, larger magnitude first.

    Real case uses the cancellation-avoiding form: the larger-magnitude
    root from the quadratic formula, the other as det / rho1.
    """
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        sq = math.sqrt(disc)
        r1 = 0.5 * (tr + sq) if tr >= 0.0 else 0.5 * (tr - sq)
        if r1 != 0.0:
            r2 = det / r1
        else:
            r2 = 0.5 * tr  # tr = det = 0: double root at zero
        return complex(r1), complex(r2)
    sq = math.sqrt(-disc)
    r1 = complex(0.5 * tr, 0.5 * sq)
    r2 = complex(0.5 * tr, -0.5 * sq)
    return r1, r2


def char_roots_2x2(f) -> tuple[complex, complex]:
    """Floquet multipliers of a 2x2 monodromy matrix."""
    f = as_matrix(f)
    if f.shape[0] != 2:
        raise ModelError(f"char_roots_2x2 needs a 2x2 matrix, got {f.shape[0]}x{f.shape[0]}")
    tr = float(f[0, 0] + f[1, 1])
    det = float(f[0, 0] * f[1, 1] - f[0, 1] * f[1, 0])
    return roots_from_trace_det(tr, det)
