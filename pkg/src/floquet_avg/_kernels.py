"""Hot numeric kernels: matrix exponential and the RK4 fundamental-matrix
integrator.

Both are written as plain loops over small dense float64 arrays and are
compiled with numba when it is importable.  Setting the environment variable
``FLOQUET_AVG_NO_NUMBA=1`` (before import) forces the pure-numpy fallback,
which runs the identical code uncompiled.  ``benchmarks/bench_kernels.py``
times the two paths against each other.
"""

import os

import numpy as np

_EPS_53 = 2.0 ** -53
_MAX_TAYLOR_TERMS = 30


def _numba_requested() -> bool:
    flag = os.environ.get("FLOQUET_AVG_NO_NUMBA", "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


def _norm1(a):
    """Matrix 1-norm (maximum absolute column sum)."""
    n = a.shape[0]
    best = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(a[i, j])
        if col > best:
            best = col
    return best


def _matexp_core(a):
    """exp(a) by scaling and squaring with an adaptive Taylor series.

    The scaled matrix has 1-norm <= 0.5, so the series gains at least one
    binary digit per term; the term cap is never the binding stop in
    double precision.
    """
    n = a.shape[0]
    nrm = _norm1(a)
    s = 0
    scaled = nrm
    while scaled > 0.5:
        scaled *= 0.5
        s += 1
    b = a / (2.0 ** s)
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, _MAX_TAYLOR_TERMS + 1):
        term = np.dot(term, b) / k
        out = out + term
        if _norm1(term) <= _EPS_53 * _norm1(out):
            break
    for _ in range(s):
        out = np.dot(out, out)
    return out


def _poly_eval_into(coeffs, t, out):
    """Horner evaluation of an (n, n, d+1) ascending-coefficient block."""
    n = coeffs.shape[0]
    d = coeffs.shape[2]
    for i in range(n):
        for j in range(n):
            acc = coeffs[i, j, d - 1]
            for k in range(d - 2, -1, -1):
                acc = acc * t + coeffs[i, j, k]
            out[i, j] = acc


def _rk4_monodromy_core(breaks, coeffs, steps_per_piece):
    """Integrate dX/dt = J(t) X, X(0) = I, across the polynomial pieces.

    Steps are confined to one piece at a time so no RK4 stage ever
    straddles a breakpoint.  ``coeffs`` is (pieces, n, n, d+1) in the
    global time variable.  The state update is Kahan-compensated: without
    it the accumulation roundoff (steps * eps * ||X||) dominates the
    determinant identity once ||X(T)|| is large.
    """
    m = coeffs.shape[0]
    n = coeffs.shape[1]
    x = np.eye(n)
    carry = np.zeros((n, n))
    jmat = np.empty((n, n))
    for p in range(m):
        t0 = breaks[p]
        t1 = breaks[p + 1]
        h = (t1 - t0) / steps_per_piece
        for k in range(steps_per_piece):
            t = t0 + k * h
            _poly_eval_into(coeffs[p], t, jmat)
            k1 = np.dot(jmat, x)
            _poly_eval_into(coeffs[p], t + 0.5 * h, jmat)
            k2 = np.dot(jmat, x + (0.5 * h) * k1)
            k3 = np.dot(jmat, x + (0.5 * h) * k2)
            _poly_eval_into(coeffs[p], t + h, jmat)
            k4 = np.dot(jmat, x + h * k3)
            step = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - carry
            updated = x + step
            carry = (updated - x) - step
            x = updated
    return x


USING_NUMBA = False
if _numba_requested():
    try:
        from numba import njit
    except ImportError:
        njit = None
    if njit is not None:
        _jit = njit(cache=True, nogil=True)
        _norm1 = _jit(_norm1)
        _matexp_core = _jit(_matexp_core)
        _poly_eval_into = _jit(_poly_eval_into)
        _rk4_monodromy_core = _jit(_rk4_monodromy_core)
        USING_NUMBA = True

matexp_core = _matexp_core
rk4_monodromy_core = _rk4_monodromy_core
norm1_core = _norm1
