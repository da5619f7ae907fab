"""Hot numerical kernels with a numba path and a pure-numpy fallback.

Set ``QDSINDEX_DISABLE_JIT=1`` in the environment to force the numpy
implementations.  Both paths compute the same quantities; the benchmark in
``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import os

import numpy as np

JIT_OPTIONS = {"nogil": True, "cache": True}

_CHUNK = 1 << 15


def _jit_requested() -> bool:
    return os.environ.get("QDSINDEX_DISABLE_JIT", "").strip().lower() not in ("1", "true", "yes", "on")


try:  # pragma: no cover - exercised implicitly by whichever path is active
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_JIT = HAVE_NUMBA and _jit_requested()


# ---------------------------------------------------------------------------
# weighted exponential sums: sum_i w_i exp(-t mu_i) or exp(-(t mu_i)^2)


def heat_sums_numpy(weights: np.ndarray, mu: np.ndarray, ts: np.ndarray, gaussian: bool) -> np.ndarray:
    """Return ``sum_i weights[i] * K(t, mu[i])`` for every ``t`` in ``ts``."""
    weights = np.asarray(weights, dtype=np.complex128)
    mu = np.asarray(mu, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    out = np.zeros(ts.shape[0], dtype=np.complex128)
    for start in range(0, mu.shape[0], _CHUNK):
        m = mu[start:start + _CHUNK]
        w = weights[start:start + _CHUNK]
        arg = np.outer(ts, m)
        if gaussian:
            arg = arg * arg
        out += np.exp(-arg) @ w
    return out


def _heat_sums_loop(weights, mu, ts, gaussian):
    nt = ts.shape[0]
    n = mu.shape[0]
    out = np.zeros(nt, dtype=np.complex128)
    for k in range(nt):
        t = ts[k]
        acc_re = 0.0
        acc_im = 0.0
        for i in range(n):
            x = t * mu[i]
            if gaussian:
                x = x * x
            if x > 745.0:
                continue
            e = np.exp(-x)
            acc_re += weights[i].real * e
            acc_im += weights[i].imag * e
        out[k] = acc_re + 1j * acc_im
    return out


# ---------------------------------------------------------------------------
# Jacobi polynomials P_n^{(a,b)}(x) by the three-term recurrence


def jacobi_numpy(n: int, a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Evaluate the Jacobi polynomial of degree ``n`` at the points ``x``."""
    x = np.asarray(x, dtype=np.float64)
    p0 = np.ones_like(x)
    if n == 0:
        return p0
    p1 = 0.5 * (a - b + (a + b + 2.0) * x)
    for k in range(2, n + 1):
        c = 2.0 * k + a + b
        a1 = 2.0 * k * (k + a + b) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1


def _jacobi_loop(n, a, b, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xi = x[i]
        p0 = 1.0
        if n == 0:
            out[i] = p0
            continue
        p1 = 0.5 * (a - b + (a + b + 2.0) * xi)
        for k in range(2, n + 1):
            c = 2.0 * k + a + b
            a1 = 2.0 * k * (k + a + b) * (c - 2.0)
            a2 = (c - 1.0) * (a * a - b * b)
            a3 = (c - 2.0) * (c - 1.0) * c
            a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
            p0, p1 = p1, ((a2 + a3 * xi) * p1 - a4 * p0) / a1
        out[i] = p1
    return out


if HAVE_NUMBA:
    _heat_sums_jit = numba.njit(**JIT_OPTIONS)(_heat_sums_loop)
    _jacobi_jit = numba.njit(**JIT_OPTIONS)(_jacobi_loop)
else:  # pragma: no cover
    _heat_sums_jit = None
    _jacobi_jit = None


def heat_sums_jit(weights: np.ndarray, mu: np.ndarray, ts: np.ndarray, gaussian: bool) -> np.ndarray:
    if _heat_sums_jit is None:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    return _heat_sums_jit(
        np.ascontiguousarray(weights, dtype=np.complex128),
        np.ascontiguousarray(mu, dtype=np.float64),
        np.ascontiguousarray(ts, dtype=np.float64),
        bool(gaussian),
    )


def jacobi_jit(n: int, a: float, b: float, x: np.ndarray) -> np.ndarray:
    if _jacobi_jit is None:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    return _jacobi_jit(int(n), float(a), float(b), np.ascontiguousarray(x, dtype=np.float64))


def heat_sums(weights: np.ndarray, mu: np.ndarray, ts: np.ndarray, gaussian: bool = False) -> np.ndarray:
    """Dispatch to the active implementation of the weighted exponential sum."""
    if USE_JIT:
        return heat_sums_jit(weights, mu, ts, gaussian)
    return heat_sums_numpy(weights, mu, ts, gaussian)


def jacobi(n: int, a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Dispatch to the active Jacobi polynomial evaluator."""
    if USE_JIT:
        return jacobi_jit(n, a, b, x)
    return jacobi_numpy(n, a, b, np.asarray(x, dtype=np.float64))
