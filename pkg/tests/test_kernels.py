from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_jacobi

from qdsindex import _kernels


def _naive_heat(w, mu, ts, gaussian):
    arg = np.outer(ts, mu)
    K = np.exp(-(arg**2)) if gaussian else np.exp(-arg)
    return K @ w


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_heat_sums_paths_agree(seed, gaussian):
    rng = np.random.default_rng(seed)
    mu = rng.uniform(0.5, 50, size=300)
    w = rng.normal(size=300) + 1j * rng.normal(size=300)
    ts = np.geomspace(0.01, 1.0, 7)
    want = _naive_heat(w, mu, ts, gaussian)
    assert np.allclose(_kernels.heat_sums_numpy(w, mu, ts, gaussian), want, rtol=1e-12)
    if _kernels.HAVE_NUMBA:
        assert np.allclose(_kernels.heat_sums_jit(w, mu, ts, gaussian), want, rtol=1e-12)


@pytest.mark.parametrize("n,a,b", [(0, 0.0, 0.0), (1, 0.5, -0.5), (4, 1.0, 2.0), (9, 0.0, 3.0), (15, 2.5, 0.5)])
def test_jacobi_matches_scipy(n, a, b):
    x = np.linspace(-1, 1, 41)
    want = eval_jacobi(n, a, b, x)
    assert np.allclose(_kernels.jacobi_numpy(n, a, b, x), want, rtol=1e-11, atol=1e-12)
    if _kernels.HAVE_NUMBA:
        assert np.allclose(_kernels.jacobi_jit(n, a, b, x), want, rtol=1e-11, atol=1e-12)


def _use_jit_with(value):
    env = dict(os.environ)
    if value is None:
        env.pop("QDSINDEX_DISABLE_JIT", None)
    else:
        env["QDSINDEX_DISABLE_JIT"] = value
    out = subprocess.run(
        [sys.executable, "-c", "from qdsindex import _kernels; print(_kernels.USE_JIT)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return out.stdout.strip()


def test_disable_flag_selects_numpy():
    assert _use_jit_with("1") == "False"
    assert _use_jit_with("true") == "False"
    expected = str(_kernels.HAVE_NUMBA)
    assert _use_jit_with(None) == expected
    assert _use_jit_with("0") == expected
