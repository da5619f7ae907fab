from __future__ import annotations

from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.physics.wigner import wigner_3j as sympy_3j

from qdsindex.errors import PreconditionError
from qdsindex.models import (
    DEFAULT_THETA,
    build_model,
    circle_model,
    harmonic_element_3j,
    harmonic_element_quadrature,
    nctorus_closed_values,
    nctorus_model,
    sphere_form_integral,
    sphere_model,
    wigner3j,
)
from qdsindex.operators import commutator_d, delta_pow
from qdsindex.series import heat_samples


@pytest.fixture(scope="module")
def sphere():
    return sphere_model(12)


@pytest.fixture(scope="module")
def torus():
    return nctorus_model(Lambda=16)


def _interior_block(m, A):
    mask = m.interior
    return A[np.ix_(mask, mask)]


# -- circle ---------------------------------------------------------------


def test_circle_delta_of_z_on_interior():
    m = circle_model(30)
    z = m.generators["z"]
    dz = delta_pow(z, m.D, 1).toarray()
    zz = z.toarray()
    lam = m.D.eigenvalues
    # |n+1| - |n| = 1 for n >= 0: delta(z) agrees with z on columns with lambda >= 0
    cols = (lam >= 1) & m.interior
    assert np.allclose(dz[:, cols], zz[:, cols])


def test_circle_generator_is_unitary_inside():
    m = circle_model(30)
    z = m.generators["z"].toarray()
    prod = z.conj().T @ z
    assert np.allclose(_interior_block(m, prod), np.eye(int(m.interior.sum())))


# -- wigner 3j ------------------------------------------------------------


def test_wigner_examples():
    assert wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / sqrt(3))
    for j in (0.5, 1, 1.5, 2):
        for k in range(int(2 * j) + 1):
            mm = -j + k
            assert wigner3j(j, j, 0, mm, -mm, 0) == pytest.approx((-1) ** (j - mm) / sqrt(2 * j + 1))


half = st.integers(0, 6).map(lambda v: v / 2)


@settings(max_examples=60, deadline=None)
@given(half, half, half, st.data())
def test_wigner_matches_sympy(j1, j2, j3, data):
    m1 = data.draw(st.sampled_from([-j1 + k for k in range(int(2 * j1) + 1)]))
    m2 = data.draw(st.sampled_from([-j2 + k for k in range(int(2 * j2) + 1)]))
    m3 = -m1 - m2
    want = float(sympy_3j(j1, j2, j3, m1, m2, m3)) if abs(m3) <= j3 and (j1 + j2 + j3) % 1 == 0 else 0.0
    assert wigner3j(j1, j2, j3, m1, m2, m3) == pytest.approx(want, abs=1e-13)


def test_wigner_orthogonality():
    j1, j2 = 1.5, 1
    for j3 in (0.5, 1.5, 2.5):
        total = sum(
            (2 * j3 + 1) * wigner3j(j1, j2, j3, m1, m2, -m1 - m2) ** 2
            for m1 in np.arange(-j1, j1 + 1)
            for m2 in np.arange(-j2, j2 + 1)
            if abs(m1 + m2) <= j3
        )
        # each of the 2 j3 + 1 values of m3 contributes exactly one
        assert total == pytest.approx(2 * j3 + 1, rel=1e-12)


# -- sphere ---------------------------------------------------------------


def test_sphere_heat_trace(sphere):
    t = 1.0
    got = heat_samples(sphere.identity(), sphere.D, [t])[0].real
    exact = 4 * np.exp(-t) / (1 - np.exp(-t)) ** 2
    assert got < exact
    assert exact - got < 4 * 13**2 * np.exp(-12 * t)


@pytest.mark.parametrize(
    "s2,jp2,mp2,mu2,j2,m2",
    [(1, 1, 1, 0, 1, 1), (1, 3, -1, 2, 1, -1), (-1, 3, 1, -2, 3, 3), (1, 5, 3, 0, 3, 3), (-1, 1, -1, 2, 3, -3)],
)
def test_harmonic_elements_match_quadrature(s2, jp2, mp2, mu2, j2, m2):
    a = harmonic_element_3j(s2, jp2, mp2, mu2, j2, m2)
    b = harmonic_element_quadrature(s2, jp2, mp2, mu2, j2, m2)
    assert a == pytest.approx(b.real, abs=1e-8)
    assert abs(b.imag) < 1e-8


def test_sphere_generators(sphere):
    x, y, z = (sphere.generators[k].toarray() for k in "xyz")
    for A in (x, y, z):
        assert np.allclose(A, A.conj().T, atol=1e-12)
    # deep interior: the products only see modes well inside the truncation
    lam = np.abs(sphere.D.eigenvalues)
    deep = lam <= lam.max() - 3
    ideep = np.ix_(deep, deep)
    for A, B in ((x, y), (y, z), (x, z)):
        assert np.allclose((A @ B - B @ A)[ideep], 0, atol=1e-12)
    r2 = x @ x + y @ y + z @ z
    assert np.allclose(r2[ideep], np.eye(int(deep.sum())), atol=1e-12)


def test_sphere_grading_relations(sphere):
    g = sphere.gamma().toarray()
    assert np.allclose(g @ g, np.eye(g.shape[0]))
    Dm = np.diag(sphere.D.eigenvalues)
    assert np.allclose(g @ Dm + Dm @ g, 0)
    for k in "xyz":
        A = sphere.generators[k].toarray()
        assert np.allclose(g @ A, A @ g, atol=1e-12)


def test_form_integral_examples():
    assert sphere_form_integral("z", "x", "y") == pytest.approx(4 * pi / 3, abs=1e-10)
    assert abs(sphere_form_integral("1", "x", "y")) < 1e-12
    assert abs(sphere_form_integral("z", "1", "y")) < 1e-12
    assert sphere_form_integral("z", "y", "x") == pytest.approx(-4 * pi / 3, abs=1e-10)
    with pytest.raises(PreconditionError):
        sphere_form_integral("w", "x", "y")


def test_form_integral_stokes():
    # a0 = 1 gives the integral of d(a1 da2) = 0 for non-constant a1 a2 combos
    val = sphere_form_integral("1", {(2, 1): 1.0}, {(1, -1): 1.0, (2, 0): 0.3})
    assert abs(val) < 1e-10


def test_sphere_rejects_small_lmax():
    with pytest.raises(PreconditionError):
        sphere_model(2)


# -- noncommutative torus -------------------------------------------------


def test_torus_commutation_relation(torus):
    U, V = (torus.generators[k].toarray() for k in "UV")
    mask = torus.interior
    lhs = (U @ V)[np.ix_(mask, mask)]
    rhs = np.exp(2j * pi * torus.theta) * (V @ U)[np.ix_(mask, mask)]
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_torus_heat_constant(torus):
    m = nctorus_model(Lambda=60)
    for e in m.expectations:
        assert abs(e.evaluate() - e.expected) <= e.tolerance


def test_torus_commutator_norm_grows_with_degree(torus):
    # [D, u^a v^b] has operator norm |a + ib| on interior vectors
    for a, b in ((1, 0), (0, 1), (2, 1), (-1, 3)):
        mono = torus.monomial(a, b)
        da = commutator_d(mono, torus.D).toarray()
        mask = torus.interior
        sub = da[np.ix_(mask, mask)]
        sv = np.linalg.svd(sub, compute_uv=False)
        assert sv.max() == pytest.approx(abs(complex(a, b)), rel=1e-10)


def test_closed_values():
    th = DEFAULT_THETA
    w = nctorus_closed_values("prop_w", (-1, 1, 0), (-1, 0, 1), th)
    assert w == pytest.approx(4j * pi * np.exp(2j * pi * th))
    assert nctorus_closed_values("prop_w", (1, 1, 0), (-1, 0, 1), th) == 0
    assert nctorus_closed_values("prop_v", (1, 2, 3), (0, 0, 0), th) == 0
    with pytest.raises(PreconditionError):
        nctorus_closed_values("prop_q", (0, 0, 0), (0, 0, 0))


def test_build_model_dispatch():
    assert build_model("circle", Lambda=10).name == "circle"
    with pytest.raises(KeyError):
        build_model("moebius")
