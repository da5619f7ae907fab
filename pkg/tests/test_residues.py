from __future__ import annotations

from math import gamma, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdsindex.errors import PreconditionError
from qdsindex.models import circle_model, nctorus_model, sphere_model
from qdsindex.operators import Op, commutator_d, sign_F
from qdsindex.residues import (
    abs_expansion,
    conversion_factor,
    convert_D2_to_absD,
    psi,
    zeta_at_zero,
    zeta_residue,
)
from qdsindex.series import AsymptoticSeries, exact_expansion


@pytest.fixture(scope="module")
def torus():
    return nctorus_model()


@pytest.fixture(scope="module")
def sphere():
    return sphere_model(40)


def test_conversion_factor_values():
    assert conversion_factor(2, 0) == pytest.approx(4 * gamma(1.5) / sqrt(pi))
    assert conversion_factor(2, 0) == pytest.approx(2.0)
    assert conversion_factor(2, 2) == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.data())
def test_conversion_matches_mellin_transform(p, data):
    # t^{-(p-r)} in the gauss kernel and the abs kernel are related by Gamma functions
    r = data.draw(st.integers(0, p))
    a = p - r
    want = 2 ** a * gamma((a + 1) / 2) / sqrt(pi)
    assert conversion_factor(p, r) == pytest.approx(want)


def test_convert_zero_series():
    s = AsymptoticSeries(p=2, coeffs=np.zeros(5), kernel="gauss")
    assert np.all(convert_D2_to_absD(s).coeffs == 0)


def test_torus_gaussian_to_abs_constant(torus):
    s = convert_D2_to_absD(exact_expansion("torus-gaussian"), 2)
    assert s.coeff(0) == pytest.approx(4 * pi)
    direct = abs_expansion(torus.identity(), torus.D, torus.growth, torus.fit)
    assert direct.coeff(0).real == pytest.approx(4 * pi, rel=1e-6)


def test_torus_identity_residue(torus):
    # Res_{z=1} Tr(|D|^{-2z}) = b_0 / 2 with b_0 = 4 pi
    rep = zeta_residue(torus.identity(), torus.D, 2, torus.growth, torus.fit)
    assert rep.value.real == pytest.approx(2 * pi, rel=1e-6)
    assert abs(zeta_residue(torus.identity(), torus.D, 1, torus.growth, torus.fit).value) < 1e-5


def test_sphere_identity_residue(sphere):
    rep = zeta_residue(sphere.identity(), sphere.D, 2, sphere.growth, sphere.fit)
    assert rep.value.real == pytest.approx(2.0, rel=1e-6)


def test_circle_identity_residue():
    m = circle_model(200)
    assert zeta_residue(m.identity(), m.D, 1, m.growth, m.fit).value.real == pytest.approx(1.0, rel=1e-8)


def test_residue_beyond_dimension_is_zero(torus):
    rep = zeta_residue(torus.identity(), torus.D, 3)
    assert rep.value == 0 and rep.flag is not None
    with pytest.raises(PreconditionError):
        zeta_residue(torus.identity(), torus.D, 0)


def test_finite_rank_has_no_residue_and_value_rank():
    m = circle_model(200)
    lam = m.D.eigenvalues
    # a rank-3 projection commuting with |D|
    d = np.zeros(lam.shape[0])
    d[np.argsort(np.abs(lam))[:3]] = 1.0
    P = Op.diag(m.trunc, d)
    assert abs(zeta_residue(P, m.D, 1, m.growth, m.fit).value) < 1e-8
    assert zeta_at_zero(P, m.D, m.growth, m.fit).real == pytest.approx(3.0, abs=1e-8)


def test_zero_operator(torus):
    z = Op.zeros(torus.trunc)
    assert zeta_at_zero(z, torus.D) == 0
    assert zeta_residue(z, torus.D, 2).value == 0


def test_sphere_grading_vanishes(sphere):
    g = sphere.gamma()
    for m in (1, 2):
        assert abs(zeta_residue(g, sphere.D, m, sphere.growth, sphere.fit).value) < 1e-10
    assert abs(zeta_at_zero(g, sphere.D, sphere.growth, sphere.fit)) < 1e-10


def test_psi_vanishes_beyond_dimension(torus):
    U = torus.generators["U"]
    dU = commutator_d(U, torus.D)
    assert psi((1, 0), 0, U, [dU, dU], torus.D) == 0
    assert psi((0, 0), 1, U, [dU, dU], torus.D) == 0
    with pytest.raises(PreconditionError):
        psi((0,), 0, U, [dU, dU], torus.D)


def test_psi_area_term_ratio(torus):
    # gamma u^-1 v^-1 du dv has constant symbol i e^{2 pi i theta}; the residue is
    # that constant times Res Tr(|D|^{-2z}) on one copy of H
    U, V = torus.generators["U"], torus.generators["V"]
    b0 = torus.monomial(-1, -1)
    ops = [commutator_d(U, torus.D), commutator_d(V, torus.D)]
    val = psi((0, 0), 0, b0, ops, torus.D, torus.gamma(), torus.growth, torus.fit)
    z2 = zeta_residue(torus.identity(), torus.D, 2, torus.growth, torus.fit).value
    assert val / z2 == pytest.approx(1j * np.exp(2j * pi * torus.theta), rel=1e-8)


def test_psi_mixed_F_term_vanishes(torus):
    U, V = torus.generators["U"], torus.generators["V"]
    F = sign_F(torus.D)
    b0 = torus.monomial(-1, -1)
    ops = [commutator_d(U, torus.D), F @ V]
    val = psi((0, 0), 0, b0, ops, torus.D, torus.gamma(), torus.growth, torus.fit)
    assert abs(val) < 1e-3
