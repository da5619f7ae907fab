from __future__ import annotations

from math import pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdsindex.errors import PreconditionError
from qdsindex.models import circle_model, nctorus_model, sphere_model
from qdsindex.operators import Op, abs_pow, dirac_op, ell2, number_op, rank_one, sign_F, tensor
from qdsindex.qds import (
    direct_psi,
    direct_value_at_zero,
    direct_zeta0,
    shift_defect,
    sigma2_phi0,
    sigma2_psi_mixed,
    sigma2_psi_shifts,
    suspend_triple,
    value_at_zero_bk,
    zeta0_bk,
    zeta0_s1,
    zeta0_series,
    zeta0_value_at_zero,
)
from qdsindex.residues import zeta_residue


@pytest.fixture(scope="module")
def circle():
    return suspend_triple(circle_model(200), 40)


@pytest.fixture(scope="module")
def torus():
    return suspend_triple(nctorus_model(), 40)


@pytest.fixture(scope="module")
def sphere():
    return suspend_triple(sphere_model(40), 40)


def test_suspended_dirac_is_kronecker_sum():
    base = circle_model(6)
    M = 5
    T = suspend_triple(base, M)
    D = dirac_op(base.D).toarray()
    F = sign_F(base.D).toarray()
    N = number_op(M).toarray()
    want = np.kron(D, np.eye(M)) + np.kron(F, N)
    # off the kernel of D the suspended operator is D x 1 + F x N exactly;
    # on the kernel |D| is replaced by the unit shift, as on the base
    off = np.repeat(base.D.eigenvalues != 0, M)
    got = dirac_op(T.D0).toarray()
    assert np.allclose(got[np.ix_(off, off)], want[np.ix_(off, off)])
    assert np.allclose(got[np.ix_(~off, ~off)], np.diag(1.0 + np.arange(M)))
    absD = np.kron(abs_pow(base.D, 1).toarray(), np.eye(M)) + np.kron(np.eye(D.shape[0]), N)
    assert np.allclose(abs_pow(T.D0, 1).toarray(), absD)
    assert T.p == base.p + 1


def test_suspension_rejects_tiny_M():
    with pytest.raises(PreconditionError):
        suspend_triple(circle_model(10), 1)


def test_unit_constants_on_torus(torus):
    assert zeta0_s1(torus) == pytest.approx(pi / 6)
    assert zeta0_series(2, torus) == pytest.approx(pi)
    assert zeta0_series(3, torus) == pytest.approx(pi)


def test_unit_constants_match_direct_route(torus):
    one = torus.unit().realize()
    for s in (1, 2, 3):
        rep = direct_zeta0(one, s, torus)
        assert abs(rep.value - zeta0_series(s, torus)) <= max(2 * rep.error_budget, 1e-6)
    val, err = direct_value_at_zero(one, torus)
    assert abs(val - zeta0_value_at_zero(torus)) <= max(2 * err, 1e-6)


def test_circle_F_tensor_one(circle):
    # the +1 sign on the kernel of D leaves one unmatched tower of modes
    assert zeta0_s1(circle, "F") == pytest.approx(0.5)
    rep = direct_zeta0(circle.f_unit().realize(), 1, circle)
    assert rep.value == pytest.approx(0.5, abs=1e-8)


def test_rank_one_in_N_reduces_to_base(torus):
    # phi_y(p_0) = delta_{y0}, so b x p_0 carries exactly the base residues
    p0 = rank_one(torus.M, 0, 0)
    b = torus.base.monomial(0, 0)
    base = zeta_residue(b, torus.base.D, 2, torus.base.growth, torus.base.fit).value
    assert zeta0_bk(2, b, p0, torus) == pytest.approx(base, rel=1e-10)
    assert zeta0_bk(3, b, p0, torus) == 0


def test_zero_element(torus):
    z = Op.zeros(torus.base.trunc)
    k = rank_one(torus.M, 1, 1)
    assert zeta0_bk(1, z, k, torus) == 0
    assert value_at_zero_bk(z, k, torus)[0] == 0


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10_000))
def test_zeta0_bk_matches_direct_on_circle(circle, seed):
    rng = np.random.default_rng(seed)
    base = circle.base
    b = base.identity()
    w = rng.uniform(0.1, 1.0, size=4)
    k = Op.diag(ell2(circle.M), np.concatenate([w, np.zeros(circle.M - 4)]))
    rep = direct_zeta0(tensor(b, k), 1, circle)
    assert zeta0_bk(1, b, k, circle) == pytest.approx(rep.value, abs=max(2 * rep.error_budget, 1e-7))


def test_shifts_vanish_off_balance(torus):
    assert sigma2_psi_shifts([0], [-1, 2], torus) == 0
    assert sigma2_psi_shifts([0, 0], [1, 1, -1], torus) == 0


def test_shift_pair_on_circle(circle):
    val = sigma2_psi_shifts([0], [-1, 1], circle)
    rep = direct_psi([0], [circle.shift(-1), circle.shift(1)], circle)
    assert val == pytest.approx(-0.5)
    assert abs(rep.value - val) <= max(2 * rep.error_budget, 1e-6)


def test_shift_defect():
    assert shift_defect([1, -1]).tolist() == [0.0, 0.0, 0.0]
    assert shift_defect([-1, 1]).tolist() == [1.0, 0.0, 0.0]


def test_phi0_vanishes_on_even_models(sphere, torus):
    for T in (sphere, torus):
        p0 = rank_one(T.M, 0, 0)
        gens = list(T.base.generators.values())
        assert abs(sigma2_phi0(T.ak(gens[0], p0), T)) < 1e-8
        assert sigma2_phi0(T.shift(2), T) == 0
        assert abs(sigma2_phi0(T.unit(), T)) < 1e-8


def test_phi0_needs_even_base(circle):
    with pytest.raises(PreconditionError):
        sigma2_phi0(circle.unit(), circle)
    with pytest.raises(PreconditionError):
        circle.gamma_unit()


def test_preconditions(torus):
    with pytest.raises(PreconditionError):
        torus.shift(torus.M)
    with pytest.raises(PreconditionError):
        sigma2_psi_mixed([0], [torus.unit(), torus.shift(1)], torus)
    p0 = rank_one(torus.M, 0, 0)
    e = torus.ak(torus.base.identity(), p0)
    with pytest.raises(PreconditionError):
        sigma2_psi_mixed([0, 0], [e, e], torus)
    with pytest.raises(PreconditionError):
        torus.ak(torus.base.identity(), rank_one(torus.M + 1, 0, 0))
