from __future__ import annotations

from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdsindex.errors import PreconditionError, TruncationMismatch
from qdsindex.models import circle_model, nctorus_model
from qdsindex.operators import (
    DiracData,
    HilbertTruncation,
    Op,
    abs_pow,
    commutator_d,
    delta_pow,
    dirac_op,
    ell2,
    nabla_pow,
    number_op,
    rank_one,
    register_product,
    schwartz_phi,
    shift_power,
    sign_F,
    tensor,
)


def _random_setup(seed: int, dim: int = 4, lam=None):
    rng = np.random.default_rng(seed)
    h = HilbertTruncation(f"rand{seed}-{dim}", dim)
    if lam is None:
        lam = rng.uniform(-5, 5, size=dim)
    D = DiracData(h, np.asarray(lam, dtype=float), summability_p=1)
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return h, D, Op(h, A)


def test_commutator_identity_is_zero():
    h, D, _ = _random_setup(0)
    assert commutator_d(Op.identity(h), D).max_abs() == 0.0


def test_commutator_matches_dense_product():
    h, D, a = _random_setup(1, lam=[1, 2, 3, 4])
    Dm = np.diag([1.0, 2, 3, 4])
    want = Dm @ a.toarray() - a.toarray() @ Dm
    assert np.allclose(commutator_d(a, D).toarray(), want, atol=1e-13)


def test_delta_pow_zero_and_diagonal():
    h, D, a = _random_setup(2)
    assert np.array_equal(delta_pow(a, D, 0).toarray(), a.toarray())
    diag = Op.diag(h, [1.0, 2.0, 3.0, 4.0])
    assert delta_pow(diag, D, 2).max_abs() == 0.0


def test_delta_cubed_is_iterated_commutator():
    h, D, a = _random_setup(3)
    M = np.diag(D.mu)
    want = a.toarray()
    for _ in range(3):
        want = M @ want - want @ M
    assert np.allclose(delta_pow(a, D, 3).toarray(), want, rtol=1e-12, atol=1e-10)


def test_nabla_one_is_anticommutator_of_delta():
    h, D, a = _random_setup(4)
    M = np.diag(D.mu)
    d = delta_pow(a, D, 1).toarray()
    assert np.allclose(nabla_pow(a, D, 1).toarray(), M @ d + d @ M, atol=1e-12)
    assert np.array_equal(nabla_pow(a, D, 0).toarray(), a.toarray())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_nabla_binomial_expansion(seed, n):
    # nabla^n(T) = sum_k 2^{n-k} C(n,k) delta^{n+k}(T) |D|^{n-k}
    h, D, a = _random_setup(seed, dim=5)
    M = np.diag(D.mu)
    want = sum(
        2 ** (n - k) * comb(n, k) * delta_pow(a, D, n + k).toarray() @ np.linalg.matrix_power(M, n - k)
        for k in range(n + 1)
    )
    got = nabla_pow(a, D, n).toarray()
    assert np.allclose(got, want, rtol=1e-10, atol=1e-8 * np.abs(want).max())


def test_sign_and_kernel_convention_on_circle():
    m = circle_model(10)
    F = sign_F(m.D).diagonal().real
    lam = m.D.eigenvalues
    assert np.all(F[lam > 0] == 1)
    assert np.all(F[lam < 0] == -1)
    assert np.all(F[lam == 0] == 1)


def test_abs_pow():
    h, D, _ = _random_setup(5)
    assert np.allclose(abs_pow(D, 0).toarray(), np.eye(4))
    assert np.allclose(abs_pow(D, -2).diagonal(), 1 / D.mu**2)


def test_dirac_op_is_F_times_abs():
    h, D, _ = _random_setup(6)
    assert np.allclose(dirac_op(D).toarray(), sign_F(D).toarray() @ abs_pow(D, 1).toarray())


def test_torus_commutator_matches_dense_product():
    m = nctorus_model(Lambda=8)
    mono = m.monomial(2, -1).toarray()
    Dm = dirac_op(m.D).toarray()
    got = commutator_d(m.monomial(2, -1), m.D).toarray()
    assert np.allclose(got, Dm @ mono - mono @ Dm, atol=1e-12)
    assert commutator_d(m.identity(), m.D).max_abs() == 0.0


def test_shift_identities():
    M = 8
    assert np.allclose(shift_power(M, 0).toarray(), np.eye(M))
    S = shift_power(M, 1).toarray()
    defect = np.zeros((M, M))
    defect[M - 1, M - 1] = 1
    assert np.allclose(S @ S.conj().T, np.eye(M) - defect)
    assert np.allclose(shift_power(M, -2).toarray(), np.linalg.matrix_power(S.conj().T, 2))
    with pytest.raises(PreconditionError):
        shift_power(M, M)


def test_number_op_on_rank_one():
    M = 6
    N, P = number_op(M), rank_one(M, 3, 3)
    assert np.allclose((N @ P).toarray(), 3 * P.toarray())
    with pytest.raises(PreconditionError):
        rank_one(M, 6, 0)


def test_schwartz_phi_examples():
    M = 40
    p0 = rank_one(M, 0, 0)
    assert schwartz_phi(p0, 0) == 1
    assert all(schwartz_phi(p0, r) == 0 for r in range(1, 5))
    p1 = rank_one(M, 1, 1)
    for r in range(5):
        assert schwartz_phi(p1, r) == pytest.approx((-1) ** r / factorial(r))
    k = Op.diag(ell2(M), 2.0 ** -np.arange(M))
    assert schwartz_phi(k, 1).real == pytest.approx(-2.0, abs=1e-9)


def test_tensor_basics():
    rng = np.random.default_rng(7)
    h = HilbertTruncation("t3", 3)
    l2 = ell2(4)
    register_product(h, l2)
    assert np.allclose(tensor(Op.identity(h), Op.identity(l2)).toarray(), np.eye(12))
    a = Op(h, rng.normal(size=(3, 3)))
    c = Op(l2, rng.normal(size=(4, 4)))
    assert tensor(a, c).trace() == pytest.approx(a.trace() * c.trace())
    F = Op.diag(h, [1.0, -1.0, 1.0])
    S = shift_power(4, 1)
    T = tensor(F, S).toarray()
    for i in range(3):
        for n in range(4):
            for j in range(3):
                for mm in range(4):
                    want = F.toarray()[i, j] * (1.0 if n == mm - 1 else 0.0)
                    assert T[i * 4 + n, j * 4 + mm] == want


def test_tensor_requires_registered_product():
    a = Op.identity(HilbertTruncation("lonely", 2))
    with pytest.raises(TruncationMismatch):
        tensor(a, Op.identity(ell2(5)))


def test_mismatched_truncations_rejected():
    a = Op.identity(HilbertTruncation("h1", 2))
    b = Op.identity(HilbertTruncation("h2", 2))
    with pytest.raises(TruncationMismatch):
        a @ b
