"""Truncated operators written in the eigenbasis of a Dirac operator.

Every operator carries the truncation it acts on.  Because the Dirac operator
is diagonal in the chosen basis, the derivations ``[D, .]``, ``[|D|, .]`` and
``[D^2, .]`` act entrywise and are computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import PreconditionError, TruncationMismatch


@dataclass(frozen=True, eq=False)
class HilbertTruncation:
    """A finite set of basis labels standing in for a separable Hilbert space."""

    id: str
    dim: int
    labels: Sequence | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim < 0:
            raise PreconditionError("dimension must be non-negative")
        if self.labels is not None and len(self.labels) != self.dim:
            raise PreconditionError("label count does not match dimension")

    def __eq__(self, other):
        if not isinstance(other, HilbertTruncation):
            return NotImplemented
        return self is other or (self.id == other.id and self.dim == other.dim)

    def __hash__(self):
        return hash((self.id, self.dim))


def _as_csr(mat, dim: int) -> sp.csr_matrix:
    m = sp.csr_matrix(mat, dtype=np.complex128)
    if m.shape != (dim, dim):
        raise PreconditionError(f"matrix shape {m.shape} does not match dimension {dim}")
    return m


class Op:
    """A sparse complex operator on a :class:`HilbertTruncation`."""

    __slots__ = ("trunc", "mat")

    def __init__(self, trunc: HilbertTruncation, mat):
        self.trunc = trunc
        self.mat = _as_csr(mat, trunc.dim)

    # construction helpers
    @classmethod
    def zeros(cls, trunc: HilbertTruncation) -> "Op":
        return cls(trunc, sp.csr_matrix((trunc.dim, trunc.dim), dtype=np.complex128))

    @classmethod
    def identity(cls, trunc: HilbertTruncation) -> "Op":
        return cls(trunc, sp.identity(trunc.dim, dtype=np.complex128, format="csr"))

    @classmethod
    def diag(cls, trunc: HilbertTruncation, values) -> "Op":
        return cls(trunc, sp.diags(np.asarray(values, dtype=np.complex128), format="csr"))

    def _check(self, other: "Op") -> None:
        if not isinstance(other, Op):
            raise TypeError(f"expected Op, got {type(other).__name__}")
        if self.trunc != other.trunc:
            raise TruncationMismatch(f"{self.trunc.id} (dim {self.trunc.dim}) vs {other.trunc.id} (dim {other.trunc.dim})")

    def __add__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.trunc, self.mat + other.mat)

    def __sub__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.trunc, self.mat - other.mat)

    def __neg__(self) -> "Op":
        return Op(self.trunc, -self.mat)

    def __matmul__(self, other: "Op") -> "Op":
        self._check(other)
        return Op(self.trunc, self.mat @ other.mat)

    def __mul__(self, scalar) -> "Op":
        if isinstance(scalar, Op):
            raise TypeError("use @ for operator products")
        return Op(self.trunc, self.mat * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Op":
        return Op(self.trunc, self.mat / complex(scalar))

    @property
    def H(self) -> "Op":
        """Hermitian adjoint."""
        return Op(self.trunc, self.mat.conj().T)

    def diagonal(self) -> np.ndarray:
        return self.mat.diagonal()

    def trace(self) -> complex:
        return complex(self.mat.diagonal().sum())

    def toarray(self) -> np.ndarray:
        return self.mat.toarray()

    @property
    def nnz(self) -> int:
        return self.mat.nnz

    def max_abs(self) -> float:
        return float(np.abs(self.mat.data).max()) if self.mat.nnz else 0.0

    def restrict(self, mask: np.ndarray) -> sp.csr_matrix:
        """Return the block of the matrix on the basis vectors selected by ``mask``."""
        idx = np.flatnonzero(mask)
        return self.mat[idx][:, idx]

    def __repr__(self) -> str:
        return f"Op({self.trunc.id}, dim={self.trunc.dim}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class DiracData:
    """Eigenvalues of a self-adjoint Dirac operator on a truncation.

    ``kernel_shift`` replaces the zero eigenvalues when forming ``|D|`` so that
    ``|D|`` is invertible; the sign operator is ``+1`` on the kernel.
    ``spectral_cutoff`` is the largest ``|lambda|`` up to which the truncation
    contains the complete spectrum; it defaults to the largest eigenvalue.
    """

    trunc: HilbertTruncation
    eigenvalues: np.ndarray
    summability_p: int
    kernel_shift: float = 1.0
    spectral_cutoff: float | None = None

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=np.float64)
        if lam.shape != (self.trunc.dim,):
            raise PreconditionError("one eigenvalue per basis vector is required")
        if self.kernel_shift < 0:
            raise PreconditionError("kernel_shift must be non-negative")
        object.__setattr__(self, "eigenvalues", lam)
        mu = np.abs(lam)
        mu[lam == 0] = self.kernel_shift
        object.__setattr__(self, "_mu", mu)
        object.__setattr__(self, "_sign", np.where(lam >= 0, 1.0, -1.0))
        if self.spectral_cutoff is None:
            object.__setattr__(self, "spectral_cutoff", float(mu.max()) if mu.size else 0.0)

    @property
    def mu(self) -> np.ndarray:
        """Eigenvalues of ``|D|`` (with the kernel shift applied)."""
        return self._mu

    @property
    def sign(self) -> np.ndarray:
        return self._sign

    @property
    def p(self) -> int:
        return self.summability_p


@dataclass(frozen=True, eq=False)
class Grading:
    """A grading operator, stored like every other operator in the eigenbasis of D.

    In that basis the grading is not diagonal: it exchanges the eigenvectors of
    ``lambda`` and ``-lambda``.
    """

    op: Op

    def validate(self, D: "DiracData", tol: float = 1e-12) -> float:
        return check_grading(D, self.op, tol)


@dataclass(eq=False)
class SpectralTriple:
    """A truncated spectral triple: Dirac data plus an optional grading."""

    D: DiracData
    grading: Grading | None = None
    name: str = ""

    @property
    def trunc(self) -> HilbertTruncation:
        return self.D.trunc

    @property
    def p(self) -> int:
        return self.D.summability_p

    @property
    def even(self) -> bool:
        return self.grading is not None

    def identity(self) -> Op:
        return Op.identity(self.trunc)

    def gamma_or_one(self) -> Op:
        return self.grading.op if self.grading is not None else self.identity()


def _entrywise(D: DiracData, a: Op, weight: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Op:
    if a.trunc != D.trunc:
        raise TruncationMismatch(f"{a.trunc.id} vs {D.trunc.id}")
    coo = a.mat.tocoo()
    data = coo.data * weight(coo.row, coo.col)
    out = sp.csr_matrix((data, (coo.row, coo.col)), shape=coo.shape)
    out.eliminate_zeros()
    return Op(a.trunc, out)


def commutator_d(a: Op, D: DiracData) -> Op:
    """``[D, a]``, i.e. ``(lambda_i - lambda_j) a_ij``."""
    lam = D.eigenvalues
    return _entrywise(D, a, lambda i, j: lam[i] - lam[j])


def delta_pow(a: Op, D: DiracData, x: int = 1) -> Op:
    """``delta^x(a)`` with ``delta = [|D|, .]``."""
    if x < 0:
        raise PreconditionError("x must be non-negative")
    mu = D.mu
    return _entrywise(D, a, lambda i, j: (mu[i] - mu[j]) ** x)


def nabla_pow(a: Op, D: DiracData, k: int = 1) -> Op:
    """``nabla^k(a)`` with ``nabla = [|D|^2, .]``."""
    if k < 0:
        raise PreconditionError("k must be non-negative")
    mu2 = D.mu ** 2
    return _entrywise(D, a, lambda i, j: (mu2[i] - mu2[j]) ** k)


def sign_F(D: DiracData) -> Op:
    """The phase ``F`` of ``D`` (``+1`` on the kernel)."""
    return Op.diag(D.trunc, D.sign)


def abs_pow(D: DiracData, s: float) -> Op:
    """``|D|^s`` with the kernel shift applied."""
    if s < 0 and np.any(D.mu == 0):
        raise PreconditionError("negative power of |D| with an unshifted kernel")
    return Op.diag(D.trunc, D.mu ** float(s))


def dirac_op(D: DiracData) -> Op:
    return Op.diag(D.trunc, D.eigenvalues)


def grading_op(g: "Grading | SpectralTriple") -> Op:
    """The grading operator of a :class:`Grading` or of an even triple."""
    if isinstance(g, SpectralTriple):
        if g.grading is None:
            raise PreconditionError(f"triple {g.name!r} is odd and has no grading")
        g = g.grading
    return g.op


def check_grading(D: DiracData, gamma: Op, tol: float = 1e-12) -> float:
    """Return the largest violation of ``g^2 = 1``, ``g* = g`` and ``gD = -Dg``."""
    one = Op.identity(D.trunc)
    Dop = dirac_op(D)
    errs = [
        (gamma @ gamma - one).max_abs(),
        (gamma - gamma.H).max_abs(),
        (gamma @ Dop + Dop @ gamma).max_abs(),
    ]
    worst = max(errs)
    if worst > tol:
        raise PreconditionError(f"grading violates its relations by {worst:.3e}")
    return worst


# ---------------------------------------------------------------------------
# operators on a truncation of l^2(N)


@lru_cache(maxsize=None)
def ell2(M: int) -> HilbertTruncation:
    """The span of ``e_0, ..., e_{M-1}`` in ``l^2(N)``."""
    if M < 1:
        raise PreconditionError("M must be at least 1")
    return HilbertTruncation(f"l2N[{M}]", M, tuple(range(M)))


def shift_power(M: int, n: int) -> Op:
    """``S^n`` for ``n >= 0`` and ``(S*)^{-n}`` otherwise, where ``S e_k = e_{k-1}``."""
    if abs(n) >= M:
        raise PreconditionError(f"|n| = {abs(n)} must be smaller than M = {M}")
    # (S^n)_{ij} = 1 exactly when i = j - n, for either sign of n
    return Op(ell2(M), sp.eye(M, M, k=n, dtype=np.complex128, format="csr"))


def number_op(M: int) -> Op:
    """``N e_k = k e_k``."""
    return Op.diag(ell2(M), np.arange(M, dtype=np.float64))


def rank_one(M: int, i: int, j: int) -> Op:
    """The matrix unit ``|e_i><e_j|``."""
    if not (0 <= i < M and 0 <= j < M):
        raise PreconditionError(f"indices ({i}, {j}) outside 0..{M - 1}")
    return Op(ell2(M), sp.csr_matrix(([1.0], ([i], [j])), shape=(M, M)))


def schwartz_phi(k: Op, r: int) -> complex:
    """``(-1)^r / r! * sum_i k_ii i^r`` with ``0^0 = 1``."""
    if r < 0:
        raise PreconditionError("r must be non-negative")
    d = k.diagonal()
    i = np.arange(d.shape[0], dtype=np.float64)
    return complex((-1) ** r / factorial(r) * np.sum(d * i ** r))


# ---------------------------------------------------------------------------
# tensor products

_PRODUCTS: dict[tuple[str, int, str, int], HilbertTruncation] = {}


def register_product(h1: HilbertTruncation, h2: HilbertTruncation) -> HilbertTruncation:
    """Register (or fetch) the product truncation ``h1 x h2`` with row-major labels."""
    key = (h1.id, h1.dim, h2.id, h2.dim)
    prod = _PRODUCTS.get(key)
    if prod is None:
        prod = HilbertTruncation(f"({h1.id})x({h2.id})", h1.dim * h2.dim)
        _PRODUCTS[key] = prod
    return prod


def product_of(h1: HilbertTruncation, h2: HilbertTruncation) -> HilbertTruncation:
    key = (h1.id, h1.dim, h2.id, h2.dim)
    try:
        return _PRODUCTS[key]
    except KeyError:
        raise TruncationMismatch(f"no product truncation registered for {h1.id} and {h2.id}") from None


def tensor(a: Op, c: Op) -> Op:
    """``a (x) c`` on the registered product truncation."""
    prod = product_of(a.trunc, c.trunc)
    return Op(prod, sp.kron(a.mat, c.mat, format="csr"))
