"""The quantum double suspension of a truncated spectral triple.

The suspended Dirac operator is ``D0 = (F x 1)(|D| x 1 + 1 x N)`` on ``H x l^2(N)``.
Every residue of the suspension is available twice: through transfer formulas
that only use base residues and the coefficients ``phi_y`` of the ``l^2(N)``
factor, and directly, by fitting the heat trace on the product truncation.

All transfer formulas follow from the factorization
``t^{p+1} Tr((b x k) e^{-t|D0|}) = t^p Tr(b e^{-t|D|}) * t Tr(k e^{-tN})``
and the residue dictionary ``zeta^{(m)}(b) = b_{p-m} / (2 Gamma(m))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb
from math import gamma as Gamma
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import FitError, PreconditionError
from .models.base import ModelInstance
from .operators import (
    DiracData,
    HilbertTruncation,
    Op,
    commutator_d,
    delta_pow,
    ell2,
    number_op,
    register_product,
    schwartz_phi,
    shift_power,
    sign_F,
    tensor,
)
from .residues import ResidueReport, abs_expansion, zeta_at_zero, zeta_residue
from .series import AsymptoticSeries, FitConfig, Growth, exact_expansion, merge_diagonal, n_coefficients, trace_expansion

# shifts used by suspended elements stay this far from the top of l^2(N)
SHIFT_MARGIN = 4

KINDS = ("AK", "SHIFT", "F_UNIT", "GAMMA_UNIT")


@dataclass(frozen=True, eq=False)
class SuspElem:
    """An element ``a x c`` of the suspended algebra (or of its operator envelope).

    ``a`` acts on the base truncation and ``c`` on ``l^2(N)``; ``schwartz``
    records whether ``c`` is a smooth compact (so that ``Tr(k e^{-tN})`` has
    no pole).  ``shift`` is the exponent ``n`` of ``1 x S^n`` for that kind.
    """

    kind: str
    a: Op
    c: Op
    schwartz: bool
    shift: int | None = None

    def realize(self) -> Op:
        return tensor(self.a, self.c)


@dataclass(eq=False)
class SuspendedTriple:
    """``(Sigma^2 A, H x l^2(N), D0, gamma x 1)`` on the truncation ``base x {0..M-1}``."""

    base: ModelInstance
    M: int
    product: object
    D0: DiracData
    gamma0: Op | None
    growth: Growth
    fit: FitConfig
    base_series: dict[str, AsymptoticSeries]
    n: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.D0.summability_p

    @property
    def even(self) -> bool:
        return self.gamma0 is not None

    # constants in the naming of the transfer formulas: u (unit), v (F), w (gamma)
    def constant(self, which: str, r: int) -> complex:
        return self.base_series[which].coeff(r)

    @property
    def u_p(self) -> complex:
        return self.constant("unit", self.base.p)

    @property
    def v_p(self) -> complex:
        return self.constant("F", self.base.p)

    @property
    def w_p(self) -> complex:
        return self.constant("gamma", self.base.p) if self.even else 0j

    @property
    def u_p1(self) -> complex:
        return self.constant("unit", self.base.p + 1)

    @property
    def w_p1(self) -> complex:
        return self.constant("gamma", self.base.p + 1) if self.even else 0j

    # element constructors
    def ak(self, a: Op, k: Op) -> SuspElem:
        if a.trunc != self.base.trunc or k.trunc != ell2(self.M):
            raise PreconditionError("a must act on the base and k on l^2(N) of the suspension")
        return SuspElem("AK", a, k, True)

    def shift(self, n: int) -> SuspElem:
        if abs(n) > self.M - 1 - SHIFT_MARGIN:
            raise PreconditionError(f"shift {n} too large for M = {self.M}")
        return SuspElem("SHIFT", self.base.identity(), shift_power(self.M, n), False, shift=int(n))

    def unit(self) -> SuspElem:
        return self.shift(0)

    def f_unit(self) -> SuspElem:
        return SuspElem("F_UNIT", self.base.F(), Op.identity(ell2(self.M)), False)

    def gamma_unit(self) -> SuspElem:
        if not self.even:
            raise PreconditionError("the base triple is odd")
        return SuspElem("GAMMA_UNIT", self.base.gamma(), Op.identity(ell2(self.M)), False)

    def realize(self, e: SuspElem) -> Op:
        return e.realize()


def suspension_growth(g: Growth) -> Growth:
    """Counting bound for ``|D0|``: ``sum_n C (lambda - n)^q <= C (1 + 1/(q+1)) lambda^(q+1)``."""
    return Growth(C=g.C * (1.0 + 1.0 / (g.q + 1.0)), q=g.q + 1.0)


def _base_series(base: ModelInstance, which: str, R: int) -> AsymptoticSeries:
    desc = base.descriptors.get(which)
    if desc is not None:
        return exact_expansion(desc, R)
    op = {"unit": base.identity, "F": base.F, "gamma": base.gamma}[which]()
    return trace_expansion(op, base.D, base.growth, base.fit.with_(kernel="abs"), R=R)


def suspend_triple(base: ModelInstance, M: int = 40, fit: FitConfig | None = None) -> SuspendedTriple:
    """Build the suspension of ``base`` with ``l^2(N)`` truncated to ``e_0..e_{M-1}``."""
    if M < 2:
        raise PreconditionError("M must be at least 2")
    D = base.D
    n = np.arange(M, dtype=np.float64)
    prod = register_product(base.trunc, ell2(M))
    lam0 = (D.sign[:, None] * (D.mu[:, None] + n[None, :])).ravel()
    margin = SHIFT_MARGIN if M > 2 * SHIFT_MARGIN else 0
    cutoff = min(float(D.spectral_cutoff), float(D.mu.min()) + M - 1 - margin)
    # kernel_shift is irrelevant: mu_i + n > 0 everywhere
    D0 = DiracData(prod, lam0, summability_p=D.p + 1, kernel_shift=1.0, spectral_cutoff=cutoff)
    gamma0 = tensor(base.gamma(), Op.identity(ell2(M))) if base.even else None
    R = D.p + 3
    series = {"unit": _base_series(base, "unit", R), "F": _base_series(base, "F", R)}
    if base.even:
        series["gamma"] = _base_series(base, "gamma", R)
    return SuspendedTriple(
        base=base,
        M=M,
        product=prod,
        D0=D0,
        gamma0=gamma0,
        growth=suspension_growth(base.growth),
        fit=fit or base.fit,
        base_series=series,
        n=np.array([complex(c) for c in n_coefficients(D.p + 3).to_floats()]),
    )


# ---------------------------------------------------------------------------
# base residues


def _residues_of_series(s: AsymptoticSeries, p: int) -> tuple[np.ndarray, np.ndarray]:
    """``zeta^{(j)}`` for ``j = 0..p`` (index 0 unused) and their error budgets."""
    z = np.zeros(p + 1, dtype=np.complex128)
    e = np.zeros(p + 1)
    for j in range(1, p + 1):
        z[j] = s.coeff(p - j) / (2 * Gamma(j))
        e[j] = s.error_budget(p - j) / (2 * Gamma(j))
    return z, e


def base_expansion(b: Op, T: SuspendedTriple) -> AsymptoticSeries:
    """``t^p Tr(b e^{-t|D|})`` on the base, ``b_0..b_p``, by the model's fit."""
    return abs_expansion(b, T.base.D, T.base.growth, T.base.fit)


def _zeta0_bk_from(zb: np.ndarray, eb: np.ndarray, s: int, k: Op, p: int, m: int) -> tuple[complex, float]:
    if s < 1:
        raise PreconditionError("s must be at least 1")
    if s > m:
        return 0j, 0.0
    val, err = 0j, 0.0
    for y in range(0, m - s + 1):
        if s + y > p:
            break
        phi = schwartz_phi(k, y)
        w = Gamma(s + y) / Gamma(s)
        val += w * zb[s + y] * phi
        err += w * eb[s + y] * abs(phi)
    return val, err


def zeta0_bk_report(s: int, b: Op, k: Op, T: SuspendedTriple, m: int | None = None) -> ResidueReport:
    """``zeta_{D0}^{(s)}(b x k) = (1/Gamma(s)) sum_{y=0}^{m-s} Gamma(s+y) zeta_D^{(s+y)}(b) phi_y(k)``."""
    p = T.base.p
    m = p if m is None else int(m)
    if s > m:
        return ResidueReport(s, 0j, "formula", 0.0, flag="beyond filtration degree")
    zb, eb = _residues_of_series(base_expansion(b, T), p)
    val, err = _zeta0_bk_from(zb, eb, s, k, p, m)
    return ResidueReport(s, val, "formula", err)


def zeta0_bk(s: int, b: Op, k: Op, T: SuspendedTriple, m: int | None = None) -> complex:
    return zeta0_bk_report(s, b, k, T, m).value


# ---------------------------------------------------------------------------
# the unit, F and gamma of the base tensored with 1


def _which_series(T: SuspendedTriple, which: str) -> AsymptoticSeries:
    if which not in ("unit", "F", "gamma"):
        raise PreconditionError(f"which must be unit, F or gamma, not {which!r}")
    try:
        return T.base_series[which]
    except KeyError:
        raise PreconditionError(f"no {which} constants for an odd base") from None


def _tilde(T: SuspendedTriple, which: str, r: int) -> complex:
    """Coefficient of ``t^r`` in ``t^{p+1} Tr((X x 1) e^{-t|D0|})`` (Cauchy product with ``n``)."""
    s = _which_series(T, which)
    if r > s.R or r > T.n.size - 1:
        raise PreconditionError(f"the {which} constants stop before order {r}")
    return complex(sum(T.n[y] * s.coeff(r - y) for y in range(r + 1)))


def zeta0_series(s: int, T: SuspendedTriple, which: str = "unit") -> complex:
    """``zeta_{D0}^{(s)}(X x 1)`` for ``X`` the unit, ``F`` or ``gamma``, ``1 <= s <= p+1``.

    For ``s >= 2`` this is ``(1/Gamma(s)) sum_{y=0}^{p+1-s} Gamma(s+y-1) zeta_D^{(s+y-1)}(X) n_y``;
    ``s = 1`` needs the finite part ``u_p`` as well (see :func:`zeta0_s1`).
    """
    p = T.base.p
    if not 1 <= s <= p + 1:
        raise PreconditionError(f"s must lie in 1..{p + 1}")
    if s == 1:
        return zeta0_s1(T, which)
    zb, _ = _residues_of_series(_which_series(T, which), p)
    val = 0j
    for y in range(0, p + 2 - s):
        val += Gamma(s + y - 1) * zb[s + y - 1] * T.n[y]
    return complex(val / Gamma(s))


def zeta0_unit(s: int, T: SuspendedTriple) -> complex:
    if not 2 <= s <= T.base.p + 1:
        raise PreconditionError(f"s must lie in 2..{T.base.p + 1}")
    return zeta0_series(s, T, "unit")


def zeta0_F(s: int, T: SuspendedTriple) -> complex:
    if not 2 <= s <= T.base.p + 1:
        raise PreconditionError(f"s must lie in 2..{T.base.p + 1}")
    return zeta0_series(s, T, "F")


def zeta0_s1(T: SuspendedTriple, which: str = "unit") -> complex:
    """``zeta_{D0}^{(1)}(X x 1) = n_0 u_p / 2 + sum_{y=1}^{p} Gamma(y) zeta_D^{(y)}(X) n_y``."""
    p = T.base.p
    s = _which_series(T, which)
    zb, _ = _residues_of_series(s, p)
    val = 0.5 * T.n[0] * s.coeff(p)
    for y in range(1, p + 1):
        val += Gamma(y) * zb[y] * T.n[y]
    return complex(val)


def zeta0_value_at_zero(T: SuspendedTriple, which: str = "unit") -> complex:
    """Value at ``z = 0`` of ``Tr((X x 1)|D0|^{-2z})``:
    ``n_0 u_{p+1} + n_1 u_p + sum_{y=2}^{p+1} 2 Gamma(y-1) zeta_D^{(y-1)}(X) n_y``."""
    p = T.base.p
    s = _which_series(T, which)
    zb, _ = _residues_of_series(s, p)
    val = T.n[0] * s.coeff(p + 1) + T.n[1] * s.coeff(p)
    for y in range(2, p + 2):
        val += 2 * Gamma(y - 1) * zb[y - 1] * T.n[y]
    return complex(val)


def value_at_zero_bk(b: Op, k: Op, T: SuspendedTriple) -> tuple[complex, float]:
    """``zeta_{D0}(0)(b x k) = b_p phi_0(k) + sum_{y=1}^p 2 Gamma(y) zeta_D^{(y)}(b) phi_y(k)``."""
    p = T.base.p
    s = base_expansion(b, T)
    zb, eb = _residues_of_series(s, p)
    phi0 = schwartz_phi(k, 0)
    val = s.coeff(p) * phi0
    err = s.error_budget(p) * abs(phi0)
    for y in range(1, p + 1):
        phi = schwartz_phi(k, y)
        val += 2 * Gamma(y) * zb[y] * phi
        err += 2 * Gamma(y) * eb[y] * abs(phi)
    return complex(val), float(err)


def sigma2_phi0(e: SuspElem, T: SuspendedTriple) -> complex:
    """``Sigma^2 phi_0(e)``, the value at zero of ``Tr((gamma x 1) e |D0|^{-2z})`` (even base only)."""
    if not T.even:
        raise PreconditionError("phi_0 of the suspension needs an even base")
    g = T.base.gamma()
    if e.kind == "AK":
        return value_at_zero_bk(g @ e.a, e.c, T)[0]
    if e.kind == "SHIFT":
        # Tr(S^n e^{-tN}) vanishes for n != 0
        return zeta0_value_at_zero(T, "gamma") if e.shift == 0 else 0j
    if e.kind == "GAMMA_UNIT":
        return zeta0_value_at_zero(T, "unit")
    if e.kind == "F_UNIT":
        # gamma F has zero diagonal in the eigenbasis of D
        d = (g @ e.a).diagonal()
        if np.any(np.abs(d) > 1e-14):
            raise PreconditionError("gamma F has a diagonal part; use the direct route")
        return 0j
    raise PreconditionError(f"unknown element kind {e.kind!r}")


# ---------------------------------------------------------------------------
# psi on the suspension


def _split_d0(e: SuspElem, T: SuspendedTriple) -> list[tuple[Op, Op]]:
    """``d0(a x c) = da x c + Fa x Nc - aF x cN`` as a list of pairs."""
    D = T.base.D
    F = sign_F(D)
    N = number_op(T.M)
    return [
        (commutator_d(e.a, D), e.c),
        (F @ e.a, N @ e.c),
        (e.a @ F, -(e.c @ N)),
    ]


def _delta_N(c: Op, x: int) -> Op:
    if x == 0:
        return c
    n = np.arange(c.trunc.dim, dtype=np.float64)
    coo = c.mat.tocoo()
    w = (n[coo.row] - n[coo.col]) ** x
    return Op(c.trunc, sp.csr_matrix((coo.data * w, (coo.row, coo.col)), shape=c.mat.shape))


def sigma2_psi_mixed_report(x: Sequence[int], elems: Sequence[SuspElem], T: SuspendedTriple) -> ResidueReport:
    """``Sigma^2 psi_x^0(e_0, d0 e_1, ..., d0 e_n)`` through base residues.

    Each ``d0 e_i`` splits into three pairs and ``delta0^{x_i}`` distributes
    binomially over both tensor factors; the resulting ``b x k`` terms are
    summed with ``zeta_{D0}^{(n+|x|)}(b x k)`` from :func:`zeta0_bk`.  With an
    even base ``gamma`` multiplies ``a_0``.
    """
    x = [int(v) for v in x]
    n = len(elems) - 1
    if len(x) != n:
        raise PreconditionError("x needs one entry per differentiated element")
    if any(v < 0 for v in x):
        raise PreconditionError("x must be non-negative")
    if not any(e.schwartz for e in elems):
        raise PreconditionError("no smooth-compact factor; use sigma2_psi_shifts")
    s = n + sum(x)
    p = T.base.p
    if s > p:
        # zeta_{D0}^{(s)}(b x k) = 0 for s > p when k is a smooth compact
        return ResidueReport(s, 0j, "formula", 0.0, flag="beyond dimension spectrum")
    D = T.base.D
    a0 = elems[0].a if T.gamma0 is None else T.base.gamma() @ elems[0].a
    splits = [_split_d0(e, T) for e in elems[1:]]
    val, err = 0j, 0.0
    for js in product(range(3), repeat=n):
        for rs in product(*[range(xi + 1) for xi in x]):
            coef = 1
            b, k = a0, elems[0].c
            for i, (j, r) in enumerate(zip(js, rs)):
                ai, ci = splits[i][j]
                coef *= comb(x[i], r)
                b = b @ (delta_pow(ai, D, r) if r else ai)
                k = k @ _delta_N(ci, x[i] - r)
            if k.nnz == 0 or b.nnz == 0 or not np.any(k.diagonal()):
                continue
            zb, eb = _residues_of_series(base_expansion(b, T), p)
            v, e = _zeta0_bk_from(zb, eb, s, k, p, p)
            val += coef * v
            err += coef * e
    return ResidueReport(s, complex(val), "formula", float(err))


def sigma2_psi_mixed(x: Sequence[int], elems: Sequence[SuspElem], T: SuspendedTriple) -> complex:
    return sigma2_psi_mixed_report(x, elems, T).value


def shift_defect(m: Sequence[int]) -> np.ndarray:
    """Diagonal of ``1 - S^{m_0} ... S^{m_n}`` on ``l^2(N)`` when ``sum m = 0`` (finitely supported)."""
    span = sum(abs(v) for v in m)
    size = 2 * span + 2
    P = Op.identity(ell2(size))
    for v in m:
        P = P @ shift_power(size, v)
    d = 1.0 - P.diagonal().real
    return d[: span + 1]


def sigma2_psi_shifts(x: Sequence[int], m: Sequence[int], T: SuspendedTriple) -> complex:
    """``Sigma^2 psi_x^0(1 x S^{m_0}, d0(1 x S^{m_1}), ..., d0(1 x S^{m_n}))``.

    Uses ``delta0^{x} d0(1 x S^m) = (-m)^{x+1} F x S^m``.  The product
    ``S^{m_0} ... S^{m_n}`` is ``1 - Q`` with ``Q`` a finite diagonal projection
    when the exponents sum to zero, and has zero diagonal otherwise.
    """
    x = [int(v) for v in x]
    m = [int(v) for v in m]
    n = len(m) - 1
    if len(x) != n:
        raise PreconditionError("x needs one entry per differentiated element")
    if sum(m) != 0:
        return 0j
    s = n + sum(x)
    coef = 1
    for xi, mi in zip(x, m[1:]):
        coef *= (-mi) ** (xi + 1)
    if coef == 0:
        return 0j
    if T.even:
        which = "gamma" if n % 2 == 0 else "gammaF"
    else:
        which = "F" if n % 2 == 1 else "unit"
    if which == "gammaF":
        # gamma F has zero diagonal: every term vanishes
        return 0j
    p = T.base.p
    if s > p + 1:
        return 0j
    full = zeta0_series(s, T, which)
    q = shift_defect(m)
    if np.any(q):
        k = Op.diag(ell2(T.M), np.concatenate([q, np.zeros(T.M - q.size)]))
        zb, _ = _residues_of_series(_which_series(T, which), p)
        corr, _ = _zeta0_bk_from(zb, np.zeros(p + 1), s, k, p, p)
        full -= corr
    return complex(coef * full)


# ---------------------------------------------------------------------------
# direct route on the product truncation


def _effective_D0(op: Op, T: SuspendedTriple) -> DiracData:
    """``D0`` with the cutoff widened when ``op`` has no diagonal beyond the shift margin.

    Only the diagonal of ``op`` enters the heat trace. If it vanishes on every
    mode ``n`` close to the truncation edge, the missing modes ``n >= M`` carry
    no weight and the base cutoff is the only limit.
    """
    diag = np.abs(op.diagonal()).reshape(-1, T.M)
    scale = diag.max() if diag.size else 0.0
    edge = T.M - 1 - SHIFT_MARGIN
    if scale == 0.0 or edge < 1 or diag[:, edge:].max() > 1e-14 * scale:
        return T.D0
    cutoff = float(T.base.D.spectral_cutoff)
    if cutoff <= T.D0.spectral_cutoff:
        return T.D0
    return DiracData(T.product, T.D0.eigenvalues, T.D0.summability_p, kernel_shift=1.0, spectral_cutoff=cutoff)


def direct_expansion(op: Op, T: SuspendedTriple) -> AsymptoticSeries:
    key = id(op)
    hit = T._cache.get(key)
    if hit is not None and hit[0] is op:
        return hit[1]
    s = _adaptive_expansion(op, _effective_D0(op, T), T)
    T._cache[key] = (op, s)
    return s


# fit windows tried by the direct route; the suspended heat kernel does not
# factorise, so no single (R, t_max) is reliable on every model
DIRECT_T_MAX = (0.2, 0.25, 0.3, 0.4, 0.5)


def _adaptive_expansion(op: Op, D: DiracData, T: SuspendedTriple) -> AsymptoticSeries:
    """Pick the most stable fit among neighbouring ``(R, t_max)`` settings.

    Each candidate is compared with the fit using one more term on the same
    window; the pair with the smallest disagreement in ``b_0..b_p`` wins. Twice
    the larger of that disagreement and the change on the neighbouring windows
    is added to the coefficient errors.
    """
    p = T.p
    # every candidate samples the same diagonal: merge it over equal eigenvalues once
    d = np.where(D.mu <= D.spectral_cutoff, op.diagonal(), 0)
    weight = float(np.max(np.abs(d))) if d.size else 0.0
    w, mu = merge_diagonal(d, D.mu)
    Dm = DiracData(HilbertTruncation("merged", mu.size), mu, D.summability_p, spectral_cutoff=D.spectral_cutoff)
    fits: dict[tuple[int, float], AsymptoticSeries] = {}
    R0 = T.fit.R or p + 8
    for R in range(max(p + 2, R0 - 3), R0 + 4):
        for tm in sorted(set(DIRECT_T_MAX) | ({T.fit.t_max} if T.fit.t_max else set())):
            try:
                fits[(R, tm)] = abs_expansion(w, Dm, T.growth, T.fit.with_(R=R, t_max=tm), weight=weight)
            except FitError:
                continue
    tgrid = sorted({tm for _, tm in fits})
    best = None
    for (R, tm), s in fits.items():
        other = fits.get((R + 1, tm))
        if other is None:
            continue
        spread = np.abs(s.coeffs[: p + 1] - other.coeffs[: p + 1])
        if best is None or spread.max() < best[0].max():
            best = (spread, s, R, tm)
    if best is None:
        return abs_expansion(w, Dm, T.growth, T.fit, weight=weight)
    spread, s, R, tm = best
    # the neighbouring windows bound the sensitivity to t_max as well
    j = tgrid.index(tm)
    for tn in tgrid[max(j - 1, 0) : j + 2]:
        other = fits.get((R, tn))
        if other is not None and tn != tm:
            spread = np.maximum(spread, np.abs(s.coeffs[: p + 1] - other.coeffs[: p + 1]))
    err = np.array(s.coeff_err, dtype=np.float64)
    err[: p + 1] += 2.0 * spread
    return AsymptoticSeries(
        p=s.p,
        coeffs=s.coeffs,
        fit_residual=s.fit_residual,
        truncation_bound=s.truncation_bound,
        kernel=s.kernel,
        coeff_err=err,
        window=s.window,
        source="fit-adaptive",
    )


def direct_zeta0(op: Op, s: int, T: SuspendedTriple) -> ResidueReport:
    """``Res_{z=s/2} Tr(op |D0|^{-2z})`` fitted on the product truncation."""
    if s > T.p:
        return ResidueReport(s, 0j, "exact", 0.0, flag="beyond dimension spectrum")
    return zeta_residue(op, T.D0, s, series=direct_expansion(op, T))


def direct_value_at_zero(op: Op, T: SuspendedTriple) -> tuple[complex, float]:
    s = direct_expansion(op, T)
    return zeta_at_zero(op, T.D0, series=s), s.error_budget(T.p)


def direct_psi_operator(x: Sequence[int], elems: Sequence[SuspElem], T: SuspendedTriple) -> Op:
    """``(gamma x 1) e_0 delta0^{x_1}(d0 e_1) ... delta0^{x_n}(d0 e_n)`` on the product."""
    out = elems[0].realize()
    if T.gamma0 is not None:
        out = T.gamma0 @ out
    for xi, e in zip(x, elems[1:]):
        de = commutator_d(e.realize(), T.D0)
        out = out @ (delta_pow(de, T.D0, xi) if xi else de)
    return out


def direct_psi(x: Sequence[int], elems: Sequence[SuspElem], T: SuspendedTriple) -> ResidueReport:
    if len(x) != len(elems) - 1:
        raise PreconditionError("x needs one entry per differentiated element")
    s = len(x) + int(sum(x))
    if s > T.p:
        return ResidueReport(s, 0j, "exact", 0.0, flag="beyond dimension spectrum")
    return direct_zeta0(direct_psi_operator(x, elems, T), s, T)


def sigma2_psi(x: Sequence[int], elems: Sequence[SuspElem], T: SuspendedTriple) -> complex:
    """Dispatch ``Sigma^2 psi_x^0`` to the mixed or the shift formula by element kind."""
    if all(e.kind == "SHIFT" for e in elems):
        return sigma2_psi_shifts(x, [e.shift for e in elems], T)
    return sigma2_psi_mixed(x, elems, T)
