"""Exact coefficients of the residue cocycle, its assembly and the (b, B) operators.

Coefficients are kept as ``q * sqrt(pi)^e * sqrt(2i)`` with ``q`` rational; the
formal unit ``sqrt(2i)`` is only embedded (as ``1 + i``) when a numeric value
is needed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial, pi, sqrt
from typing import Callable, Iterable, Sequence

from .errors import PreconditionError
from .models.base import ModelInstance
from .operators import commutator_d
from .qds import SuspElem, SuspendedTriple, sigma2_phi0, sigma2_psi, direct_psi
from .residues import psi, zeta_at_zero

SQRT_2I = 1 + 1j


@dataclass(frozen=True)
class ExactCoeff:
    """``q * sqrt(pi)^sqrt_pi_power * (sqrt(2i) if carries_sqrt2i else 1)``."""

    q: Fraction
    sqrt_pi_power: int = 0
    carries_sqrt2i: bool = True

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.sqrt_pi_power not in (0, 1):
            raise PreconditionError("sqrt_pi_power must be 0 or 1")

    def _like(self, other: "ExactCoeff") -> None:
        if (self.sqrt_pi_power, self.carries_sqrt2i) != (other.sqrt_pi_power, other.carries_sqrt2i):
            raise PreconditionError("cannot add coefficients with different irrational parts")

    def __add__(self, other: "ExactCoeff") -> "ExactCoeff":
        if other.q == 0:
            return self
        if self.q == 0:
            return other
        self._like(other)
        return ExactCoeff(self.q + other.q, self.sqrt_pi_power, self.carries_sqrt2i)

    def __neg__(self) -> "ExactCoeff":
        return ExactCoeff(-self.q, self.sqrt_pi_power, self.carries_sqrt2i)

    def __mul__(self, other) -> "ExactCoeff":
        if isinstance(other, ExactCoeff):
            e = self.sqrt_pi_power + other.sqrt_pi_power
            if e > 1 or (self.carries_sqrt2i and other.carries_sqrt2i):
                raise PreconditionError("product leaves the sqrt(pi), sqrt(2i) representation")
            return ExactCoeff(self.q * other.q, e, self.carries_sqrt2i or other.carries_sqrt2i)
        return ExactCoeff(self.q * Fraction(other), self.sqrt_pi_power, self.carries_sqrt2i)

    __rmul__ = __mul__

    def numeric(self) -> complex:
        v = float(self.q) * (sqrt(pi) if self.sqrt_pi_power else 1.0)
        return complex(v * (SQRT_2I if self.carries_sqrt2i else 1))

    def __str__(self) -> str:
        parts = [str(self.q)]
        if self.sqrt_pi_power:
            parts.append("sqrt(pi)")
        if self.carries_sqrt2i:
            parts.append("sqrt(2i)")
        return "*".join(parts)


def _zero(n: int) -> ExactCoeff:
    return ExactCoeff(0, n % 2, True)


def gamma_half(two_a: int) -> ExactCoeff:
    """``Gamma(two_a / 2)`` for a positive integer ``two_a``, as a rational times ``sqrt(pi)^parity``."""
    if two_a <= 0:
        raise PreconditionError("Gamma argument must be positive")
    if two_a % 2 == 0:
        return ExactCoeff(factorial(two_a // 2 - 1), 0, False)
    m = (two_a - 1) // 2
    return ExactCoeff(Fraction(factorial(2 * m), 4**m * factorial(m)), 1, False)


def c_coeff(n: int, k: Sequence[int], with_gamma: bool = True) -> ExactCoeff:
    """``c_{n,k} = (-1)^{|k|} sqrt(2i) (prod k_j! prod (k_1+..+k_j+j))^{-1} Gamma(|k| + n/2)``.

    ``with_gamma=False`` gives the variant without the ``Gamma`` factor.
    """
    k = [int(v) for v in k]
    if n < 1 or len(k) != n or any(v < 0 for v in k):
        raise PreconditionError("k must be a length-n vector of non-negative integers")
    denom = 1
    run = 0
    for j, kj in enumerate(k, start=1):
        run += kj
        denom *= factorial(kj) * (run + j)
    q = Fraction((-1) ** sum(k), denom)
    base = ExactCoeff(q, 0, True)
    if not with_gamma:
        return base
    return base * gamma_half(2 * sum(k) + n)


def _binom(a: int, b: int) -> int:
    if b < 0 or a < 0 or b > a:
        return 0
    from math import comb

    return comb(a, b)


def B_terms(n: int, x: Sequence[int]) -> dict[tuple[int, ...], ExactCoeff]:
    """The contributions to ``B_x^n`` grouped by the multi-index ``k``."""
    x = [int(v) for v in x]
    if n < 1 or len(x) != n or any(v < 0 for v in x):
        raise PreconditionError("x must be a length-n vector of non-negative integers")
    out: dict[tuple[int, ...], ExactCoeff] = {}

    def rec(i: int, s_prev: int, S_prev: int, ks: list[int], ss: list[int], weight: int) -> None:
        if i == n:
            k = tuple(ks)
            term = c_coeff(n, k) * Fraction(2) ** (2 * sum(ks) - sum(x) + sum(ss)) * weight
            out[k] = out.get(k, _zero(n)) + term
            return
        lo = max(0, -((s_prev - x[i]) // 2))  # ceil((x_i - s_{i-1}) / 2)
        for ki in range(lo, x[i] + 1):
            w = weight * _binom(ki, x[i] - ki - s_prev)
            if w == 0:
                continue
            S = S_prev + 2 * ki - x[i]
            if i == n - 1:
                # s_n = 0, and C(S_n, 0) = 1 exactly when S_n >= 0
                if S >= 0:
                    rec(i + 1, 0, S, ks + [ki], ss, w)
                continue
            for si in range(0, S + 1):
                rec(i + 1, si, S, ks + [ki], ss + [si], w * _binom(S, si))

    rec(0, 0, 0, [], [], 1)
    return out


def B_coeff(n: int, x: Sequence[int]) -> ExactCoeff:
    """``B_x^n``, the coefficient of ``psi_x^0(a_0, da_1, ..., da_n)`` in ``phi_n``."""
    total = _zero(n)
    for v in B_terms(n, x).values():
        total = total + v
    return total


def x_support(n: int, p: int) -> list[tuple[int, ...]]:
    """All ``x`` in ``N^n`` with ``n + |x| <= p``, in lexicographic order."""
    budget = p - n
    if budget < 0:
        return []
    return [x for x in product(range(budget + 1), repeat=n) if sum(x) <= budget]


def coefficient_table(n_max: int, p: int, kind: str = "B") -> list[dict]:
    rows = []
    for n in range(1, n_max + 1):
        for idx in x_support(n, p):
            c = B_coeff(n, idx) if kind == "B" else c_coeff(n, idx)
            rows.append(
                {
                    "n": n,
                    "index": " ".join(map(str, idx)),
                    "q_num": c.q.numerator,
                    "q_den": c.q.denominator,
                    "sqrt_pi_power": c.sqrt_pi_power,
                }
            )
    return rows


def coefficient_csv(n_max: int, p: int, kind: str = "B") -> str:
    """CSV export with columns ``n, x (or k), q_num, q_den, sqrt_pi_power``."""
    buf = io.StringIO()
    col = "x" if kind == "B" else "k"
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", col, "q_num", "q_den", "sqrt_pi_power"])
    for r in coefficient_table(n_max, p, kind):
        w.writerow([r["n"], r["index"], r["q_num"], r["q_den"], r["sqrt_pi_power"]])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# assembling phi_n


def _parity_check(n: int, parity: str, even_triple: bool) -> None:
    if parity not in ("odd", "even"):
        raise PreconditionError("parity must be 'odd' or 'even'")
    if (parity == "even") != (n % 2 == 0):
        raise PreconditionError(f"n = {n} does not have {parity} parity")
    if (parity == "even") != even_triple:
        raise PreconditionError(f"an {parity} cocycle needs an {parity} triple")


def assemble_phi(n: int, parity: str, triple, args: Sequence, route: str = "formula") -> complex:
    """``phi_n(a_0, ..., a_n) = sum_x B_x^n psi_x^0((gamma) a_0, da_1, ..., da_n)`` over ``n + |x| <= p``.

    ``triple`` is a :class:`ModelInstance` (arguments are operators) or a
    :class:`SuspendedTriple` (arguments are :class:`SuspElem`); on the suspension
    ``route`` selects the transfer formulas or the direct fit.
    """
    if len(args) != n + 1:
        raise PreconditionError(f"phi_{n} takes {n + 1} arguments")
    suspended = isinstance(triple, SuspendedTriple)
    _parity_check(n, parity, triple.even)
    if n == 0:
        if parity != "even":
            raise PreconditionError("phi_0 exists only for even triples")
        if suspended:
            return sigma2_phi0(args[0], triple)
        return zeta_at_zero(triple.gamma() @ args[0], triple.D, triple.growth, triple.fit)
    total = 0j
    for x in x_support(n, triple.p):
        coef = B_coeff(n, x)
        if coef.q == 0:
            continue
        if suspended:
            if route == "direct":
                val = direct_psi(x, list(args), triple).value
            else:
                val = sigma2_psi(x, list(args), triple)
        else:
            D = triple.D
            ops = [commutator_d(a, D) for a in args[1:]]
            g = triple.gamma() if triple.even else None
            val = psi(x, 0, args[0], ops, D, g, triple.growth, triple.fit)
        total += coef.numeric() * val
    return complex(total)


# ---------------------------------------------------------------------------
# multilinear functionals and the (b, B) operators


@dataclass(frozen=True)
class CocycleFunctional:
    """A multilinear functional of ``n + 1`` arguments on an algebra given by ``mul`` and ``unit``.

    Values may be complex numbers or any additive type with ``-`` and scalar
    ``*`` (e.g. :class:`PhasePoly` for exact arithmetic).
    """

    parity: str
    n: int
    evaluator: Callable
    mul: Callable
    unit: object
    provenance: str = "numeric"

    def __call__(self, *args):
        if len(args) != self.n + 1:
            raise PreconditionError(f"functional takes {self.n + 1} arguments, got {len(args)}")
        return self.evaluator(*args)


def _flip(parity: str) -> str:
    return "odd" if parity == "even" else "even"


def _sum(values: Iterable):
    it = iter(values)
    total = next(it)
    for v in it:
        total = total + v
    return total


def hochschild_b(phi: CocycleFunctional) -> CocycleFunctional:
    """``(b phi)(a_0..a_{n+1}) = sum_j (-1)^j phi(.., a_j a_{j+1}, ..) + (-1)^{n+1} phi(a_{n+1} a_0, a_1, .., a_n)``."""
    n, mul = phi.n, phi.mul

    def ev(*a):
        terms = []
        for j in range(n + 1):
            args = list(a[:j]) + [mul(a[j], a[j + 1])] + list(a[j + 2 :])
            terms.append(phi(*args) * (-1) ** j)
        terms.append(phi(mul(a[n + 1], a[0]), *a[1 : n + 1]) * (-1) ** (n + 1))
        return _sum(terms)

    return CocycleFunctional(_flip(phi.parity), n + 1, ev, mul, phi.unit, phi.provenance)


def connes_B(phi: CocycleFunctional) -> CocycleFunctional:
    """``B = A B_0`` with ``(B_0 phi)(a_0..a_{n-1}) = phi(1, a_0, .., a_{n-1})`` and
    ``(A psi)(a_0..a_m) = sum_j (-1)^{mj} psi(a_j, .., a_m, a_0, .., a_{j-1})``."""
    if phi.n == 0:
        raise PreconditionError("B is not defined on a functional of one argument")
    m = phi.n - 1

    def ev(*a):
        terms = []
        for j in range(m + 1):
            rot = list(a[j:]) + list(a[:j])
            terms.append(phi(phi.unit, *rot) * (-1) ** (m * j))
        return _sum(terms)

    return CocycleFunctional(_flip(phi.parity), phi.n - 1, ev, phi.mul, phi.unit, phi.provenance)


# ---------------------------------------------------------------------------
# exact closed-form table on the suspended torus


class PhasePoly:
    """Finite Laurent polynomial in ``omega = e^{-2 pi i theta}`` with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self.terms = {e: Fraction(c) for e, c in (terms or {}).items() if c != 0}

    @classmethod
    def monomial(cls, e: int, c=1) -> "PhasePoly":
        return cls({e: Fraction(c)})

    def __add__(self, other: "PhasePoly") -> "PhasePoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return PhasePoly(out)

    def __sub__(self, other: "PhasePoly") -> "PhasePoly":
        return self + other * -1

    def __mul__(self, other) -> "PhasePoly":
        if isinstance(other, PhasePoly):
            out: dict[int, Fraction] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
            return PhasePoly(out)
        return PhasePoly({e: c * Fraction(other) for e, c in self.terms.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, PhasePoly) and self.terms == other.terms

    def numeric(self, theta: float) -> complex:
        import cmath

        return complex(sum(float(c) * cmath.exp(-2j * pi * theta * e) for e, c in self.terms.items()))

    def __repr__(self) -> str:
        return f"PhasePoly({dict(sorted(self.terms.items()))})"


@dataclass(frozen=True)
class TorusElem:
    """``omega^phase * u^alpha v^beta (x) c`` with ``c`` a square matrix of rationals."""

    phase: int
    alpha: int
    beta: int
    c: tuple[tuple[Fraction, ...], ...]


def _matmul(a, b):
    n = len(a)
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)) for i in range(n))


def _trace(a) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def torus_mul(x: TorusElem, y: TorusElem) -> TorusElem:
    """``(u^a v^b)(u^a' v^b') = omega^{b a'} u^{a+a'} v^{b+b'}`` since ``v u = omega u v``."""
    return TorusElem(x.phase + y.phase + x.beta * y.alpha, x.alpha + y.alpha, x.beta + y.beta, _matmul(x.c, y.c))


def torus_unit(size: int) -> TorusElem:
    eye = tuple(tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size))
    return TorusElem(0, 0, 0, eye)


def torus_elem(alpha: int, beta: int, c) -> TorusElem:
    return TorusElem(0, int(alpha), int(beta), tuple(tuple(Fraction(v) for v in row) for row in c))


def torus_phi2_closed(a0: TorusElem, a1: TorusElem, a2: TorusElem) -> PhasePoly:
    """``Sigma^2 phi_2`` on the torus divided by its constant ``K``:
    ``(alpha_1 beta_2 - alpha_2 beta_1) omega^{alpha_1 beta_0 + alpha_2 beta_0 + alpha_2 beta_1} Tr(c_0 c_1 c_2)``
    when the exponents sum to zero, else 0."""
    if a0.alpha + a1.alpha + a2.alpha != 0 or a0.beta + a1.beta + a2.beta != 0:
        return PhasePoly()
    wedge = a1.alpha * a2.beta - a2.alpha * a1.beta
    tr = _trace(_matmul(_matmul(a0.c, a1.c), a2.c))
    e = a0.phase + a1.phase + a2.phase + a1.alpha * a0.beta + a2.alpha * a0.beta + a2.alpha * a1.beta
    return PhasePoly.monomial(e, wedge * tr)


def torus_phi2_functional(size: int = 2) -> CocycleFunctional:
    """The closed-form suspended torus 2-cocycle as an exact functional (constant factored out)."""
    return CocycleFunctional("even", 2, torus_phi2_closed, torus_mul, torus_unit(size), provenance="closed-form")


def torus_phi0_functional(size: int = 2) -> CocycleFunctional:
    """``Sigma^2 phi_0`` on the suspended torus algebra, which vanishes identically."""
    return CocycleFunctional("even", 0, lambda a0: PhasePoly(), torus_mul, torus_unit(size), provenance="closed-form")
