"""The noncommutative torus acting on ``l^2(Z^2) + l^2(Z^2)``.

Basis vectors are the eigenvectors ``v_s = (e_{mn}, s e^{i phi} e_{mn}) / sqrt 2`` of
the off-diagonal Dirac operator with blocks ``T_{m-in}`` and ``T_{m+in}``,
where ``m + in = r e^{i phi}``.  They are indexed ``2 * site + (0 if s = +1 else 1)``.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from math import pi, sqrt

import numpy as np
import scipy.sparse as sp

from ..errors import PreconditionError
from ..operators import DiracData, Grading, HilbertTruncation, Op, SpectralTriple
from ..series import FitConfig, Growth
from .base import Expectation, ModelInstance

DEFAULT_THETA = 1 / sqrt(2) - 0.5
MARGIN = 6


class TorusLattice:
    """Index bookkeeping for the square truncation ``|m|, |n| <= Lambda``."""

    def __init__(self, Lambda: int):
        self.Lambda = Lambda
        side = np.arange(-Lambda, Lambda + 1)
        M, N = np.meshgrid(side, side, indexing="ij")
        self.m = M.ravel()
        self.n = N.ravel()
        self.sites = self.m.size
        self.r = np.hypot(self.m, self.n)
        self.phase = np.exp(1j * np.angle(self.m + 1j * self.n))

    def site(self, m: np.ndarray, n: np.ndarray) -> np.ndarray:
        L = self.Lambda
        return (m + L) * (2 * L + 1) + (n + L)


def _site_operator(lat: TorusLattice, shift: tuple[int, int], coef: np.ndarray) -> sp.csr_matrix:
    """Matrix of ``(W + W)`` in the eigenbasis, where ``W e_{mn} = coef_{mn} e_{m+a, n+b}``."""
    a, b = shift
    L = lat.Lambda
    ok = (np.abs(lat.m + a) <= L) & (np.abs(lat.n + b) <= L)
    src = np.flatnonzero(ok)
    dst = lat.site(lat.m[src] + a, lat.n[src] + b)
    c = coef[src]
    # <v_{s'}(dst) | W + W | v_s(src)> = c (1 + s' s conj(e^{i phi'}) e^{i phi}) / 2
    rel = np.conj(lat.phase[dst]) * lat.phase[src]
    rows, cols, vals = [], [], []
    for s, so in ((1, 0), (-1, 1)):
        for s2, do in ((1, 0), (-1, 1)):
            rows.append(2 * dst + do)
            cols.append(2 * src + so)
            vals.append(c * (1 + s * s2 * rel) / 2)
    dim = 2 * lat.sites
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))


def _power(op: Op, k: int) -> Op:
    base = op if k >= 0 else op.H
    out = Op.identity(op.trunc)
    for _ in range(abs(k)):
        out = out @ base
    return out


class TorusModel(ModelInstance):
    """Model instance with helpers for monomials ``U^a V^b`` and multipliers ``T_f``."""

    lattice: TorusLattice
    theta: float

    def monomial(self, alpha: int, beta: int) -> Op:
        """``U^alpha V^beta``."""
        return _power(self.generators["U"], alpha) @ _power(self.generators["V"], beta)

    def multiplier(self, f) -> Op:
        """``T_f + T_f`` for a function ``f(m, n)`` of the lattice site."""
        lat = self.lattice
        vals = np.repeat(np.asarray(f(lat.m, lat.n), dtype=np.complex128), 2)
        return Op.diag(self.trunc, vals)


def nctorus_model(theta: float = DEFAULT_THETA, Lambda: int = 60) -> TorusModel:
    """Truncated torus triple with ``U e_{mn} = e_{m+1,n}`` and ``V e_{mn} = e^{-2 pi i m theta} e_{m,n+1}``."""
    if Lambda < 4:
        raise PreconditionError("Lambda must be at least 4")
    frac = Fraction(theta).limit_denominator(1000)
    if abs(float(frac) - theta) < 1e-12:
        warnings.warn(f"theta = {theta} is rational ({frac}) to within 1e-12", stacklevel=2)
    lat = TorusLattice(Lambda)
    dim = 2 * lat.sites
    lam = np.empty(dim)
    lam[0::2] = lat.r
    lam[1::2] = -lat.r
    labels = tuple((int(m), int(n), s) for m, n in zip(lat.m, lat.n) for s in (1, -1))
    trunc = HilbertTruncation(f"torus[{Lambda}]", dim, labels)
    D = DiracData(trunc, lam, summability_p=2, spectral_cutoff=float(Lambda - MARGIN))
    idx = np.arange(dim)
    gamma = Op(trunc, sp.csr_matrix((np.ones(dim), (idx, idx ^ 1)), shape=(dim, dim)))
    U = Op(trunc, _site_operator(lat, (1, 0), np.ones(lat.sites)))
    V = Op(trunc, _site_operator(lat, (0, 1), np.exp(-2j * pi * theta * lat.m)))
    model = TorusModel(
        name="torus",
        params={"lambda": Lambda, "theta": theta},
        triple=SpectralTriple(D, Grading(gamma), name="torus"),
        generators={"U": U, "V": V},
        ideal_index={"U": 2, "V": 2},
        growth=Growth(C=2 * pi * 1.05, q=2.0),
        fit=FitConfig(kernel="gauss", R=10, t_max=0.5),
        descriptors={"unit": "torus-|D|", "F": "torus-F", "gamma": "torus-gamma"},
        interior=np.repeat(np.maximum(np.abs(lat.m), np.abs(lat.n)) <= Lambda - MARGIN, 2),
    )
    model.lattice = lat
    model.theta = theta
    model.expectations.append(
        Expectation(
            name="torus_heat_constant",
            description="t^2 Tr(e^{-t^2 D^2}) at t = 0.2",
            evaluate=lambda: 0.04 * complex(np.sum(np.exp(-0.04 * lam**2))),
            expected=2 * pi,
            provenance="closed-form",
            tolerance=1e-6,
        )
    )
    return model


def _phase(alpha, beta, theta: float) -> complex:
    a, b = alpha, beta
    return complex(np.exp(-2j * pi * theta * (a[1] * b[0] + a[2] * b[0] + a[2] * b[1])))


def nctorus_closed_values(kind: str, alpha, beta, theta: float = DEFAULT_THETA) -> complex:
    """Closed-form residue values for monomials ``a_i = u^{alpha_i} v^{beta_i}``.

    ``prop_w``: ``Res_{z=1} Tr(g a0 da1 da2 |D|^{-2z})``; ``prop_v`` and ``prop_x``:
    the mixed families with one or two ``F`` factors; ``phi2``: the suspended
    2-cocycle divided by ``Tr(c0 c1 c2)``.  These are the published values.
    """
    if len(alpha) != 3 or len(beta) != 3:
        raise PreconditionError("three exponent pairs are required")
    if kind in ("prop_v", "prop_x"):
        return 0j
    if sum(alpha) != 0 or sum(beta) != 0:
        return 0j
    wedge = alpha[1] * beta[2] - alpha[2] * beta[1]
    if kind == "prop_w":
        return 4j * pi * wedge * _phase(alpha, beta, theta)
    if kind == "phi2":
        return 2 * sqrt(2) * pi * 1j**1.5 * wedge * _phase(alpha, beta, theta)
    raise PreconditionError(f"unknown closed-value kind {kind!r}")
