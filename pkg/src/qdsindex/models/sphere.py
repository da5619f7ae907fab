"""The spinor Dirac operator on the round two-sphere.

Eigenspinors are built from spin-weighted harmonics ``sY_{jm}``, ``j = k - 1/2``:
``v_+- = (wY_{jm}, +- (-w)Y_{jm}) / sqrt 2`` with eigenvalue ``+-k``, where the
component with grading ``+1`` carries spin weight ``w``.  Basis vectors are indexed
by ``(k, 2m, sign)`` with the two signs adjacent.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial, pi, sqrt

import numpy as np
import scipy.sparse as sp
from scipy import special

from .. import _kernels
from ..errors import PreconditionError
from ..operators import DiracData, Grading, HilbertTruncation, Op, SpectralTriple
from ..series import FitConfig, Growth
from .base import ModelInstance
from .wigner import wigner3j_doubled

MARGIN = 3

# spin weight (doubled) carried by the grading +1 component
UPPER_SPIN2 = -1


def _w3j(j1, j2, j3, m1, m2, m3) -> float:
    sign, sq = wigner3j_doubled(j1, j2, j3, m1, m2, m3)
    return 0.0 if sign == 0 else sign * sqrt(float(sq))


@lru_cache(maxsize=None)
def harmonic_element_3j(s2: int, jp2: int, mp2: int, mu2: int, j2: int, m2: int) -> float:
    """``<sY_{j'm'} | Y_{1 mu} | sY_{jm}>`` from two 3j symbols (all arguments doubled)."""
    if mp2 != m2 + mu2:
        return 0.0
    ph = -1.0 if ((s2 + mp2) // 2) % 2 else 1.0
    norm = sqrt((jp2 + 1) * 3 * (j2 + 1) / (4 * pi))
    return ph * norm * _w3j(jp2, 2, j2, -mp2, mu2, m2) * _w3j(jp2, 2, j2, s2, 0, -s2)


# ---------------------------------------------------------------------------
# independent route: spin-weighted harmonics from Jacobi polynomials


def wigner_small_d(j2: int, m2: int, n2: int, theta: np.ndarray) -> np.ndarray:
    """``d^j_{m n}(theta)`` for doubled arguments, via Jacobi polynomials."""
    theta = np.asarray(theta, dtype=np.float64)
    j, m, n = j2 / 2, m2 / 2, n2 / 2
    cands = [(j + n, 0), (j - n, 1), (j + m, 2), (j - m, 3)]
    k, case = min(cands)
    k = int(round(k))
    if case == 0:
        a, lam = m - n, m - n
    elif case == 1:
        a, lam = n - m, 0
    elif case == 2:
        a, lam = n - m, 0
    else:
        a, lam = m - n, m - n
    a = int(round(a))
    b = int(round(2 * j - 2 * k - a))
    sign = -1.0 if int(round(lam)) % 2 else 1.0
    ratio = sqrt(_binom(int(round(2 * j - k)), k + a) / _binom(k + b, b))
    x = np.cos(theta)
    jac = _kernels.jacobi(k, float(a), float(b), x)
    return sign * ratio * np.sin(theta / 2) ** a * np.cos(theta / 2) ** b * jac


def _binom(n: int, k: int) -> float:
    return factorial(n) / (factorial(k) * factorial(n - k))


def spin_harmonic(s2: int, j2: int, m2: int, theta, phi) -> np.ndarray:
    """``sY_{jm}`` up to an ``s``-dependent unit phase (doubled ``s, j, m``)."""
    d = wigner_small_d(j2, m2, -s2, theta)
    return sqrt((j2 + 1) / (4 * pi)) * d * np.exp(1j * (m2 / 2) * np.asarray(phi))


def harmonic_element_quadrature(s2: int, jp2: int, mp2: int, mu2: int, j2: int, m2: int) -> complex:
    """``<sY_{j'm'} | Y_{1 mu} | sY_{jm}>`` by Gauss-Legendre quadrature in ``cos theta``.

    After the azimuthal integral the integrand is a polynomial of degree at
    most ``j + j' + 1`` in ``cos theta``, so the rule below is exact.
    """
    if mp2 != m2 + mu2:
        return 0j
    nodes = (jp2 + j2) // 2 + 4
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = np.arccos(x)
    left = spin_harmonic(s2, jp2, mp2, theta, 0.0)
    mid = spin_harmonic(0, 2, mu2, theta, 0.0)
    right = spin_harmonic(s2, j2, m2, theta, 0.0)
    # the phi integral of the three phases gives 2 pi since m' = m + mu
    return complex(2 * pi * np.sum(w * np.conj(left) * mid * right))


# ---------------------------------------------------------------------------
# the model


def _labels(Lmax: int) -> list[tuple[int, int, int]]:
    out = []
    for k in range(1, Lmax + 1):
        j2 = 2 * k - 1
        for m2 in range(-j2, j2 + 1, 2):
            out.append((k, m2, 1))
            out.append((k, m2, -1))
    return out


def _harmonic_operator(labels, index, Lmax: int, mu2: int, upper2: int) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for i, (k, m2, s) in enumerate(labels):
        j2 = 2 * k - 1
        mp2 = m2 + mu2
        for kp in (k - 1, k, k + 1):
            if kp < 1 or kp > Lmax:
                continue
            jp2 = 2 * kp - 1
            if abs(mp2) > jp2:
                continue
            up = harmonic_element_3j(upper2, jp2, mp2, mu2, j2, m2)
            dn = harmonic_element_3j(-upper2, jp2, mp2, mu2, j2, m2)
            for sp_ in (1, -1):
                v = 0.5 * (up + sp_ * s * dn)
                if v != 0.0:
                    rows.append(index[(kp, mp2, sp_)])
                    cols.append(i)
                    vals.append(v)
    dim = len(labels)
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=np.complex128)


class SphereModel(ModelInstance):
    """Model instance carrying the label table."""

    labels: list
    index: dict
    upper2: int


def sphere_model(Lmax: int = 40, upper_spin2: int = UPPER_SPIN2) -> SphereModel:
    """Truncation ``k = 1..Lmax`` of the spinor Dirac operator with multiplication by ``x, y, z``."""
    if Lmax < 3:
        raise PreconditionError("Lmax must be at least 3")
    if upper_spin2 not in (1, -1):
        raise PreconditionError("upper_spin2 must be +1 or -1")
    labels = _labels(Lmax)
    index = {lab: i for i, lab in enumerate(labels)}
    dim = len(labels)
    trunc = HilbertTruncation(f"sphere[{Lmax}]", dim, tuple(labels))
    lam = np.array([s * k for k, _, s in labels], dtype=float)
    D = DiracData(trunc, lam, summability_p=2, spectral_cutoff=float(Lmax - MARGIN))
    idx = np.arange(dim)
    gamma = Op(trunc, sp.csr_matrix((np.ones(dim), (idx, idx ^ 1)), shape=(dim, dim)))
    Y = {mu2: _harmonic_operator(labels, index, Lmax, mu2, upper_spin2) for mu2 in (-2, 0, 2)}
    c = sqrt(2 * pi / 3)
    x = Op(trunc, c * (Y[-2] - Y[2]))
    y = Op(trunc, 1j * c * (Y[-2] + Y[2]))
    z = Op(trunc, sqrt(4 * pi / 3) * Y[0])
    model = SphereModel(
        name="sphere",
        params={"lmax": Lmax},
        triple=SpectralTriple(D, Grading(gamma), name="sphere"),
        generators={"x": x, "y": y, "z": z},
        ideal_index={"x": 2, "y": 2, "z": 2},
        growth=Growth(C=2.2, q=2.0),
        fit=FitConfig(kernel="gauss", R=10, t_max=0.5),
        descriptors={"unit": "sphere-|D|", "F": "sphere-F", "gamma": "sphere-gamma"},
        interior=np.array([k <= Lmax - MARGIN for k, _, _ in labels]),
    )
    model.labels = labels
    model.index = index
    model.upper2 = upper_spin2
    return model


# ---------------------------------------------------------------------------
# the two-form integral


_NAMED = {
    "1": {(0, 0): sqrt(4 * pi)},
    "z": {(1, 0): sqrt(4 * pi / 3)},
    "x": {(1, -1): sqrt(2 * pi / 3), (1, 1): -sqrt(2 * pi / 3)},
    "y": {(1, -1): 1j * sqrt(2 * pi / 3), (1, 1): 1j * sqrt(2 * pi / 3)},
}


def harmonic_expansion(desc) -> dict[tuple[int, int], complex]:
    """Normalize a descriptor (a name or a ``{(l, m): coeff}`` map) to a harmonic expansion."""
    if isinstance(desc, str):
        try:
            return dict(_NAMED[desc])
        except KeyError:
            raise PreconditionError(f"unknown function name {desc!r}") from None
    out = {}
    for (l, m), c in dict(desc).items():
        if l < 0 or abs(m) > l:
            raise PreconditionError(f"invalid harmonic index ({l}, {m})")
        out[(int(l), int(m))] = complex(c)
    return out


def _eval(expansion, theta, phi):
    """Values and theta/phi derivatives of a harmonic expansion on a grid."""
    val = np.zeros(np.broadcast(theta, phi).shape, dtype=np.complex128)
    dth = np.zeros_like(val)
    dph = np.zeros_like(val)
    cot = np.cos(theta) / np.sin(theta)
    for (l, m), c in expansion.items():
        y = special.sph_harm_y(l, m, theta, phi)
        val += c * y
        dph += c * 1j * m * y
        up = special.sph_harm_y(l, m + 1, theta, phi) if m + 1 <= l else 0.0
        dth += c * (m * cot * y + sqrt((l - m) * (l + m + 1)) * np.exp(-1j * phi) * up)
    return val, dth, dph


def sphere_form_integral(a0, a1, a2, nodes: int | None = None) -> complex:
    """``int_{S^2} a0 da1 ^ da2`` with the outward orientation.

    Product rule: Gauss-Legendre in ``cos theta`` and the trapezoid rule in
    ``phi``; exact for the polynomial integrands of finite harmonic expansions.
    """
    exps = [harmonic_expansion(a) for a in (a0, a1, a2)]
    degree = sum(max((l for l, _ in e), default=0) for e in exps)
    if nodes is None:
        nodes = degree + 4
    if nodes > 400:
        raise PreconditionError("harmonic degree too high for the quadrature rule")
    x, w = np.polynomial.legendre.leggauss(nodes)
    nphi = 2 * degree + 4
    phi = 2 * pi * np.arange(nphi) / nphi
    TH, PH = np.meshgrid(np.arccos(x), phi, indexing="ij")
    f0, _, _ = _eval(exps[0], TH, PH)
    _, t1, p1 = _eval(exps[1], TH, PH)
    _, t2, p2 = _eval(exps[2], TH, PH)
    # da1 ^ da2 = (d_theta a1 d_phi a2 - d_phi a1 d_theta a2) dtheta ^ dphi, and
    # dtheta dphi = du dphi / sin(theta) with u = cos(theta)
    integrand = f0 * (t1 * p2 - p1 * t2) / np.sin(TH)
    return complex(np.sum(w[:, None] * integrand) * (2 * pi / nphi))
