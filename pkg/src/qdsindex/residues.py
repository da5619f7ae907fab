"""Residue functionals obtained from heat-trace expansion coefficients.

With ``t^p Tr(b e^{-t|D|}) ~ sum_r b_r t^r`` the function ``Tr(b |D|^{-2z})`` has
simple poles at ``z = m/2`` with residue ``b_{p-m} / (2 Gamma(m))`` and takes the
value ``b_p`` at ``z = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gamma as Gamma
from math import pi, sqrt
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .operators import DiracData, Op, delta_pow
from .series import AsymptoticSeries, FitConfig, Growth, trace_expansion


@dataclass(frozen=True)
class ResidueReport:
    """``Res_{z=m/2} Tr(b |D|^{-2z})`` with its provenance and error estimate."""

    m: int
    value: complex
    source: str
    error_budget: float
    flag: str | None = None

    def to_json(self) -> dict:
        out = {"m": self.m, "re": self.value.real, "im": self.value.imag, "source": self.source, "error_budget": self.error_budget}
        if self.flag:
            out["flag"] = self.flag
        return out


def default_growth(D: DiracData) -> Growth:
    """A generous counting bound ``N(lambda) <= 10 lambda^p`` when the model gives none."""
    return Growth(C=10.0, q=float(D.summability_p))


def conversion_factor(p: int, r: int) -> float:
    """``b_r / b'_r`` relating the ``e^{-t|D|}`` and ``e^{-t^2 D^2}`` expansions."""
    if r > p:
        raise PreconditionError("the Gaussian expansion determines b_r only for r <= p")
    return 2.0 ** (p - r) * Gamma((p - r + 1) / 2) / sqrt(pi)


def convert_D2_to_absD(series: AsymptoticSeries, p: int | None = None) -> AsymptoticSeries:
    """Rescale coefficients of ``t^p Tr(b e^{-t^2 D^2})`` into those of ``t^p Tr(b e^{-t|D|})``."""
    p = series.p if p is None else p
    R = min(series.R, p)
    f = np.array([conversion_factor(p, r) for r in range(R + 1)])
    return AsymptoticSeries(
        p=p,
        coeffs=series.coeffs[: R + 1] * f,
        fit_residual=series.fit_residual * f.max(),
        truncation_bound=series.truncation_bound * f.max(),
        kernel="abs",
        coeff_err=np.asarray(series.coeff_err[: R + 1]) * f,
        window=series.window,
        source=series.source,
    )


def abs_expansion(
    b,
    D: DiracData,
    growth: Growth | None = None,
    fit: FitConfig | None = None,
    weight: float | None = None,
) -> AsymptoticSeries:
    """Coefficients ``b_0..b_p`` (at least) of ``t^p Tr(b e^{-t|D|})`` by the configured numeric route."""
    growth = growth or default_growth(D)
    fit = fit or FitConfig()
    series = trace_expansion(b, D, growth, fit, weight=weight)
    if fit.kernel == "gauss":
        return convert_D2_to_absD(series, D.summability_p)
    if fit.kernel == "abs":
        return series
    raise PreconditionError("residues need the 'abs' or 'gauss' kernel")


def residue_from_series(series: AsymptoticSeries, m: int) -> ResidueReport:
    p = series.p
    if m < 1:
        raise PreconditionError("m must be positive")
    if m > p:
        return ResidueReport(m, 0j, series.source, 0.0, flag="beyond dimension spectrum")
    scale = 1.0 / (2 * Gamma(m))
    return ResidueReport(m, series.coeff(p - m) * scale, series.source, series.error_budget(p - m) * scale)


def zeta_residue(
    b,
    D: DiracData,
    m: int,
    growth: Growth | None = None,
    fit: FitConfig | None = None,
    series: AsymptoticSeries | None = None,
) -> ResidueReport:
    """``Res_{z=m/2} Tr(b |D|^{-2z}) = b_{p-m} / (2 Gamma(m))``; zero for ``m > p``."""
    p = D.summability_p
    if m < 1:
        raise PreconditionError("m must be at least 1")
    if m > p:
        return ResidueReport(m, 0j, "exact", 0.0, flag="beyond dimension spectrum")
    if series is None:
        series = abs_expansion(b, D, growth, fit)
    return residue_from_series(series, m)


def zeta_at_zero(
    b,
    D: DiracData,
    growth: Growth | None = None,
    fit: FitConfig | None = None,
    series: AsymptoticSeries | None = None,
) -> complex:
    """Value at ``z = 0`` of ``Tr(b |D|^{-2z})``, which is the coefficient ``b_p``."""
    if series is None:
        series = abs_expansion(b, D, growth, fit)
    return series.coeff(D.summability_p)


def psi_operator(x: Sequence[int], b0: Op, ops: Sequence[Op], D: DiracData, gamma: Op | None = None) -> Op:
    """The product ``(g) b0 delta^{x_1}(a_1) ... delta^{x_n}(a_n)``."""
    if len(x) != len(ops):
        raise PreconditionError("x and ops must have the same length")
    out = b0 if gamma is None else gamma @ b0
    for xi, a in zip(x, ops):
        out = out @ (delta_pow(a, D, xi) if xi else a)
    return out


def psi_report(
    x: Sequence[int],
    k: int,
    b0: Op,
    ops: Sequence[Op],
    D: DiracData,
    gamma: Op | None = None,
    growth: Growth | None = None,
    fit: FitConfig | None = None,
) -> ResidueReport:
    m = len(ops) + int(sum(x)) + k
    if m > D.summability_p:
        return ResidueReport(m, 0j, "exact", 0.0, flag="beyond dimension spectrum")
    B = psi_operator(x, b0, ops, D, gamma)
    return zeta_residue(B, D, m, growth, fit)


def psi(
    x: Sequence[int],
    k: int,
    b0: Op,
    ops: Sequence[Op],
    D: DiracData,
    gamma: Op | None = None,
    growth: Growth | None = None,
    fit: FitConfig | None = None,
) -> complex:
    """``Res_{z=(n+|x|+k)/2} Tr((g) b0 delta^{x_1}(a_1)...delta^{x_n}(a_n) |D|^{-2z})``."""
    return psi_report(x, k, b0, ops, D, gamma, growth, fit).value
