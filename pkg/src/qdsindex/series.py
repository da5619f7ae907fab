"""Heat traces and the coefficients of their small-``t`` expansions.

Two routes are provided.  Numeric: sample ``t^p Tr(b K_t)`` on a geometric
grid inside an admissible window and fit a polynomial.  Exact: expand closed
generating functions of known spectra with rational power-series arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import factorial, pi
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import optimize, special

from . import _kernels
from .errors import FitError, PreconditionError, WindowError
from .operators import DiracData, Op

KERNELS = ("abs", "gauss", "laplace")


# ---------------------------------------------------------------------------
# exact truncated power series


class RationalSeries:
    """A power series ``c_0 + c_1 t + ... + c_R t^R`` with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = tuple(Fraction(c) for c in coeffs)
        if not cs:
            raise PreconditionError("a series needs at least the constant term")
        self.coeffs = cs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, r: int) -> Fraction:
        return self.coeffs[r]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RationalSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __repr__(self) -> str:
        return f"RationalSeries({[str(c) for c in self.coeffs]})"

    def _common(self, other: "RationalSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        R = self._common(other)
        return RationalSeries(self.coeffs[r] + other.coeffs[r] for r in range(R + 1))

    def __sub__(self, other: "RationalSeries") -> "RationalSeries":
        R = self._common(other)
        return RationalSeries(self.coeffs[r] - other.coeffs[r] for r in range(R + 1))

    def __mul__(self, other) -> "RationalSeries":
        if not isinstance(other, RationalSeries):
            return self.scale(other)
        R = self._common(other)
        a, b = self.coeffs, other.coeffs
        return RationalSeries(sum((a[i] * b[r - i] for i in range(r + 1)), Fraction(0)) for r in range(R + 1))

    def scale(self, s) -> "RationalSeries":
        s = Fraction(s)
        return RationalSeries(c * s for c in self.coeffs)

    def recip(self) -> "RationalSeries":
        """Multiplicative inverse; the constant term must be non-zero."""
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        out = [1 / a[0]]
        for r in range(1, len(a)):
            acc = sum((a[i] * out[r - i] for i in range(1, r + 1)), Fraction(0))
            out.append(-acc / a[0])
        return RationalSeries(out)

    def shift(self, k: int) -> "RationalSeries":
        """Multiply by ``t^k`` keeping the order (``k >= 0``)."""
        R = self.order
        return RationalSeries([Fraction(0)] * k + list(self.coeffs[: R + 1 - k]))

    def to_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])


def series_add(a: RationalSeries, b: RationalSeries) -> RationalSeries:
    return a + b


def series_mul(a: RationalSeries, b: RationalSeries) -> RationalSeries:
    return a * b


def series_recip(a: RationalSeries) -> RationalSeries:
    return a.recip()


def series_scale(a: RationalSeries, s) -> RationalSeries:
    return a.scale(s)


def exp_series(c, R: int) -> RationalSeries:
    """``exp(c t)`` to order ``R``."""
    c = Fraction(c)
    return RationalSeries(c ** r / factorial(r) for r in range(R + 1))


def n_coefficients(R: int) -> RationalSeries:
    """Expansion of ``t Tr(e^{-tN}) = t / (1 - e^{-t})`` to order ``R``."""
    if R < 0:
        raise PreconditionError("R must be non-negative")
    # (1 - e^{-t}) / t = sum_k (-1)^k t^k / (k+1)!
    q = RationalSeries(Fraction((-1) ** k, factorial(k + 1)) for k in range(R + 1))
    return q.recip()


# ---------------------------------------------------------------------------
# asymptotic series containers


@dataclass
class AsymptoticSeries:
    """Coefficients ``b_0..b_R`` of ``t^p Tr(b K_t) ~ sum_r b_r t^r``.

    ``coeff_err`` holds a per-coefficient stability estimate (refit with one
    more term and on a shortened window); :meth:`error_budget` adds it to the
    fit residual and the truncation bound.
    """

    p: int
    coeffs: np.ndarray
    fit_residual: float = 0.0
    truncation_bound: float = 0.0
    kernel: str = "abs"
    coeff_err: np.ndarray | None = None
    window: tuple[float, float] | None = None
    source: str = "fit"

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeff_err is None:
            self.coeff_err = np.zeros(self.coeffs.shape[0])
        if self.coeffs.shape[0] <= self.p and self.source == "fit":
            raise PreconditionError("need at least p+1 coefficients")

    @property
    def R(self) -> int:
        return self.coeffs.shape[0] - 1

    def coeff(self, r: int) -> complex:
        if r < 0:
            raise PreconditionError("negative coefficient index")
        return complex(self.coeffs[r]) if r <= self.R else 0j

    def error_budget(self, r: int) -> float:
        err = self.coeff_err[r] if r <= self.R else 0.0
        return float(self.fit_residual + self.truncation_bound + err)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "kernel": self.kernel,
            "source": self.source,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
            "coeff_err": [float(e) for e in self.coeff_err],
            "fit_residual": self.fit_residual,
            "truncation_bound": self.truncation_bound,
            "window": list(self.window) if self.window else None,
        }


# ---------------------------------------------------------------------------
# heat traces


def _kernel_spectrum(D: DiracData, kernel: str) -> tuple[np.ndarray, bool]:
    if kernel == "abs":
        return D.mu, False
    if kernel == "gauss":
        return D.mu, True
    if kernel == "laplace":
        return np.abs(D.eigenvalues), True
    raise PreconditionError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")


def _diag_of(b) -> np.ndarray:
    if isinstance(b, Op):
        return b.diagonal()
    return np.asarray(b, dtype=np.complex128)


def heat_samples(b, D: DiracData, ts: Sequence[float], kernel: str = "abs") -> np.ndarray:
    """``Tr(b K_t)`` for every ``t`` in ``ts``.

    ``kernel`` selects ``K_t``: ``abs`` is ``e^{-t|D|}``, ``gauss`` is
    ``e^{-t^2|D|^2}`` and ``laplace`` is ``e^{-t^2 D^2}`` without the kernel shift.
    ``b`` may be an :class:`Op` or its diagonal.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    if np.any(ts <= 0):
        raise PreconditionError("t must be positive")
    d = _diag_of(b)
    mu, gaussian = _kernel_spectrum(D, kernel)
    keep = d != 0
    if not np.any(keep):
        return np.zeros(ts.shape[0], dtype=np.complex128)
    return _kernels.heat_sums(d[keep], mu[keep], ts, gaussian)


def heat_trace(b, D: DiracData, t: float, kernel: str = "abs") -> complex:
    """``Tr(b e^{-t|D|})`` (or the Gaussian variants, see :func:`heat_samples`)."""
    return complex(heat_samples(b, D, [t], kernel)[0])


# ---------------------------------------------------------------------------
# admissible window


@dataclass(frozen=True)
class Growth:
    """Eigenvalue counting bound ``N(lambda) <= C lambda^q``."""

    C: float
    q: float


def tail_bound(t: float, cutoff: float, growth: Growth, kernel: str = "abs") -> float:
    """Estimate of ``sum_{lambda > cutoff} K_t(lambda)`` from the counting bound."""
    C, q = growth.C, growth.q
    if kernel == "abs":
        a, x = q, t * cutoff
        scale = C * q
    else:
        a, x = q / 2.0, (t * cutoff) ** 2
        scale = C * q / 2.0
    return float(scale * special.gamma(a) * special.gammaincc(a, x) / t ** q)


def truncation_window(
    D: DiracData,
    growth: Growth,
    eps_tail: float,
    kernel: str = "abs",
    t_max: float | None = None,
    weight: float = 1.0,
) -> tuple[float, float]:
    """Smallest ``t`` at which the omitted spectral tail, weighted by ``t^p``, stays below ``eps_tail``.

    ``weight`` bounds the size of the diagonal entries being traced.
    """
    if t_max is None:
        t_max = default_t_max(kernel)
    if not np.isfinite(eps_tail):
        return 0.0, float(t_max)
    if eps_tail <= 0:
        raise PreconditionError("eps_tail must be positive")
    cutoff = float(D.spectral_cutoff)
    p = D.summability_p

    def excess(logt: float) -> float:
        t = np.exp(logt)
        return np.log(weight * t ** p * tail_bound(t, cutoff, growth, kernel) + 1e-300) - np.log(eps_tail)

    if excess(np.log(t_max)) > 0:
        raise WindowError(f"truncation too small for eps_tail={eps_tail:g} below t_max={t_max:g}; increase the cutoff")
    lo = np.log(1e-12)
    if excess(lo) <= 0:
        return 1e-12, float(t_max)
    t_min = float(np.exp(optimize.brentq(excess, lo, np.log(t_max), xtol=1e-12)))
    return t_min, float(t_max)


def default_t_max(kernel: str) -> float:
    return 1.0 if kernel == "abs" else 0.6


# ---------------------------------------------------------------------------
# fitting


COND_LIMIT = 1e13


def _lstsq(ts: np.ndarray, fs: np.ndarray, R: int, t_scale: float) -> tuple[np.ndarray, float]:
    s = ts / t_scale
    A = np.vander(s, R + 1, increasing=True)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise FitError(f"ill-conditioned fit (cond={cond:.2e}); shrink R or widen the window")
    c, *_ = np.linalg.lstsq(A, fs, rcond=None)
    resid = float(np.max(np.abs(A @ c - fs)))
    return c / t_scale ** np.arange(R + 1), resid


def _neville_at_zero(ts: np.ndarray, fs: np.ndarray) -> complex:
    p = list(fs.astype(np.complex128))
    n = len(ts)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (ts[i + k] * p[i] - ts[i] * p[i + 1]) / (ts[i + k] - ts[i])
    return p[0]


def _richardson(ts: np.ndarray, fs: np.ndarray, R: int) -> np.ndarray:
    """Peel off coefficients one at a time by polynomial extrapolation to ``t = 0``."""
    idx = np.unique(np.linspace(0, len(ts) - 1, R + 1).round().astype(int))
    t, f = ts[idx], fs[idx].astype(np.complex128)
    out = []
    for _ in range(R + 1):
        if len(t) == 0:
            out.append(0j)
            continue
        c = _neville_at_zero(t, f)
        out.append(c)
        f = (f - c) / t
        t, f = t[1:], f[1:]
    return np.array(out)


def fit_asymptotics(
    f: Callable[[np.ndarray], np.ndarray],
    p: int,
    window: tuple[float, float],
    R: int | None = None,
    points: int = 64,
    method: str = "lstsq",
    kernel: str = "abs",
    truncation_bound: float = 0.0,
) -> AsymptoticSeries:
    """Fit ``t^p f(t) ~ sum_r b_r t^r`` on a geometric grid inside ``window``.

    ``f`` maps an array of ``t`` values to the (unweighted) traces.  With
    ``method="richardson"`` the coefficients come from successive polynomial
    extrapolation instead of least squares.
    """
    if R is None:
        R = p + 2
    if R < p:
        raise PreconditionError("R must be at least p")
    if points < 3 * (R + 1):
        raise PreconditionError(f"need at least {3 * (R + 1)} sample points for R={R}")
    t_min, t_max = window
    if not (0 < t_min < t_max):
        raise WindowError(f"empty fitting window ({t_min:g}, {t_max:g})")
    ts = np.geomspace(t_min, t_max, points)
    fs = np.asarray(f(ts), dtype=np.complex128) * ts ** p

    if method == "richardson":
        coeffs = _richardson(ts, fs, R)
        A = np.vander(ts, R + 1, increasing=True)
        resid = float(np.max(np.abs(A @ coeffs - fs)))
        err = np.zeros(R + 1)
    elif method == "lstsq":
        coeffs, resid = _lstsq(ts, fs, R, t_max)
        # stability: one more term, and a window with the top quarter removed
        more, _ = _lstsq(ts, fs, R + 1, t_max)
        keep = ts <= t_min + 0.75 * (t_max - t_min)
        if keep.sum() >= 2 * (R + 1):
            short, _ = _lstsq(ts[keep], fs[keep], R, ts[keep][-1])
        else:
            short = coeffs
        err = np.maximum(np.abs(more[: R + 1] - coeffs), np.abs(short - coeffs))
    else:
        raise PreconditionError(f"unknown fit method {method!r}")
    return AsymptoticSeries(
        p=p,
        coeffs=coeffs,
        fit_residual=resid,
        truncation_bound=truncation_bound,
        kernel=kernel,
        coeff_err=err,
        window=(float(t_min), float(t_max)),
        source="fit",
    )


@dataclass(frozen=True)
class FitConfig:
    """Sampling and fitting parameters for numeric heat-trace expansions."""

    kernel: str = "gauss"
    points: int = 64
    ratio: float = 1.15
    R: int | None = None
    eps_tail: float = 1e-12
    t_max: float | None = None
    method: str = "lstsq"

    def with_(self, **kw) -> "FitConfig":
        return replace(self, **kw)

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel,
            "points": self.points,
            "ratio": self.ratio,
            "R": self.R,
            "eps_tail": self.eps_tail,
            "t_max": self.t_max,
            "method": self.method,
        }


def _merged_weights(d: np.ndarray, D: DiracData, kernel: str) -> tuple[np.ndarray, np.ndarray, bool]:
    """Sum the diagonal over equal eigenvalues; suspensions repeat each one many times."""
    mu, gaussian = _kernel_spectrum(D, kernel)
    w, uniq = merge_diagonal(d, mu)
    return w, uniq, gaussian


def merge_diagonal(d: np.ndarray, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weights summed over equal values of ``mu`` (zero entries dropped) and those values."""
    keep = d != 0
    uniq, inv = np.unique(mu[keep], return_inverse=True)
    dk = d[keep]
    w = np.bincount(inv, dk.real, uniq.size) + 1j * np.bincount(inv, dk.imag, uniq.size)
    return w, uniq


def trace_expansion(
    b,
    D: DiracData,
    growth: Growth,
    config: FitConfig = FitConfig(),
    R: int | None = None,
    weight: float | None = None,
) -> AsymptoticSeries:
    """Numeric expansion of ``t^p Tr(b K_t)`` for the kernel selected in ``config``.

    Diagonal entries above the spectral cutoff are dropped, so that the sampled
    trace is exactly the part of the spectrum the truncation represents faithfully.
    ``weight`` overrides the bound on single diagonal entries used for the tail
    (needed when ``b`` is a diagonal already summed over equal eigenvalues).
    """
    d = np.where(D.mu <= D.spectral_cutoff, _diag_of(b), 0)
    if weight is None:
        weight = float(np.max(np.abs(d))) if d.size else 0.0
    p = D.summability_p
    if weight == 0.0:
        R_ = R if R is not None else (config.R if config.R is not None else p + 2)
        return AsymptoticSeries(p=p, coeffs=np.zeros(R_ + 1), kernel=config.kernel, source="fit", window=None)
    t_max = config.t_max if config.t_max is not None else default_t_max(config.kernel)
    window = truncation_window(D, growth, config.eps_tail, config.kernel, t_max, weight)
    if window[0] == 0.0:
        raise WindowError("an infinite tail tolerance gives no lower end for the fitting window")
    tb = weight * window[0] ** p * tail_bound(window[0], D.spectral_cutoff, growth, config.kernel)
    w, mu, gaussian = _merged_weights(d, D, config.kernel)
    return fit_asymptotics(
        lambda ts: _kernels.heat_sums(w, mu, np.asarray(ts, dtype=np.float64), gaussian),
        p,
        window,
        R=R if R is not None else config.R,
        points=config.points,
        method=config.method,
        kernel=config.kernel,
        truncation_bound=tb,
    )


# ---------------------------------------------------------------------------
# exact expansions of registered spectra


def _sphere_abs(R: int) -> RationalSeries:
    # t^2 Tr e^{-t|D|} = 4 t^2 e^{-t} / (1 - e^{-t})^2 = 4 (t/(1-e^{-t}))^2 e^{-t}
    n = n_coefficients(R)
    return (n * n * exp_series(-1, R)).scale(4)


def _circle_abs(R: int) -> RationalSeries:
    # zero mode shifted to 1: t (e^{-t} + 2 e^{-t}/(1 - e^{-t})) = t e^{-t} + 2 (t/(1-e^{-t})) e^{-t}
    e = exp_series(-1, R)
    return e.shift(1) + (n_coefficients(R) * e).scale(2)


def _torus_abs_coeffs(R: int) -> np.ndarray:
    """``t^2 Tr e^{-t|D|}`` for the torus with the zero modes shifted to 1.

    Poisson summation gives ``sum_{Z^2} e^{-t|x|} = sum_k 2 pi t / (t^2 + 4 pi^2 |k|^2)^{3/2}``;
    the ``k != 0`` terms expand in odd powers of ``t`` with lattice sums
    ``Z(s) = sum' |k|^{-s} = 4 zeta(s/2) beta(s/2)``.
    """
    import mpmath as mp

    out = np.zeros(R + 1)
    out[0] = 4 * pi  # 2 copies of 2 pi / t^2
    # remove the two (0,0) modes (value 1) and add them back shifted: 2 (e^{-t} - 1)
    for j in range(1, R - 1):
        out[j + 2] += 2 * (-1) ** j / factorial(j)
    # k != 0 Poisson terms: 2 pi t sum' (4 pi^2 k^2)^{-3/2} (1 + t^2/(4 pi^2 k^2))^{-3/2}
    for j in range(0, R):
        power = 1 + 2 * j  # power of t in Tr
        if power + 2 > R:
            break
        s = 3 + 2 * j
        lattice = 4 * mp.zeta(mp.mpf(s) / 2) * mp.dirichlet(mp.mpf(s) / 2, [0, 1, 0, -1])
        binom = mp.binomial(-1.5, j)
        term = 2 * mp.pi * binom * lattice / (2 * mp.pi) ** s
        out[power + 2] += 2 * float(term)
    return out


def exact_expansion(descriptor: str, R: int = 6) -> AsymptoticSeries:
    """Expansion coefficients of a registered closed-form heat trace.

    Descriptors: ``N`` (``t Tr e^{-tN}``), ``circle`` and ``circle-F`` (``t Tr e^{-t|D|}``
    and ``t Tr F e^{-t|D|}``), ``sphere-|D|`` (``t^2 Tr e^{-t|D|}``),
    ``sphere-F`` and ``sphere-gamma`` (identically zero), ``torus-gaussian``
    (``t^2 Tr e^{-t^2 D^2}``), ``torus-|D|``, ``torus-F`` (``t^2 Tr F e^{-t|D|}``)
    and ``torus-gamma``.
    """
    key = descriptor.strip()
    p = {"N": 1, "circle": 1, "circle-F": 1}.get(key, 2)
    if key == "N":
        cs = n_coefficients(R).to_floats()
    elif key == "circle":
        cs = _circle_abs(R).to_floats()
    elif key == "circle-F":
        cs = exp_series(-1, R).shift(1).to_floats()
    elif key == "sphere-|D|":
        cs = _sphere_abs(R).to_floats()
    elif key in ("sphere-F", "sphere-gamma", "torus-gamma"):
        cs = np.zeros(R + 1)
    elif key == "torus-gaussian":
        cs = np.zeros(R + 1)
        cs[0] = 2 * pi
    elif key == "torus-|D|":
        cs = _torus_abs_coeffs(R)
    elif key == "torus-F":
        # only the two shifted zero modes carry F = +1 without a partner
        cs = exp_series(-1, R).shift(2).scale(2).to_floats()
    else:
        raise PreconditionError(f"unknown spectrum descriptor {descriptor!r}")
    kernel = "gauss" if key == "torus-gaussian" else "abs"
    return AsymptoticSeries(p=p, coeffs=cs, kernel=kernel, source="exact")


def rational_expansion(descriptor: str, R: int = 6) -> RationalSeries:
    """Exact rational coefficients for the descriptors that admit them."""
    if descriptor == "N":
        return n_coefficients(R)
    if descriptor == "circle":
        return _circle_abs(R)
    if descriptor == "circle-F":
        return exp_series(-1, R).shift(1)
    if descriptor == "sphere-|D|":
        return _sphere_abs(R)
    if descriptor == "torus-F":
        return exp_series(-1, R).shift(2).scale(2)
    raise PreconditionError(f"descriptor {descriptor!r} has no rational expansion")
