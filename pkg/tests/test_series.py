from __future__ import annotations

from fractions import Fraction
from math import factorial, pi

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qdsindex.errors import FitError, PreconditionError, WindowError
from qdsindex.models import circle_model, nctorus_model, sphere_model
from qdsindex.operators import DiracData, Op, ell2
from qdsindex.residues import abs_expansion
from qdsindex.series import (
    AsymptoticSeries,
    FitConfig,
    Growth,
    RationalSeries,
    exact_expansion,
    exp_series,
    fit_asymptotics,
    heat_samples,
    heat_trace,
    n_coefficients,
    rational_expansion,
    tail_bound,
    truncation_window,
)


def _sympy_coeffs(expr, R):
    t = sympy.Symbol("t")
    ser = sympy.series(expr(t), t, 0, R + 1).removeO()
    return [Fraction(str(sympy.nsimplify(ser.coeff(t, r)))) for r in range(R + 1)]


def test_recip_of_one_minus_t():
    s = RationalSeries([1, -1, 0, 0, 0, 0]).recip()
    assert list(s)[:6] == [1] * 6


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=2, max_size=6))
def test_mul_by_recip_is_one(cs):
    if cs[0] == 0:
        cs[0] = Fraction(1)
    s = RationalSeries(cs)
    prod = s * s.recip()
    assert prod[0] == 1
    assert all(prod[r] == 0 for r in range(1, len(cs)))


def test_bernoulli_generating_function():
    # t / (1 - e^{-t}) = sum B_n^+ t^n / n!
    got = n_coefficients(8)
    want = [Fraction(sympy.bernoulli(n, 1)) / factorial(n) for n in range(9)]
    assert list(got) == want
    assert list(got)[:5] == [1, Fraction(1, 2), Fraction(1, 12), 0, Fraction(-1, 720)]


def test_exp_series_matches_sympy():
    want = _sympy_coeffs(lambda t: sympy.exp(-2 * t), 6)
    assert list(exp_series(-2, 6)) == want


def _zero_mode_shift(t, count=1):
    # the kernel of D is traced with |D| = kernel_shift = 1
    return count * (np.exp(-t) - 1)


def test_circle_heat_trace_geometric_series():
    m = circle_model(200)
    for t in (0.2, 0.5, 1.0):
        exact = 1 + 2 * np.exp(-t) / (1 - np.exp(-t)) + _zero_mode_shift(t)
        assert heat_trace(m.identity(), m.D, t).real == pytest.approx(exact, rel=1e-12)
    assert heat_trace(Op.zeros(m.trunc), m.D, 0.3) == 0


def test_sphere_heat_trace_generating_function():
    m = sphere_model(40)
    t = 0.6
    exact = 4 * np.exp(-t) / (1 - np.exp(-t)) ** 2
    # the truncation misses the spectrum beyond the cutoff; the growth bound covers it
    got = heat_trace(m.identity(), m.D, t).real
    assert 0 <= exact - got <= tail_bound(t, m.D.spectral_cutoff, m.growth)


def test_torus_gaussian_heat_constant():
    m = nctorus_model(Lambda=60)
    t = 0.2
    val = t**2 * (heat_samples(m.identity(), m.D, [t], "gauss")[0].real - _zero_mode_shift(t**2, 2))
    assert val == pytest.approx(2 * pi, abs=1e-6)


def test_window_monotone_in_cutoff():
    g = Growth(C=2.0, q=1.0)
    w = []
    for L in (100, 200, 400):
        m = circle_model(L)
        w.append(truncation_window(m.D, g, 1e-10)[0])
    assert w[0] > w[1] > w[2]


def test_window_t_min_controls_tail():
    m = circle_model(200)
    t_min, _ = truncation_window(m.D, m.growth, 1e-10)
    exact = 1 + 2 * np.exp(-t_min) / (1 - np.exp(-t_min)) + _zero_mode_shift(t_min)
    assert abs(t_min * (heat_trace(m.identity(), m.D, t_min).real - exact)) < 1e-9


def test_window_infinite_eps_and_errors():
    m = circle_model(50)
    assert truncation_window(m.D, m.growth, float("inf"))[0] == 0.0
    with pytest.raises(WindowError):
        truncation_window(m.D, m.growth, 1e-300, t_max=0.01)
    with pytest.raises(PreconditionError):
        truncation_window(m.D, m.growth, -1.0)


def test_fit_recovers_polynomial():
    s = fit_asymptotics(lambda ts: 3 + 2 * ts, 0, (0.1, 1.0), R=3)
    assert s.coeff(0) == pytest.approx(3, abs=1e-12)
    assert s.coeff(1) == pytest.approx(2, abs=1e-12)
    assert s.fit_residual < 1e-12


def test_fit_number_operator_coefficients():
    M = 400
    D = DiracData(ell2(M), np.arange(M, dtype=float), summability_p=1, kernel_shift=0.0)
    window = truncation_window(D, Growth(1.0, 1.0), 1e-14, "abs", t_max=1.0)
    s = fit_asymptotics(lambda ts: heat_samples(np.ones(M), D, ts, "abs"), 1, window, R=12)
    for r, want in enumerate([1, 0.5, 1 / 12]):
        assert s.coeff(r).real == pytest.approx(want, abs=1e-6)


def test_fit_rejects_ill_conditioned():
    with pytest.raises(FitError):
        fit_asymptotics(lambda ts: np.ones_like(ts), 0, (0.5, 0.5000001), R=12)


def test_sphere_abs_expansion_matches_generating_function():
    want = _sympy_coeffs(lambda t: 4 * t**2 * sympy.exp(-t) / (1 - sympy.exp(-t)) ** 2, 6)
    assert list(rational_expansion("sphere-|D|", 6)) == want
    s = exact_expansion("sphere-|D|")
    assert s.coeff(0) == 4 and s.coeff(1) == 0 and s.coeff(2) == pytest.approx(-1 / 3)


def test_sphere_numeric_fit_agrees_with_exact():
    m = sphere_model(40)
    s = abs_expansion(m.identity(), m.D, m.growth, m.fit)
    e = exact_expansion("sphere-|D|")
    for r in range(3):
        assert s.coeff(r).real == pytest.approx(e.coeff(r), abs=max(1e-4, 2 * s.error_budget(r)))


def test_exact_descriptors():
    assert exact_expansion("N").coeffs.real.tolist()[:3] == pytest.approx([1, 0.5, 1 / 12])
    assert exact_expansion("torus-gaussian").coeff(0) == pytest.approx(2 * pi)
    assert exact_expansion("circle").coeff(0) == 2
    with pytest.raises(PreconditionError):
        exact_expansion("klein-bottle")


def test_series_error_budget_and_json():
    s = AsymptoticSeries(p=1, coeffs=[1, 2], fit_residual=1e-9, truncation_bound=1e-10, coeff_err=np.array([1e-8, 0]))
    assert s.error_budget(0) == pytest.approx(1e-9 + 1e-10 + 1e-8)
    assert s.error_budget(5) == pytest.approx(1.1e-9)
    assert s.to_json()["coeffs"][1] == [2.0, 0.0]


def test_fit_config_with():
    f = FitConfig()
    g = f.with_(R=7)
    assert g.R == 7 and f.R is None
