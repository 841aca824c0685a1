"""Gamma-ratio expansions against sympy, and the Frobenius solutions."""

from fractions import Fraction

import pytest
import sympy as sp

from k3lambda import gkz
from k3lambda.series import Coefficient

LOG2, PI = sp.log(2), sp.pi


def close(coef, expr):
    """Coefficient (kappa = log 2, varpi = pi^2) equals the sympy number to 50 digits.

    sympy does not reduce polygamma(1, k + 1/2) to closed form, so the
    comparison is numeric at high precision.
    """
    value = sum(sp.Rational(v.numerator, v.denominator) * LOG2 ** a * PI ** (2 * b)
                for (a, b), v in coef.items())
    return abs(sp.N(value - expr, 60)) < sp.Float("1e-50")


@pytest.mark.parametrize("x", [Fraction(1), Fraction(4), Fraction(1, 2), Fraction(7, 2), Fraction(-3, 2)])
def test_gamma_value(x):
    r, k = gkz.gamma_value(x)
    assert sp.simplify(sp.gamma(sp.Rational(x.numerator, x.denominator)) - sp.Rational(r.numerator, r.denominator) * sp.sqrt(PI) ** k) == 0


def poly_to_sympy(p):
    return sum(sp.Rational(v.numerator, v.denominator) * LOG2 ** a * PI ** (2 * b) * sp.EulerGamma ** g
               for (a, b, g), v in p.items())


@pytest.mark.parametrize("x", [Fraction(1), Fraction(3), Fraction(1, 2), Fraction(5, 2), Fraction(-1, 2), Fraction(-5, 2)])
def test_digamma_trigamma(x):
    sx = sp.Rational(x.numerator, x.denominator)
    assert sp.simplify(poly_to_sympy(gkz.digamma(x)) - sp.expand_func(sp.polygamma(0, sx))) == 0
    # sympy leaves polygamma(1, 5/2) unevaluated; compare to 60 digits instead
    assert abs(sp.N(poly_to_sympy(gkz.trigamma(x)) - sp.polygamma(1, sx), 60)) < sp.Float("1e-55")


def sympy_scheme(scheme, rho):
    expr = sp.Rational(scheme.norm.numerator, scheme.norm.denominator) / sp.sqrt(PI) ** scheme.half_power
    for l, a in scheme.num:
        expr *= sp.gamma(sum(li * r for li, r in zip(l, rho)) + sp.Rational(a.numerator, a.denominator))
    for l, a in scheme.den:
        expr /= sp.gamma(sum(li * r for li, r in zip(l, rho)) + sp.Rational(a.numerator, a.denominator))
    return expr


def line_derivatives(scheme, n, direction):
    """(f, f', f''/2) of t -> c(n + t*direction) at t = 0 by sympy series."""
    t = sp.symbols("t")
    rho = [ni + di * t for ni, di in zip(n, direction)]
    ser = sp.series(sympy_scheme(scheme, rho), t, 0, 3).removeO()
    return [sp.expand(ser).coeff(t, k) for k in range(3)]


CASES = [
    ("o1", (1, 1, 1, 2)),
    ("o1", (0, 0, 0, 1)),   # one pole in the denominator
    ("o1", (0, 0, 0, 0)),
    ("o1plus", (1, 1, 1, 1)),
    ("o1plus", (1, 0, 0, 0)),
    ("yoshida", (-1, 0, 0, 0)),
    ("yoshida", (-1, 1, 0, 0)),
]


@pytest.mark.parametrize("tag, n", CASES)
def test_rho_expansion_against_sympy(tag, n):
    s = gkz.SCHEMES[tag]
    unit = [tuple(int(j == i) for j in range(4)) for i in range(4)]
    lines = {i: line_derivatives(s, n, unit[i]) for i in range(4)}
    assert close(Coefficient(s.coeff(n)), lines[0][0])
    for i in range(4):
        assert close(s.first(n, i), lines[i][1])
        assert close(s.second(n, i, i), 2 * lines[i][2])
    pair = line_derivatives(s, n, (1, 0, 0, 1))
    mixed = pair[2] - lines[0][2] - lines[3][2]
    assert close(s.second(n, 0, 3), mixed)


def test_low_coefficients_o1():
    assert gkz.coeff("o1", (0, 0, 0, 0)) == 1
    # the 1/Gamma poles kill any n with n4 > n1 + n2
    assert gkz.coeff("o1", (0, 0, 0, 1)) == 0


@pytest.mark.parametrize("tag", ["o1", "o1plus", "o2", "o2plus", "o3plus"])
def test_annihilation_low_degree(tag):
    rep = gkz.verify_annihilation(tag, N=3)
    assert rep["pass"], rep["failures"]
    assert rep["checked"] == 54


@pytest.mark.parametrize("tag", ["o1", "o1plus"])
def test_quadratic_relation(tag):
    assert gkz.verify_quadratic_relation(tag, 2, 3)["pass"]


def test_quadratic_relation_needs_the_right_d():
    rep = gkz.verify_quadratic_relation("o1", 1, 2)
    assert not rep["pass"]


def test_yoshida_witness():
    rep = gkz.yoshida_laurent_witness(3)
    assert rep["yoshida_witness"] == {"n": [-1, 0, 0, 0], "value": {"1": "2"}}
    assert rep["yoshida_at_-1100"] == {"1": "-1"}
    assert rep["o1_negative_first"] == [] and rep["o1_negative_second"] == []
    assert rep["pass"]
