"""Truncated series arithmetic, checked against sympy expansions."""

from fractions import Fraction

import pytest
import sympy as sp

from k3lambda.series import (Coefficient, ExpRelationInverse, LogSeries, MultiSeries, TruncationPolicy,
                             compose_poly, solve_fixed_point)

x, y, t = sp.symbols("x y t")
POL = TruncationPolicy((1, 1), 6)


def sympy_terms(expr, order=6):
    """Total-degree <= order Taylor coefficients of expr(x, y) as Fractions."""
    ser = sp.series(expr.subs({x: t * x, y: t * y}), t, 0, order + 1).removeO()
    poly = sp.Poly(sp.expand(ser.subs(t, 1)), x, y)
    return {m: Fraction(int(c.p), int(c.q)) for m, c in zip(poly.monoms(), poly.coeffs()) if c != 0}


def as_dict(s):
    return {tuple(int(v) for v in e): c for e, c in s.to_dict().items()}


F_EXPR = 1 + x + 2 * y - x * y / 3
F = MultiSeries(POL, {(0, 0): 1, (1, 0): 1, (0, 1): 2, (1, 1): Fraction(-1, 3)})


@pytest.mark.parametrize("name, ours, expr", [
    ("invert", lambda: F.invert(), 1 / F_EXPR),
    ("log", lambda: F.log(), sp.log(F_EXPR)),
    ("exp", lambda: (F - 1).exp(), sp.exp(F_EXPR - 1)),
    ("sqrt", lambda: F.power_unit(Fraction(1, 2)), sp.sqrt(F_EXPR)),
    ("cube", lambda: F ** 3, F_EXPR ** 3),
    ("power_minus_two", lambda: F ** -2, F_EXPR ** -2),
])
def test_against_sympy(name, ours, expr):
    assert as_dict(ours()) == sympy_terms(expr)


def test_exp_log_round_trip():
    assert F.log().exp() == F
    assert (F * F.invert()) == MultiSeries.one(POL)


def test_coefficient_ring():
    k, p = Coefficient.kappa(), Coefficient.varpi()
    a = k * 3 + p - Fraction(1, 2)
    assert (a - a).is_zero()
    assert (k * p)[(1, 1)] == 1
    assert (a * 2)[(1, 0)] == 6
    assert Coefficient.from_json(a.to_json()) == a
    assert not a.is_rational() and Coefficient(5).rational() == 5


def test_laurent_window_and_quarter_exponents():
    pol = TruncationPolicy((1, 0), 2, window=1)
    s = MultiSeries(pol, {(Fraction(1, 2), 1): 3, ("1/4", -1): 1, (0, 2): 7, (3, 0): 1})
    # (0, 2) breaks the window, (3, 0) the weight cutoff
    assert len(s) == 2
    assert s[(Fraction(1, 4), -1)] == 1
    sq = s * s
    assert sq[(Fraction(1, 2), -2)] == 0  # outside the window after squaring
    assert sq[(Fraction(3, 4), 0)] == 6


def test_format_signs():
    s = MultiSeries(POL, {(0, 0): 1, (1, 0): -4, (0, 1): 2})
    assert s.format(["x", "y"]) == "1 + 2*y - 4*x"


def test_compose_poly():
    u = MultiSeries(POL, {(1, 0): 1, (0, 1): 1})
    v = MultiSeries(POL, {(1, 0): 1, (0, 1): -1})
    got = compose_poly({(2, 0): 1, (0, 2): -1, (0, 0): 5}, [u, v])
    assert as_dict(got) == sympy_terms(5 + (x + y) ** 2 - (x - y) ** 2)


def test_euler_operator():
    assert as_dict(F.euler(0)) == sympy_terms(x * sp.diff(F_EXPR, x))


def test_log_series_product_rule():
    L1 = LogSeries.log_var(POL, 0)
    s = LogSeries.from_series(F)
    prod = L1 * s
    # theta_x (log x * F) = F + log x * theta_x F
    lhs = prod.euler(0)
    rhs = s + L1 * LogSeries.from_series(F.euler(0))
    assert lhs == rhs


def sympy_reversion(order):
    """Coefficients of z(Q) from Q = z exp(-z - z^2/2) by undetermined coefficients."""
    Q = sp.symbols("Q")
    a = sp.symbols(f"a2:{order + 1}")
    z = Q + sum(c * Q ** k for k, c in zip(range(2, order + 1), a))
    rel = sp.series(z * sp.exp(-z - z ** 2 / 2), Q, 0, order + 1).removeO()
    sol = sp.solve([sp.expand(rel).coeff(Q, k) for k in range(2, order + 1)], a, dict=True)[0]
    coeffs = {1: Fraction(1)}
    for k, c in zip(range(2, order + 1), a):
        v = sp.Rational(sol[c])
        coeffs[k] = Fraction(int(v.p), int(v.q))
    return coeffs


def test_fixed_point_and_lagrange_inversion_agree():
    pol = TruncationPolicy((1,), 7)
    sol = solve_fixed_point([(1, (1,))], lambda zs: [zs[0] + zs[0] * zs[0].scale(Fraction(1, 2))], pol)
    zvar = MultiSeries.var(pol, 0)
    inv = ExpRelationInverse([1], [zvar + (zvar * zvar).scale(Fraction(1, 2))], pol)
    expected = sympy_reversion(7)
    assert {int(e[0]): c for e, c in sol[0].to_dict().items()} == expected
    assert inv.mirror()[0] == sol[0]


def test_fixed_point_rejects_nonzero_constant():
    pol = TruncationPolicy((1,), 3)
    with pytest.raises(ValueError):
        solve_fixed_point([(1, (1,))], lambda zs: [zs[0] + 1], pol)
