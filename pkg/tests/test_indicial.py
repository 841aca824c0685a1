from fractions import Fraction

import pytest
import sympy as sp

from k3lambda import indicial

T = sp.symbols("t1:5")


def to_sympy(p):
    return sum(sp.Rational(v.numerator, v.denominator) * sp.prod([t ** e for t, e in zip(T, m)])
               for m, v in ((m, Fraction(v)) for m, v in p.items()))


@pytest.fixture(scope="module", params=["o1", "o1plus"])
def system(request):
    tag = request.param
    ideal = indicial.indicial_ideal(tag)
    gb = sp.groebner([to_sympy(p) for p in ideal], *T, order="lex")
    return tag, ideal, gb


def test_ideal_is_nine_quadrics(system):
    _, ideal, _ = system
    assert len(ideal) == 9
    assert all(sum(m) == 2 for p in ideal for m in p)


def test_quotient_dimensions_match_groebner(system):
    _, ideal, gb = system
    dims, std = indicial.graded_quotient(ideal)
    lead = [sp.Poly(g, *T).monoms(order="lex")[0] for g in gb.exprs]
    for d in range(4):
        oracle = [m for m in indicial.monomials(d)
                  if not any(all(a >= b for a, b in zip(m, l)) for l in lead)]
        assert sorted(oracle) == sorted(std[d])
    assert dims == [1, 4, 1, 0]


def test_pairing_matches_groebner_normal_form(system):
    tag, ideal, gb = system
    M = indicial.pairing_matrix(ideal, 2)
    top = indicial.graded_quotient(ideal)[1][2][0]
    top_sym = to_sympy({top: 1})
    for i in range(4):
        for j in range(4):
            _, r = gb.reduce(T[i] * T[j])
            coef = sp.Poly(r, *T).coeff_monomial(top_sym) if r != 0 else 0
            assert sp.expand(r - coef * top_sym) == 0
            assert M[i][j] == 2 * Fraction(int(sp.Rational(coef).p), int(sp.Rational(coef).q))
    assert M == [[Fraction(x) for x in row] for row in indicial.EXPECTED_M[tag]]


def test_gram_decomposition(system):
    tag, ideal, _ = system
    M = indicial.pairing_matrix(ideal, 2)
    assert indicial.gram_check(M, indicial.GRAM_WITNESS[tag], indicial.hyperbolic_target(2))
    # a non-unimodular witness is rejected
    bad = [row[:] for row in indicial.GRAM_WITNESS[tag]]
    bad[0] = [2 * x for x in bad[0]]
    assert not indicial.gram_check(M, bad, indicial.hyperbolic_target(2))


def test_standard_monomials():
    assert indicial.indicial_report("o1")["standard"][2] == ["t4t4"]
    assert indicial.indicial_report("o1plus")["standard"][2] == ["t3t4"]


def test_functional_is_linear_in_d():
    ideal = indicial.indicial_ideal("o1")
    p = {(1, 1, 0, 0): Fraction(1), (0, 0, 0, 2): Fraction(3)}
    assert indicial.functional(ideal, p, 4) == 2 * indicial.functional(ideal, p, 2)


def test_report_passes():
    for tag in ("o1", "o1plus"):
        assert indicial.indicial_report(tag)["pass"]
