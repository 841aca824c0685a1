"""Semi-invariants and the S6 action, checked symbolically with sympy minors."""

import pytest
import sympy as sp

from k3lambda import moduli

Z = sp.symbols("z1:5")


def poly_sym(p, syms=Z):
    return sum(sp.Rational(c.numerator, c.denominator) * sp.prod([s ** e for s, e in zip(syms, m)])
               for m, c in p.t.items())


def gauge_matrix():
    """(E3 | X) with a0 = b0 = c0 = a1 = b1 = 1, solved from the coordinate formulas."""
    a2, b2, c1, c2 = sp.symbols("a2 b2 c1 c2")
    a0 = b0 = c0 = a1 = b1 = 1
    eqs = [Z[0] + a1 * c1 / (a0 * c2), Z[1] + a1 * b1 / (a2 * b0),
           Z[2] + b1 * c1 / (b2 * c0), Z[3] - a2 * b2 * c2 / (a1 * b1 * c1)]
    sol = sp.solve(eqs, [a2, b2, c1, c2], dict=True)
    assert len(sol) == 1
    s = sol[0]
    X = [[s[a2], b1, c0], [a0, s[b2], s[c1]], [a1, b0, s[c2]]]
    return sp.Matrix([[int(i == j) for j in range(3)] + X[i] for i in range(3)])


A0 = gauge_matrix()


def y_sym(A, blocks):
    return A[:, [c - 1 for c in blocks[0]]].det() * A[:, [c - 1 for c in blocks[1]]].det()


@pytest.mark.parametrize("s", sorted(moduli.Y_INDEX))
def test_p_polynomials_are_minor_products(s):
    P = moduli.p_polynomials()[s]
    assert sp.simplify(poly_sym(P) - y_sym(A0, moduli.Y_INDEX[s])) == 0


def coords_sym(A):
    B = A[:, :3]
    X = B.inv() * A[:, 3:]
    a2, b1, c0 = X[0, 0], X[0, 1], X[0, 2]
    a0, b2, c1 = X[1, 0], X[1, 1], X[1, 2]
    a1, b0, c2 = X[2, 0], X[2, 1], X[2, 2]
    z = (-a1 * c1 / (a0 * c2), -a1 * b1 / (a2 * b0), -b1 * c1 / (b2 * c0), a2 * b2 * c2 / (a1 * b1 * c1))
    return z, B.det() ** 2 * a0 * b0 * c0


@pytest.mark.parametrize("sigma", list(moduli.CLOSED_FORMS), ids=lambda s: "".join(map(str, s)))
def test_closed_forms_symbolically(sigma):
    z0, f0 = coords_sym(A0)
    Asig = sp.Matrix([[A0[r, sigma[i] - 1] for i in range(6)] for r in range(3)])
    zs, fs = coords_sym(Asig)
    g = sp.cancel(fs / f0)
    cz, cg = moduli.CLOSED_FORMS[sigma](Z)
    for a, b in zip(zs, cz):
        assert sp.cancel(a - sp.sympify(b)) == 0
    # the listed factor belongs to the reverse transition
    assert sp.cancel(g * sp.sympify(cg) - 1) == 0


def test_closed_form_check_report():
    rep = moduli.closed_form_check(20, 0)
    assert rep["pass"]
    assert all(v["points"] == 20 for v in rep["sigmas"].values())


def test_partition_calculus():
    assert moduli.canonical_partition(((4, 5, 6), (2, 1, 3))) == (((1, 2, 3), (4, 5, 6)), -1)
    assert moduli.signed_index(((3, 1, 4), (6, 5, 2))) == (3, 1)
    with pytest.raises(ValueError):
        moduli.canonical_partition(((1, 2, 3), (3, 4, 5)))


def test_permutations():
    s = moduli.cycles_to_perm([(2, 3, 4, 5, 6, 1)])
    assert s == (2, 3, 4, 5, 6, 1)
    assert moduli.compose(s, moduli.inverse(s)) == moduli.identity_perm()
    a, b = moduli.transposition(1, 2), moduli.transposition(2, 3)
    assert moduli.compose(a, b) == (2, 3, 1, 4, 5, 6)
    assert len(moduli.all_perms()) == 720


def test_q2_polynomial():
    # Q2 = -1 + zt1 zt2 zt4 (confirmed at random points by the minor oracle below)
    q = moduli.q_polynomials()[2]
    assert q.t == {(0, 0, 0, 0): -1, (1, 1, 0, 1): 1}


def test_oracles():
    assert moduli.minor_oracle_check()
    assert moduli.q_oracle_check()
    assert moduli.torus_invariance_check()


def test_action_properties():
    sig = list(moduli.CLOSED_FORMS)
    pairs = [(a, b) for a in sig for b in sig]
    assert moduli.antihomomorphism_check(pairs)
    assert moduli.cocycle_check(pairs)


def test_o2_alpha():
    rep = moduli.o2_alpha_check()
    assert rep["pass"]
    assert moduli.ALPHA == (6, 4, 5, 2, 3, 1)


def test_matrix_rejects_discriminant():
    with pytest.raises(ValueError):
        moduli.matrix_from_z((1, 1, 1, 0))
    # P_2 = -1 + z1 z3 z4 vanishes here, so a minor does too
    with pytest.raises(ValueError):
        moduli.matrix_from_z((1, 5, 1, 1))
