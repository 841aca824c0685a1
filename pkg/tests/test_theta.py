from fractions import Fraction

import pytest

from k3lambda import theta


def r4(n):
    # Jacobi's four-square count, independent of any series code
    if n == 0:
        return 1
    return 8 * sum(d for d in range(1, n + 1) if n % d == 0 and d % 4)


def sigma1(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def coeffs_1d(s):
    return {e[0]: c.rational() for e, c in s.terms()}


def test_jacobi_fourth_powers():
    N = 12
    t3 = theta.jacobi_theta(3, N)
    t4 = theta.jacobi_theta(4, N)
    t2 = theta.jacobi_theta(2, N)
    assert coeffs_1d(t3 ** 4) == {Fraction(n): r4(n) for n in range(N + 1) if r4(n)}
    assert coeffs_1d(t4 ** 4) == {Fraction(n): (-1) ** n * r4(n) for n in range(N + 1)}
    assert coeffs_1d(t2 ** 4) == {Fraction(n): 16 * sigma1(n) for n in range(1, N + 1, 2)}


def test_jacobi_quartic_relation():
    N = 10
    t2, t3, t4 = (theta.jacobi_theta(k, N) for k in (2, 3, 4))
    assert (t3 ** 4 - t4 ** 4 - t2 ** 4).is_zero()


def collapse(s):
    """Set q3 = q4 = 1 (finite for each (e1, e2) since the exponents are bounded)."""
    out = {}
    for e, c in s.terms():
        out[(e[0], e[1])] = out.get((e[0], e[1]), 0) + c.rational()
    return {k: v for k, v in out.items() if v}


def jacobi_square_pair(a, b, N):
    # theta_{a,b}(q)^2 as a lattice sum over Z[i]: theta_3, theta_4, theta_2, 0
    kind = {(0, 0): 3, (0, 1): 4, (1, 0): 2}.get((a, b))
    if kind is None:
        return None
    return theta.jacobi_theta(kind, N) ** 2


@pytest.mark.parametrize("c", theta.CHARACTERISTICS, ids=lambda c: c.name)
def test_genus2_factorizes_at_q3_q4_one(c):
    N = 4
    T = theta.genus2_theta(c, theta.theta_policy(N, N))
    f1 = jacobi_square_pair(c.s[0], c.s[2], N)
    f2 = jacobi_square_pair(c.s[1], c.s[3], N)
    if f1 is None or f2 is None:
        assert collapse(T) == {}
        return
    expected = {}
    for (a,), x in f1.to_dict().items():
        for (b,), y in f2.to_dict().items():
            if a + b <= N:
                expected[(a, b)] = x * y
    assert collapse(T) == expected


def test_theta6_leading_terms():
    T6 = theta.genus2_theta("T6", theta.theta_policy(1, 1))
    assert T6.to_dict() == {(0, 0, 0, 0): 1, (1, 0, 0, 0): 4, (0, 1, 0, 0): 4}


def test_characteristic_lookup():
    assert theta.characteristic(((2, 4, 6), (1, 3, 5))).name == "T6"
    assert theta.characteristic(1).partition == ((1, 2, 3), (4, 5, 6))
    assert theta.characteristic("t10").s == (0, 1, 1, 0)


def test_report():
    rep = theta.theta_report(2, 2)
    assert rep == {"rank": 5, "rank_expected": 5, "leading_tilde": True, "integral": True,
                   "constant_terms": True, "pass": True}


def test_theta_tilde_squares_back():
    pol = theta.theta_policy(3, 3)
    tt = theta.theta_tilde(pol)
    assert tt * tt == theta.theta_tilde_square(pol)


def test_theta_tilde_odd_in_q3_q4_swap():
    pol = theta.theta_policy(3, 3)
    tt = theta.theta_tilde(pol)
    assert tt.swap_variables(2, 3) == -tt


def test_integral_coefficients():
    assert theta.integrality(theta.theta_policy(3))


def test_rank_needs_enough_terms():
    with pytest.raises(ValueError):
        theta.theta_square_rank(theta.theta_policy(0, 0))
