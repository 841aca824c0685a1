"""The Legendre family: Frobenius solutions, the lambda function, S3 charts.

omega(z, rho) = sum c(n + rho) z^(n + rho) with
c(n) = Gamma(n + 1/2)^2 / (Gamma(1/2)^2 Gamma(n + 1)^2), so omega_0 is
2F1(1/2, 1/2; 1; z) and is killed by theta^2 - z (theta + 1/2)^2.

The derivative d/drho omega at rho = 0 is stored as ``omega1``; the conventional
normalisation 2/(2 pi i) is never evaluated.  With q = exp(pi i tau) and
tau = omega_1/omega_0 one gets q = z exp(omega1/omega0 - log z), and the
constant -4 log 2 in the exponent turns into the rational factor 1/16.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Tuple

from .series import Coefficient, LogSeries, MultiSeries, TruncationPolicy, compose_poly, solve_fixed_point
from .theta import jacobi_theta

KAPPA = Coefficient.kappa()

# pairings of {1,2,3,4} in the order (12|34), (13|24), (14|23)
PAIRINGS = (((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3)))
# P_I(z) as coefficient lists [c0, c1]
P_AFFINE = {PAIRINGS[0]: (-1, 1), PAIRINGS[1]: (-1, 0), PAIRINGS[2]: (0, -1)}
# Theta(I)^2 in terms of Jacobi thetas: P_I omega_0^2 = -theta_k^4
THETA_OF = {PAIRINGS[0]: 4, PAIRINGS[1]: 3, PAIRINGS[2]: 2}


def z_policy(N) -> TruncationPolicy:
    return TruncationPolicy((1,), N)


def c_coeff(n: int) -> Fraction:
    """c(n) = (binom(2n, n) / 4^n)^2."""
    return Fraction(comb(2 * n, n), 4 ** n) ** 2


def c_log_derivative(n: int) -> Coefficient:
    """d/drho log c(n + rho) at 0, i.e. 2 (psi(n + 1/2) - psi(n + 1)), in Q[kappa]."""
    h = sum(Fraction(2, 2 * j - 1) - Fraction(1, j) for j in range(1, n + 1))
    return KAPPA * (-4) + 2 * h


@dataclass
class EllipticSolutionPair:
    omega0: MultiSeries
    omega1: LogSeries

    @property
    def sigma(self) -> MultiSeries:
        """omega1 - log(z) omega0."""
        return self.omega1.component((0,))


def ell_solutions(policy: TruncationPolicy | int) -> EllipticSolutionPair:
    if not isinstance(policy, TruncationPolicy):
        policy = z_policy(policy)
    N = int(policy.cutoff)
    om0 = MultiSeries(policy, {(n,): c_coeff(n) for n in range(N + 1)})
    sig = MultiSeries(policy, {(n,): c_log_derivative(n) * c_coeff(n) for n in range(N + 1)})
    om1 = LogSeries(policy, {(1,): om0, (0,): sig})
    return EllipticSolutionPair(om0, om1)


def pf_apply(f: MultiSeries) -> MultiSeries:
    """(theta^2 - z (theta + 1/2)^2) f."""
    t = f.euler(0)
    tt = t.euler(0)
    return tt - (tt + t + f.scale(Fraction(1, 4))).mul_monomial((1,))


# --------------------------------------------------------------------------
# mirror map


def _first_mismatch(a: MultiSeries, b: MultiSeries):
    d = a - b
    keys = sorted(e for e, _ in d.terms())
    return None if not keys else [str(x) for x in keys[0]]


def mirror_exponent(pair: EllipticSolutionPair) -> Tuple[Coefficient, MultiSeries]:
    """sigma/omega0 split as (constant, rational series without constant term)."""
    S = pair.sigma * pair.omega0.invert()
    c = S.constant_term()
    rest = S - MultiSeries.constant(S.policy, c)
    if not rest.is_rational():
        raise ValueError("mirror exponent has transcendental non-constant terms")
    return c, rest


def mirror_map(N: int) -> MultiSeries:
    """z(q) solving q = (z/16) exp(s(z)) to order q^N."""
    pol = z_policy(N)
    pair = ell_solutions(pol)
    c, s = mirror_exponent(pair)
    if c != KAPPA * (-4):
        raise ValueError(f"unexpected constant {c} in the mirror exponent")
    s_poly = {tuple(int(x) for x in e): v.rational() for e, v in s.terms()}

    def S(z):
        return [compose_poly(s_poly, [z[0]]).scale(-1)]

    return solve_fixed_point([(16, (1,))], S, pol)[0]


def ell_lambda_identity(policy: TruncationPolicy | int = 20) -> dict:
    if not isinstance(policy, TruncationPolicy):
        policy = z_policy(policy)
    N = int(policy.cutoff)
    t0 = time.perf_counter()
    z = mirror_map(N)
    th = {k: jacobi_theta(k, N) ** 4 for k in (2, 3, 4)}
    om0 = {(n,): c_coeff(n) for n in range(N + 1)}
    w2 = compose_poly(om0, [z]) ** 2
    one = MultiSeries.constant(z.policy, 1)
    checks = {}

    def record(name, lhs, rhs):
        checks[name] = {"pass": lhs == rhs, "first_mismatch": _first_mismatch(lhs, rhs)}

    record("lambda", z * th[3], th[2])
    record("omega0_squared", w2, th[3])
    for I in PAIRINGS:
        a, b = P_AFFINE[I]
        P = one.scale(a) + z.scale(b)
        record("affine_" + "".join(map(str, I[0])) + "|" + "".join(map(str, I[1])), P * w2, -th[THETA_OF[I]])
    record("theta_relation", th[4] - th[3] + th[2], MultiSeries.zero(z.policy))
    lead = [str(z.coefficient((k,)).rational()) for k in range(1, min(N, 3) + 1)]
    return {
        "cutoff": N,
        "cn_convention": "Gamma(n+1)^2 in the denominator; the Gamma(n+1) variant is not annihilated",
        "pf_operator": "theta^2 - z(theta+1/2)^2",
        "lambda_leading": lead,
        "checks": checks,
        "seconds": round(time.perf_counter() - t0, 3),
        "pass": all(c["pass"] for c in checks.values()),
    }


# --------------------------------------------------------------------------
# S3 charts

Perm = Tuple[int, ...]


def compose(sigma: Perm, tau: Perm) -> Perm:
    return tuple(sigma[t - 1] for t in tau)


def inverse(sigma: Perm) -> Perm:
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s - 1] = i + 1
    return tuple(inv)


def swap(i, j) -> Perm:
    p = [1, 2, 3, 4]
    p[i - 1], p[j - 1] = j, i
    return tuple(p)


E = (1, 2, 3, 4)
S3 = {
    "e": E,
    "(12)": swap(1, 2),
    "(23)": swap(2, 3),
    "(23)(12)": compose(swap(2, 3), swap(1, 2)),
    "(12)(23)": compose(swap(1, 2), swap(2, 3)),
    "(13)": swap(1, 3),
}

# z^sigma as (numerator, denominator) coefficient lists, and G(sigma, e)
Z_TABLE = {
    "e": ((0, 1), (1,)),
    "(12)": ((1,), (0, 1)),
    "(23)": ((0, 1), (-1, 1)),
    "(23)(12)": ((-1, 1), (0, 1)),
    "(12)(23)": ((1,), (1, -1)),
    "(13)": ((1, -1), (1,)),
}
G_TABLE = {"e": (1,), "(12)": (0, 1), "(23)": (1, -1), "(23)(12)": (0, -1), "(12)(23)": (-1, 1), "(13)": (-1,)}


def _ev(p, z):
    return sum(Fraction(c) * z ** k for k, c in enumerate(p))


def _det2(a, b, c, d):
    return a * d - b * c


def base_matrix(z: Fraction):
    """A0 = (E2 X) in the gauge a0 = b0 = b1 = 1, a1 = z."""
    return [[Fraction(1), Fraction(0), Fraction(z), Fraction(1)], [Fraction(0), Fraction(1), Fraction(1), Fraction(1)]]


def bracket(A, i, j):
    return _det2(A[0][i - 1], A[0][j - 1], A[1][i - 1], A[1][j - 1])


def chart_data(A) -> Tuple[Fraction, Fraction]:
    """(z(A), (det B)^2 a0 b0) for A = B (E2 X), X = [[a1, b0], [a0, b1]]."""
    d = bracket(A, 1, 2)
    if d == 0:
        raise ZeroDivisionError("first two columns are dependent")
    # X = B^-1 (columns 3, 4)
    inv = [[A[1][1] / d, -A[0][1] / d], [-A[1][0] / d, A[0][0] / d]]
    cols = [[A[0][k], A[1][k]] for k in (2, 3)]
    X = [[inv[r][0] * cols[c][0] + inv[r][1] * cols[c][1] for c in range(2)] for r in range(2)]
    a1, b0, a0, b1 = X[0][0], X[0][1], X[1][0], X[1][1]
    if a0 * b0 == 0:
        raise ZeroDivisionError("a0 b0 vanishes")
    return a1 * b1 / (a0 * b0), d * d * a0 * b0


def act_numeric(sigma: Perm, z: Fraction) -> Tuple[Fraction, Fraction]:
    """(z^sigma, G(sigma, e)) from the column action col_i(A sigma) = col_sigma(i)(A)."""
    A = base_matrix(z)
    As = [[row[s - 1] for s in sigma] for row in A]
    zs, gs = chart_data(As)
    z0, g0 = chart_data(A)
    return zs, gs / g0


def _act_pairing(sigma: Perm, I):
    return tuple(tuple(sigma[i - 1] for i in b) for b in I)


def p_value(I, z: Fraction) -> Fraction:
    """P_I(z) = Y_I(A0)/(a0 b0) for any ordering of the pairs (sign tracked)."""
    A = base_matrix(z)
    return bracket(A, *I[0]) * bracket(A, *I[1])


def _points(count, seed):
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        v = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if v not in (0, 1) and v not in pts:
            pts.append(v)
    return pts


def s3_table_check(count=20, seed=0) -> dict:
    """Tables of z^sigma and G against the matrix action, and the P_I twist.

    All quantities are rational functions of z of degree <= 4, so agreement
    at 20 distinct points is an identity.
    """
    pts = _points(count, seed)
    out = {}
    for name, s in S3.items():
        zn, zd = Z_TABLE[name]
        z_ok = g_ok = twist_ok = True
        sinv = inverse(s)
        for z in pts:
            zs, g = act_numeric(s, z)
            z_ok &= zs == _ev(zn, z) / _ev(zd, z)
            g_ok &= g == _ev(G_TABLE[name], z)
            for I in PAIRINGS:
                twist_ok &= p_value(I, z) == g * p_value(_act_pairing(sinv, I), zs)
        out[name] = {"z_table": z_ok, "G_table": g_ok, "twist": twist_ok}
    return out


def phi(name_or_perm, z: Fraction) -> Fraction:
    s = S3.get(name_or_perm, name_or_perm)
    return act_numeric(s, z)[0]


def antihomomorphism_check(count=20, seed=1) -> dict:
    """phi_{sigma tau} = phi_tau o phi_sigma for all pairs in S3."""
    pts = _points(count, seed)
    ok = True
    for s in S3.values():
        for t in S3.values():
            for z in pts:
                try:
                    zs = phi(s, z)
                    lhs = phi(compose(s, t), z)
                    rhs = phi(t, zs)
                except ZeroDivisionError:
                    continue
                ok &= lhs == rhs
    # the worked example sigma = (12), tau = (23)
    st = compose(S3["(12)"], S3["(23)"])
    example = all(phi(st, z) == 1 / (1 - z) for z in pts)
    return {"all_pairs": ok, "example_(12)(23)": "1/(1-z)", "example_pass": example}


# twisted Picard-Fuchs -----------------------------------------------------


def _poly_series(p, pol):
    return MultiSeries(pol, {(k,): Fraction(c) for k, c in enumerate(p) if c})


def _laurent_rational(num, den, pol) -> MultiSeries:
    """num/den as a Laurent series; den = c z^b (1 + ...)."""
    b = next(k for k, c in enumerate(den) if c)
    unit = _poly_series(den[b:], pol)
    return (_poly_series(num, pol) * unit.invert()).mul_monomial((-b,))


def _sqrt_twist(G, pol) -> MultiSeries:
    """sqrt(G) up to a constant phase: z^(a/2) (G/(c z^a))^(1/2)."""
    a = next(k for k, c in enumerate(G) if c)
    c = Fraction(G[a])
    unit = _poly_series([Fraction(x) / c for x in G[a:]], pol)
    return unit.power_unit(Fraction(1, 2)).mul_monomial((Fraction(a, 2),))


def twisted_pf_check(name: str, N: int = 12, slack: int = 6) -> dict:
    """D_w annihilates sqrt(G) omega_0(z) for w = z^sigma, to order z^N.

    theta_w = (w / theta_z w) theta_z.  The computation runs at cutoff
    N + slack; each Laurent factor has order >= -1 and at most three of them
    meet in one term, so coefficients through z^N are exact.
    """
    pol = z_policy(N + slack)
    num, den = Z_TABLE[name]
    w = _laurent_rational(num, den, pol)
    tw = w.euler(0)
    lead = min(e[0] for e, _ in tw.terms())
    c = Fraction(tw.coefficient((lead,)).rational())
    r = w * tw.mul_monomial((-lead,)).scale(1 / c).invert().scale(1 / c).mul_monomial((-lead,))
    f = _sqrt_twist(G_TABLE[name], pol) * ell_solutions(pol).omega0

    def th(g):
        return r * g.euler(0)

    t1 = th(f)
    t2 = th(t1)
    res = t2 - w * (t2 + t1 + f.scale(Fraction(1, 4)))
    bad = sorted(e for e, v in res.terms() if e[0] <= N)
    return {"sigma": name, "checked_through": N, "pass": not bad,
            "first_mismatch": [str(x) for x in bad[0]] if bad else None}


def ell_s3_tables(N: int = 12, count=20, seed=0) -> dict:
    tables = s3_table_check(count, seed)
    twisted = {name: twisted_pf_check(name, N) for name in S3 if name != "e"}
    anti = antihomomorphism_check(count, seed + 1)
    ok = all(all(v.values()) for v in tables.values()) and all(t["pass"] for t in twisted.values()) \
        and anti["all_pairs"] and anti["example_pass"]
    return {"tables": tables, "twisted_pf": twisted, "antihomomorphism": anti, "pass": ok}


def elliptic_report(N: int = 20, seed=0) -> dict:
    pol = z_policy(N)
    pair = ell_solutions(pol)
    pf = pf_apply(pair.omega0)
    lam = ell_lambda_identity(pol)
    s3 = ell_s3_tables(min(N, 12), 20, seed)
    return {
        "omega0_leading": [str(c_coeff(n)) for n in range(3)],
        "pf_annihilates": pf.is_zero() or all(e[0] > N for e, _ in pf.terms()),
        "lambda": lam,
        "s3": s3,
        "pass": lam["pass"] and s3["pass"],
    }
