"""Jacobi theta constants, the ten even genus-2 theta constants and Theta-tilde.

Genus-2 thetas are lattice sums over n in Z[i]^2 with u = n + (1+i)/2 (s1, s2).
Writing u_j = x_j + i y_j, a lattice point contributes

    sign * q1^|u1|^2 q2^|u2|^2 (q3 q4)^(x1 x2 + y1 y2) (q3/q4)^(x1 y2 - y1 x2)

with sign = (-1)^(s3 (nu1 + mu1) + s4 (nu2 + mu2)) for n_j = nu_j + i mu_j.
The grading is |u1|^2 + |u2|^2 (weights 1 on q1, q2 and 0 on q3, q4); since
|e3|, |e4| <= e1 + e2 on every term, no window truncation is ever needed
once the window reaches the cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Dict, List, Sequence, Tuple

from .series import Coefficient, MultiSeries, TruncationPolicy

H = Fraction(1, 2)


def jacobi_theta(kind: int, N, policy: TruncationPolicy | None = None) -> MultiSeries:
    """theta_2, theta_3 or theta_4 in the nome q, up to q^N."""
    policy = policy or TruncationPolicy((1,), N)
    N = policy.cutoff
    terms: Dict = {}
    m = isqrt(int(N)) + 2
    for n in range(-m, m + 1):
        if kind == 2:
            e = (n + H) ** 2
            c = 1
        elif kind == 3:
            e, c = Fraction(n * n), 1
        elif kind == 4:
            e, c = Fraction(n * n), (-1) ** (n % 2)
        else:
            raise ValueError("kind must be 2, 3 or 4")
        if e <= N:
            terms[(e,)] = terms.get((e,), 0) + c
    return MultiSeries(policy, terms)


@dataclass(frozen=True)
class ThetaCharacteristic:
    index: int
    s: Tuple[int, int, int, int]
    partition: Tuple[Tuple[int, ...], Tuple[int, ...]]

    @property
    def name(self):
        return f"T{self.index}"


# ordered as Theta_1 .. Theta_10
CHARACTERISTICS = tuple(
    ThetaCharacteristic(i + 1, s, p)
    for i, (s, p) in enumerate([
        ((1, 1, 1, 1), ((1, 2, 3), (4, 5, 6))),
        ((1, 1, 0, 0), ((1, 2, 4), (3, 5, 6))),
        ((1, 0, 0, 0), ((1, 2, 5), (3, 4, 6))),
        ((1, 0, 0, 1), ((1, 2, 6), (3, 4, 5))),
        ((0, 1, 0, 0), ((1, 3, 4), (2, 5, 6))),
        ((0, 0, 0, 0), ((1, 3, 5), (2, 4, 6))),
        ((0, 0, 0, 1), ((1, 3, 6), (2, 4, 5))),
        ((0, 0, 1, 1), ((1, 4, 5), (2, 3, 6))),
        ((0, 0, 1, 0), ((1, 4, 6), (2, 3, 5))),
        ((0, 1, 1, 0), ((1, 5, 6), (2, 3, 4))),
    ])
)

BY_NAME = {c.name: c for c in CHARACTERISTICS}


def characteristic(key) -> ThetaCharacteristic:
    if isinstance(key, ThetaCharacteristic):
        return key
    if isinstance(key, int):
        return CHARACTERISTICS[key - 1]
    if isinstance(key, str):
        return BY_NAME[key.upper()]
    key = tuple(tuple(sorted(b)) for b in key)
    for c in CHARACTERISTICS:
        if c.partition == key or c.partition == key[::-1]:
            return c
    raise KeyError(key)


def theta_policy(N, W=None) -> TruncationPolicy:
    return TruncationPolicy((1, 1, 0, 0), N, (0, 0, N if W is None else W, N if W is None else W))


def _axis(shift: Fraction, bound):
    # integers nu with (nu + shift)^2 <= bound
    r = isqrt(int(bound)) + 2
    return [v for v in range(-r - 1, r + 1) if (v + shift) ** 2 <= bound]


@lru_cache(maxsize=None)
def _lattice_terms(s, bound) -> Dict[Tuple[Fraction, ...], int]:
    a1 = H * s[0]
    a2 = H * s[1]
    out: Dict[Tuple[Fraction, ...], int] = {}
    pts1 = [(n, m, n + a1, m + a1) for n in _axis(a1, bound) for m in _axis(a1, bound)]
    pts2 = [(n, m, n + a2, m + a2) for n in _axis(a2, bound) for m in _axis(a2, bound)]
    pts1 = [p for p in pts1 if p[2] ** 2 + p[3] ** 2 <= bound]
    pts2 = [p for p in pts2 if p[2] ** 2 + p[3] ** 2 <= bound]
    for n1, m1, x1, y1 in pts1:
        e1 = x1 * x1 + y1 * y1
        for n2, m2, x2, y2 in pts2:
            e2 = x2 * x2 + y2 * y2
            if e1 + e2 > bound:
                continue
            re = x1 * x2 + y1 * y2
            im = x1 * y2 - y1 * x2
            e3, e4 = re + im, re - im
            if abs(e3) > e1 + e2 or abs(e4) > e1 + e2:
                raise AssertionError("lattice window bound violated")
            sign = -1 if (s[2] * (n1 + m1) + s[3] * (n2 + m2)) % 2 else 1
            key = (e1, e2, e3, e4)
            out[key] = out.get(key, 0) + sign
    return {k: v for k, v in out.items() if v}


def genus2_theta(c, policy: TruncationPolicy, bound=None) -> MultiSeries:
    """Theta_c truncated to the policy (weights (1, 1, 0, 0))."""
    c = characteristic(c)
    if tuple(policy.weights) != (1, 1, 0, 0):
        raise ValueError("genus-2 thetas use weights (1, 1, 0, 0)")
    bound = policy.cutoff if bound is None else bound
    if bound < policy.cutoff:
        raise ValueError("lattice bound below the cutoff")
    return MultiSeries(policy, _lattice_terms(c.s, Fraction(bound)))


def all_thetas(policy: TruncationPolicy) -> List[MultiSeries]:
    return [genus2_theta(c, policy) for c in CHARACTERISTICS]


def theta_squares(policy: TruncationPolicy) -> List[MultiSeries]:
    return [t * t for t in all_thetas(policy)]


# --------------------------------------------------------------------------
# Theta-tilde


def theta_tilde_square(policy: TruncationPolicy) -> MultiSeries:
    """(1/12) ((sum Theta^4)^2 - 4 sum Theta^8)."""
    sq = theta_squares(policy)
    fourth = [t * t for t in sq]
    s4 = fourth[0]
    for t in fourth[1:]:
        s4 = s4 + t
    s8 = fourth[0] * fourth[0]
    for t in fourth[1:]:
        s8 = s8 + t * t
    return (s4 * s4 - s8 * 4).scale(Fraction(1, 12))


# Laurent polynomials over Q as {exponent tuple: Fraction}

def _lp_mul(a, b):
    out = {}
    for ea, va in a.items():
        for eb, vb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + va * vb
    return {e: v for e, v in out.items() if v}


def _lp_sub(a, b):
    out = dict(a)
    for e, v in b.items():
        out[e] = out.get(e, 0) - v
    return {e: v for e, v in out.items() if v}


def _lp_shift(a, m):
    return {tuple(x + y for x, y in zip(e, m)): v for e, v in a.items()}


def _lp_divide(num, den):
    """Exact quotient num/den of Laurent polynomials; raises if not divisible.

    Both sides are shifted to honest polynomials and divided in lex order; a
    leading remainder term not divisible by the leading divisor term means
    the division is not exact.
    """
    n = len(next(iter(den)))
    mn = tuple(-min(e[i] for e in num) for i in range(n))
    md = tuple(-min(e[i] for e in den) for i in range(n))
    r = _lp_shift(num, mn)
    g = _lp_shift(den, md)
    lead = max(g)
    q = {}
    while r:
        m = max(r)
        e = tuple(x - y for x, y in zip(m, lead))
        if min(e) < 0:
            raise ArithmeticError("Laurent division is not exact")
        c = r[m] / g[lead]
        q[e] = c
        r = _lp_sub(r, _lp_mul({e: c}, g))
    return _lp_shift(q, tuple(y - x for x, y in zip(mn, md)))


def leading_theta_tilde() -> Dict[Tuple[Fraction, ...], Fraction]:
    """-64 q1 q2 (1/q4 - 1/q3 - q3 + q4)."""
    o, one = Fraction(0), Fraction(1)
    return {(one, one, o, -one): Fraction(-64), (one, one, -one, o): Fraction(64),
            (one, one, one, o): Fraction(64), (one, one, o, one): Fraction(-64)}


def _slices(s: MultiSeries):
    out: Dict[Fraction, Dict] = {}
    for e, c in s.terms():
        if not c.is_rational():
            raise ValueError("rational series expected")
        out.setdefault(e[0] + e[1], {})[tuple(e)] = Fraction(c.rational())
    return out


def theta_tilde(policy: TruncationPolicy) -> MultiSeries:
    """Square root of theta_tilde_square with the leading term fixed above.

    Theta-tilde^2 starts at weight 4 with a non-monomial leading part, so the
    root is taken slice by slice in the weight e1 + e2: with T_2 the leading
    slice, T_d = (S_{d+2} - sum_{a+b=d+2, a,b>2} T_a T_b) / (2 T_2) by exact
    Laurent division.
    """
    N = policy.cutoff
    W = max(policy.windows[2], policy.windows[3], N + 2)
    big = TruncationPolicy((1, 1, 0, 0), N + 2, (0, 0, W, W))
    sl = _slices(theta_tilde_square(big))
    T2 = leading_theta_tilde()
    two = Fraction(2)
    if sl.get(Fraction(4), {}) != _lp_mul(T2, T2):
        raise ArithmeticError("theta-tilde square has an unexpected leading slice")
    for k in sl:
        if k < 4:
            raise ArithmeticError("theta-tilde square has terms below weight 4")
    T: Dict[Fraction, Dict] = {two: T2}
    den = {e: 2 * v for e, v in T2.items()}
    d = two + H
    while d <= N:
        rhs = dict(sl.get(d + 2, {}))
        for a in list(T):
            b = d + 2 - a
            if a != two and b != two and b in T:
                rhs = _lp_sub(rhs, _lp_mul(T[a], T[b]))
        T[d] = _lp_divide(rhs, den) if rhs else {}
        d += H
    terms = {}
    for part in T.values():
        terms.update(part)
    return MultiSeries(policy, terms)


# --------------------------------------------------------------------------
# structure


def rank(vectors: Sequence[Dict]) -> int:
    """Rank over Q of sparse vectors {key: rational}."""
    piv: Dict = {}
    r = 0
    for v in vectors:
        v = {k: Fraction(x) for k, x in v.items() if x}
        while v:
            k = max(v)
            if k not in piv:
                piv[k] = v
                r += 1
                break
            f = v[k] / piv[k][k]
            for kk, x in piv[k].items():
                v[kk] = v.get(kk, 0) - f * x
            v = {kk: x for kk, x in v.items() if x}
    return r


def _vec(s: MultiSeries):
    return {e: c.rational() for e, c in s.terms()}


def theta_square_rank(policy: TruncationPolicy, indices=None) -> int:
    idx = list(indices) if indices is not None else list(range(1, 11))
    sq = [genus2_theta(i, policy) ** 2 for i in idx]
    rows = set()
    for s in sq:
        rows.update(e for e, _ in s.terms())
    if len(rows) < 10 and indices is None:
        raise ValueError("policy too small to certify the rank")
    return rank([_vec(s) for s in sq])


def integrality(policy: TruncationPolicy) -> bool:
    for t in all_thetas(policy):
        for e, c in t.terms():
            if not c.is_rational() or Fraction(c.rational()).denominator != 1:
                return False
        for e, c in (t * t).terms():
            if any(Fraction(x).denominator != 1 for x in e):
                return False
    return True


def theta_report(N=2, W=2) -> dict:
    pol = theta_policy(N, W)
    tt = theta_tilde(theta_policy(max(N, 2), max(W, 2)))
    lead = {e: c.rational() for e, c in tt.terms() if e[0] + e[1] == 2}
    lead_ok = lead == leading_theta_tilde()
    rk = theta_square_rank(pol)
    integ = integrality(theta_policy(max(N, 3)))
    const_ok = all(genus2_theta(c, pol).constant_term() == Coefficient(1 if c.s[:2] == (0, 0) else 0)
                   for c in CHARACTERISTICS)
    return {"rank": rk, "rank_expected": 5, "leading_tilde": lead_ok, "integral": integ,
            "constant_terms": const_ok, "pass": rk == 5 and lead_ok and integ and const_ok}
