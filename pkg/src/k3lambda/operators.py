"""Picard-Fuchs operators in Euler form and their coordinate transport.

An operator is a finite sum of terms z^m * p(theta) with p a polynomial in
theta_1..theta_n.  Theta polynomials are plain dicts {exponent tuple:
rational}.  Besides the two GKZ systems (around o1 and o1plus) this module
holds the monomial charts that carry them to o2, o2plus and o3plus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .series import LogSeries, MultiSeries

ThetaPoly = Dict[Tuple[int, ...], Fraction]


def tp_lin(const, *coeffs, n=4) -> ThetaPoly:
    """const + sum coeffs[i] theta_{i+1}."""
    p: ThetaPoly = {}
    if const:
        p[(0,) * n] = Fraction(const)
    for i, c in enumerate(coeffs):
        if c:
            e = [0] * n
            e[i] = 1
            p[tuple(e)] = Fraction(c)
    return p


def tp_mul(a: ThetaPoly, b: ThetaPoly) -> ThetaPoly:
    out: ThetaPoly = {}
    for ea, va in a.items():
        for eb, vb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + va * vb
    return {e: v for e, v in out.items() if v}


def tp_add(a: ThetaPoly, b: ThetaPoly, s=1) -> ThetaPoly:
    out = dict(a)
    for e, v in b.items():
        out[e] = out.get(e, 0) + s * v
    return {e: v for e, v in out.items() if v}


def tp_prod(*factors: ThetaPoly) -> ThetaPoly:
    out = {(0,) * len(next(iter(factors[0]))): Fraction(1)}
    for f in factors:
        out = tp_mul(out, f)
    return out


def tp_homogeneous(p: ThetaPoly, deg: int) -> ThetaPoly:
    return {e: v for e, v in p.items() if sum(e) == deg}


def tp_substitute_linear(p: ThetaPoly, images: Sequence[ThetaPoly]) -> ThetaPoly:
    """Replace theta_j by the linear polynomial images[j]."""
    n = len(next(iter(images[0])))
    out: ThetaPoly = {}
    for e, v in p.items():
        term = {(0,) * n: Fraction(v)}
        for j, k in enumerate(e):
            for _ in range(k):
                term = tp_mul(term, images[j])
        out = tp_add(out, term)
    return out


@dataclass
class PFOperator:
    """sum over terms of z^monomial * theta_poly."""

    terms: List[Tuple[Tuple[int, ...], ThetaPoly]]
    name: str = ""

    @property
    def arity(self):
        return len(self.terms[0][0])

    def initial_form(self) -> ThetaPoly:
        """theta part of the z^0 term (the z -> 0 limit)."""
        out: ThetaPoly = {}
        for m, p in self.terms:
            if not any(m):
                out = tp_add(out, p)
        return out

    def apply(self, f):
        """Apply to a LogSeries or MultiSeries; returns a LogSeries."""
        if isinstance(f, MultiSeries):
            f = LogSeries.from_series(f)
        cache: Dict[Tuple[int, ...], LogSeries] = {(0,) * f.arity: f}

        def th(e):
            if e in cache:
                return cache[e]
            i = next(j for j, x in enumerate(e) if x)
            prev = list(e)
            prev[i] -= 1
            r = th(tuple(prev)).euler(i)
            cache[e] = r
            return r

        out = LogSeries(f.policy, {})
        for m, p in self.terms:
            acc = LogSeries(f.policy, {})
            for e, c in sorted(p.items()):
                acc = acc + th(e) * c
            out = out + (acc.mul_monomial(m) if any(m) else acc)
        return out

    def transport(self, A: Sequence[Sequence[int]], name=None) -> "PFOperator":
        """Rewrite in new coordinates w with z_j = prod_k w_k^A[j][k].

        theta_z_j = sum_k Ainv[k][j] theta_w_k, z^m = w^(A^T m); the result is
        multiplied by a monomial so that every exponent is nonnegative.
        """
        n = len(A)
        Ainv = _inverse_int(A)
        images = []
        for j in range(n):
            images.append(tp_lin(0, *[Ainv[k][j] for k in range(n)], n=n))
        new_terms = []
        for m, p in self.terms:
            m2 = tuple(sum(A[j][k] * m[j] for j in range(n)) for k in range(n))
            new_terms.append((m2, tp_substitute_linear(p, images)))
        lows = [min(t[0][k] for t in new_terms) for k in range(n)]
        new_terms = [(tuple(x - min(l, 0) for x, l in zip(m, lows)), p) for m, p in new_terms]
        return PFOperator(new_terms, name or self.name)


def _inverse_int(A):
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    inv = [row[n:] for row in M]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("monomial chart is not unimodular")
    return [[int(x) for x in row] for row in inv]


# --------------------------------------------------------------------------
# the two GKZ systems


def _t(*c):
    return tp_lin(0, *c)


def _h(i):
    # theta_i + 1/2
    c = [0, 0, 0, 0]
    c[i - 1] = 1
    return tp_lin(Fraction(1, 2), *c)


def _op(name, init, mono, coef, *factors):
    rest = tp_prod(*factors)
    rest = {e: coef * v for e, v in rest.items()}
    return PFOperator([((0, 0, 0, 0), init), (mono, rest)], name)


def o1_operators() -> List[PFOperator]:
    a12 = _t(1, 1, 0, -1)  # th1+th2-th4
    a13 = _t(1, 0, 1, -1)
    a23 = _t(0, 1, 1, -1)
    b1 = _t(1, 0, 0, -1)   # th1-th4
    b2 = _t(0, 1, 0, -1)
    b3 = _t(0, 0, 1, -1)
    return [
        _op("D1", tp_mul(a12, a13), (1, 0, 0, 0), 1, _h(1), b1),
        _op("D2", tp_mul(a12, a23), (0, 1, 0, 0), 1, _h(2), b2),
        _op("D3", tp_mul(a13, a23), (0, 0, 1, 0), 1, _h(3), b3),
        _op("D4", tp_mul(b2, b3), (1, 0, 0, 1), -1, _h(1), a23),
        _op("D5", tp_mul(b1, b3), (0, 1, 0, 1), -1, _h(2), a13),
        _op("D6", tp_mul(b1, b2), (0, 0, 1, 1), -1, _h(3), a12),
        _op("D7", tp_mul(a12, b3), (1, 1, 0, 1), 1, _h(1), _h(2)),
        _op("D8", tp_mul(a13, b2), (1, 0, 1, 1), 1, _h(1), _h(3)),
        _op("D9", tp_mul(a23, b1), (0, 1, 1, 1), 1, _h(2), _h(3)),
    ]


def o1plus_operators() -> List[PFOperator]:
    S = tp_lin(Fraction(1, 2), 1, 1, -1, -1)
    d13, d14 = _t(1, 0, -1, 0), _t(1, 0, 0, -1)
    d23, d24 = _t(0, 1, -1, 0), _t(0, 1, 0, -1)
    e1 = _t(1, 0, -1, -1)  # th1-th3-th4
    e2 = _t(0, 1, -1, -1)
    return [
        _op("D1", tp_mul(d13, d14), (1, 0, 0, 0), 1, e1, S),
        _op("D2", tp_mul(d23, d24), (0, 1, 0, 0), 1, e2, S),
        _op("D3", tp_mul(d14, e2), (1, 0, 1, 0), 1, d23, _h(3)),
        _op("D4", tp_mul(d13, e2), (1, 0, 0, 1), 1, d24, _h(4)),
        _op("D5", tp_mul(d24, e1), (0, 1, 1, 0), 1, d13, _h(3)),
        _op("D6", tp_mul(d23, e1), (0, 1, 0, 1), 1, d14, _h(4)),
        _op("D7", tp_mul(d14, d24), (1, 1, 1, 0), -1, _h(3), S),
        _op("D8", tp_mul(d13, d23), (1, 1, 0, 1), -1, _h(4), S),
        _op("D9", tp_mul(e1, e2), (1, 1, 1, 1), -1, _h(3), _h(4)),
    ]


# z_old_j = prod_k w_k^A[j][k]  for the transported charts
CHARTS = {
    # z(o2)_k = z_k z_4 (k<=3), z(o2)_4 = 1/z_4   =>  z_k = w_k w_4, z_4 = 1/w_4
    "o2": ("o1", [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 0, -1]]),
    # z' = (z1 z4, z2 z4, z3/z4, 1/z4)  =>  z1 = w1 w4, z2 = w2 w4, z3 = w3/w4, z4 = 1/w4
    "o2plus": ("o1plus", [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, -1], [0, 0, 0, -1]]),
    # z'' = (z1 z3, z2 z3, z4/z3, 1/z3)  =>  z1 = w1 w4, z2 = w2 w4, z3 = 1/w4, z4 = w3/w4
    "o3plus": ("o1plus", [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 0, -1], [0, 0, 1, -1]]),
}

# o1plus coordinates as monomials in the o1 ones and back
# zt1 = z1, zt2 = z1 z4, zt3 = z2/z1, zt4 = z3/z1; the inverse is computed, which
# gives z3 = zt1 zt4 (the ratio formulas for zt in terms of the matrix entries agree)
O1PLUS_FROM_O1 = [[1, 0, 0, 0], [1, 0, 0, 1], [-1, 1, 0, 0], [-1, 0, 1, 0]]  # zt_j = prod z_k^row_j


@dataclass
class PFSystem:
    tag: str
    operators: List[PFOperator]
    base: str
    chart: List[List[int]] | None = None  # None for the base systems
    names: Tuple[str, ...] = field(default=("z1", "z2", "z3", "z4"))


def pf_system(tag: str) -> PFSystem:
    if tag == "o1":
        return PFSystem("o1", o1_operators(), "o1")
    if tag == "o1plus":
        return PFSystem("o1plus", o1plus_operators(), "o1plus", names=("zt1", "zt2", "zt3", "zt4"))
    if tag in CHARTS:
        base, A = CHARTS[tag]
        ops = [op.transport(A) for op in pf_system(base).operators]
        return PFSystem(tag, ops, base, A)
    raise ValueError(f"unknown system {tag!r}")


O1_FROM_O1PLUS = _inverse_int(O1PLUS_FROM_O1)  # z_j = prod zt_k^row_j

SYSTEMS = ("o1", "o1plus", "o2", "o2plus", "o3plus")
