"""Graded quotients of indicial ideals and the induced pairing.

The ideals here are spanned by homogeneous quadrics in theta_1..theta_4 and
the quotient rings live in degrees <= 2, so plain row reduction per degree
does the job.  Monomials are ordered degree-lex with theta_4 smallest; the
surviving degree-2 monomial is then theta_4^2 at o1 (theta_3 theta_4 at
o1plus, where theta_4^2 lies in the ideal).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Sequence, Tuple

from .operators import ThetaPoly, pf_system, tp_homogeneous, tp_mul

Matrix = List[List[Fraction]]


def monomials(deg: int, n: int = 4) -> List[Tuple[int, ...]]:
    """Degree-deg exponent tuples, largest first (lex, theta_1 > ... > theta_n)."""
    out = []
    for c in combinations_with_replacement(range(n), deg):
        e = [0] * n
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def indicial_ideal(tag: str) -> List[ThetaPoly]:
    """Initial theta parts of the nine operators; all must be quadrics."""
    gens = []
    for op in pf_system(tag).operators:
        p = op.initial_form()
        if tp_homogeneous(p, 2) != p:
            raise ValueError(f"{op.name}: initial form is not a homogeneous quadric")
        gens.append(p)
    return gens


def _rref(rows: List[Dict[Tuple[int, ...], Fraction]], order: List[Tuple[int, ...]]):
    """Reduced echelon form; returns {pivot monomial: row}."""
    piv: Dict[Tuple[int, ...], Dict] = {}
    for r in rows:
        r = _reduce(dict(r), piv, order)
        if not r:
            continue
        lead = next(m for m in order if m in r)
        c = r[lead]
        r = {m: v / c for m, v in r.items()}
        for p, pr in piv.items():
            if lead in pr:
                f = pr[lead]
                piv[p] = {m: pr.get(m, 0) - f * r.get(m, 0) for m in set(pr) | set(r)}
                piv[p] = {m: v for m, v in piv[p].items() if v}
        piv[lead] = r
    return piv


def _reduce(r, piv, order):
    for m in order:
        if m in r and m in piv:
            f = r[m]
            pr = piv[m]
            for k, v in pr.items():
                r[k] = r.get(k, 0) - f * v
            r = {k: v for k, v in r.items() if v}
    return r


def _degree_span(ideal: Sequence[ThetaPoly], deg: int, n: int = 4):
    order = monomials(deg, n)
    rows = []
    if deg >= 2:
        for m in monomials(deg - 2, n):
            for g in ideal:
                rows.append(tp_mul({m: Fraction(1)}, g))
    return order, _rref(rows, order)


def graded_quotient(ideal: Sequence[ThetaPoly], max_degree: int = 3, n: int = 4):
    """Per-degree quotient dimensions and standard monomials for degrees 0..max_degree."""
    if max_degree < 3:
        raise ValueError("max_degree must be at least 3")
    dims, standard = [], []
    for d in range(max_degree + 1):
        order, piv = _degree_span(ideal, d, n)
        std = [m for m in order if m not in piv]
        dims.append(len(std))
        standard.append(std)
    return dims, standard


def normal_form(ideal: Sequence[ThetaPoly], p: ThetaPoly, n: int = 4) -> ThetaPoly:
    """Reduce a homogeneous polynomial modulo the ideal."""
    if not p:
        return {}
    deg = sum(next(iter(p)))
    order, piv = _degree_span(ideal, deg, n)
    return _reduce({m: Fraction(v) for m, v in p.items()}, piv, order)


def pairing_matrix(ideal: Sequence[ThetaPoly], d=2) -> Matrix:
    """M_ij = d * alpha_ij where theta_i theta_j = alpha_ij * s mod the ideal.

    s is the standard degree-2 monomial: theta_4^2 at o1, theta_3 theta_4 at
    o1plus (where theta_4^2 lies in the ideal).
    """
    dims, std = graded_quotient(ideal)
    if dims[2] != 1:
        raise ValueError("degree-2 quotient is not one-dimensional")
    top = std[2][0]
    d = Fraction(d)
    M = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            e = [0] * 4
            e[i] += 1
            e[j] += 1
            r = normal_form(ideal, {tuple(e): Fraction(1)})
            M[i][j] = d * r.get(top, Fraction(0))
    return M


def functional(ideal: Sequence[ThetaPoly], p: ThetaPoly, d=2) -> Fraction:
    """<p> for p of degree 2: d times the coordinate of the standard monomial."""
    top = graded_quotient(ideal)[1][2][0]
    return Fraction(d) * normal_form(ideal, p).get(top, Fraction(0))


def _mm(A, B):
    return [[sum(Fraction(A[i][k]) * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _det(A):
    A = [[Fraction(x) for x in r] for r in A]
    n, det = len(A), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det


def gram_check(M, P, G) -> bool:
    """True iff P is integral unimodular and M = P^T G P."""
    if any(Fraction(x).denominator != 1 for r in P for x in r) or abs(_det(P)) != 1:
        return False
    PT = [list(r) for r in zip(*P)]
    lhs = _mm(_mm(PT, G), P)
    return all(Fraction(lhs[i][j]) == Fraction(M[i][j]) for i in range(len(M)) for j in range(len(M)))


def hyperbolic_target(d=2):
    """U(d) + <-d> + <-d>."""
    d = Fraction(d)
    return [[0, d, 0, 0], [d, 0, 0, 0], [0, 0, -d, 0], [0, 0, 0, -d]]


GRAM_WITNESS = {
    "o1": [[1, 0, 1, 1], [0, 1, 1, 1], [0, 0, 1, 1], [0, 0, 1, 0]],
    "o1plus": [[1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
}

EXPECTED_M = {
    "o1": [[0, 2, 2, 2], [2, 0, 2, 2], [2, 2, 0, 2], [2, 2, 2, 2]],
    "o1plus": [[2, 4, 2, 2], [4, 2, 2, 2], [2, 2, 0, 2], [2, 2, 2, 0]],
}


def indicial_report(tag: str) -> dict:
    ideal = indicial_ideal(tag)
    dims, std = graded_quotient(ideal)
    M = pairing_matrix(ideal, 2)
    gram = gram_check(M, GRAM_WITNESS[tag], hyperbolic_target(2))
    m_ok = all(M[i][j] == EXPECTED_M[tag][i][j] for i in range(4) for j in range(4))
    return {
        "system": tag,
        "dims": dims,
        "standard": [["".join(f"t{i + 1}" * e for i, e in enumerate(m)) or "1" for m in s] for s in std],
        "M": [[str(x) for x in r] for r in M],
        "M_expected": m_ok,
        "gram": gram,
        "pass": dims == [1, 4, 1, 0] and m_ok and gram,
    }
