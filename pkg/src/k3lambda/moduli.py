"""Semi-invariants P_I, Q_I, the partition calculus and the numeric S6 action.

A point of the moduli space is represented by a 3x6 matrix
A0 = (E3 | X) with X = [[a2, b1, c0], [a0, b2, c1], [a1, b0, c2]].  Its
affine coordinates around o1 are

    z1 = -a1 c1 / (a0 c2),  z2 = -a1 b1 / (a2 b0),
    z3 = -b1 c1 / (b2 c0),  z4 = a2 b2 c2 / (a1 b1 c1).

A permutation sigma acts on columns from the right: column i of A.sigma is
column sigma(i) of A.  Permutations are one-line tuples (sigma(1), ..., sigma(n)).
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Sequence, Tuple

Perm = Tuple[int, ...]

# --------------------------------------------------------------------------
# sparse (Laurent) polynomials over Q


class Poly:
    """Laurent polynomial {exponent tuple: Fraction} in a fixed number of variables."""

    __slots__ = ("n", "t")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.t = {tuple(e): Fraction(c) for e, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, n, i):
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def const(cls, n, c):
        return cls(n, {(0,) * n: c})

    def _co(self, o):
        return o if isinstance(o, Poly) else Poly.const(self.n, o)

    def __add__(self, o):
        o = self._co(o)
        t = dict(self.t)
        for e, c in o.t.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.t.items()})

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        o = self._co(o)
        t: Dict = {}
        for ea, ca in self.t.items():
            for eb, cb in o.t.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                t[e] = t.get(e, 0) + ca * cb
        return Poly(self.n, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        return isinstance(o, (Poly, int, Fraction)) and (self - o).t == {}

    def __hash__(self):
        return hash(frozenset(self.t.items()))

    def is_polynomial(self):
        return all(x >= 0 for e in self.t for x in e)

    def __call__(self, *vals):
        # ints are promoted so negative powers stay exact; other ring elements pass through
        vals = [Fraction(x) if isinstance(x, int) else x for x in vals]
        total = Fraction(0)
        for e, c in self.t.items():
            v = c
            for x, k in zip(vals, e):
                v *= x ** k
            total += v
        return total

    def substitute_monomials(self, images: Sequence[Tuple[Fraction, Sequence[int]]], m: int) -> "Poly":
        """x_j -> c_j * w^images[j]; result in m variables."""
        t: Dict = {}
        for e, c in self.t.items():
            v = c
            out = [0] * m
            for (cj, ej), k in zip(images, e):
                v *= Fraction(cj) ** k
                for i in range(m):
                    out[i] += ej[i] * k
            out = tuple(out)
            t[out] = t.get(out, 0) + v
        return Poly(m, t)

    def to_dict(self):
        return dict(self.t)

    def __repr__(self):
        if not self.t:
            return "0"
        parts = []
        for e, c in sorted(self.t.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            mono = "*".join(f"z{i + 1}" + (f"^{k}" if k != 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def _z():
    return [Poly.var(4, i) for i in range(4)]


# --------------------------------------------------------------------------
# partitions


# Y_s = [ijk][lmn] in the table order; s = 5 is reserved for the quadric
Y_INDEX: Dict[int, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
    0: ((1, 2, 3), (4, 5, 6)), 1: ((1, 2, 4), (3, 5, 6)), 2: ((1, 2, 5), (3, 4, 6)),
    3: ((1, 3, 4), (2, 5, 6)), 4: ((1, 3, 5), (2, 4, 6)),
    6: ((1, 2, 6), (3, 4, 5)), 7: ((1, 3, 6), (2, 4, 5)), 8: ((1, 4, 6), (2, 3, 5)),
    9: ((1, 5, 6), (2, 3, 4)), 10: ((1, 4, 5), (2, 3, 6)),
}
INDEX_OF = {v: k for k, v in Y_INDEX.items()}


def _sort_sign(block: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
    b = list(block)
    sign = 1
    for i in range(len(b)):
        for j in range(len(b) - 1 - i):
            if b[j] > b[j + 1]:
                b[j], b[j + 1] = b[j + 1], b[j]
                sign = -sign
    return tuple(b), sign


def canonical_partition(blocks) -> Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], int]:
    """Sort each block (with its sign) and put the block containing 1 first.

    Y_I = [ijk][lmn] changes sign under a transposition inside a block; the
    two brackets commute, so swapping the blocks costs nothing.
    """
    b1, s1 = _sort_sign(blocks[0])
    b2, s2 = _sort_sign(blocks[1])
    if set(b1) & set(b2) or len(set(b1) | set(b2)) != len(b1) + len(b2):
        raise ValueError("blocks must be disjoint")
    if 1 not in b1:
        b1, b2 = b2, b1
    return (b1, b2), s1 * s2


def act(sigma: Perm, blocks) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """sigma(I) keeping the order of entries."""
    return tuple(tuple(sigma[i - 1] for i in b) for b in blocks)


def inverse(sigma: Perm) -> Perm:
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s - 1] = i + 1
    return tuple(inv)


def compose(sigma: Perm, tau: Perm) -> Perm:
    """(sigma tau)(i) = sigma(tau(i))."""
    return tuple(sigma[t - 1] for t in tau)


def identity_perm(n=6) -> Perm:
    return tuple(range(1, n + 1))


def transposition(i, j, n=6) -> Perm:
    p = list(range(1, n + 1))
    p[i - 1], p[j - 1] = j, i
    return tuple(p)


def cycles_to_perm(cycles, n=6) -> Perm:
    p = list(range(1, n + 1))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            p[a - 1] = b
    return tuple(p)


def all_perms(n=6):
    return [tuple(p) for p in permutations(range(1, n + 1))]


def signed_index(blocks) -> Tuple[int, int]:
    """(table index s, sign) with Y(blocks) = sign * Y_s."""
    can, sign = canonical_partition(blocks)
    return INDEX_OF[can], sign


# --------------------------------------------------------------------------
# P and Q polynomials


def p_polynomials() -> Dict[int, Poly]:
    z1, z2, z3, z4 = _z()
    return {
        0: 1 - (z1 * z2 + z1 * z3 + z2 * z3 + z1 * z2 * z3) * z4 - z1 * z2 * z3 * z4 ** 2,
        1: -z1 * z2 * (1 + z3) * z4,
        2: -1 + z1 * z3 * z4,
        3: -1 + z2 * z3 * z4,
        4: -z1 * z2 * (1 + z3 * z4) * z4,
        6: -(1 + z1 * z4) * z2 * z3 * z4,
        7: z1 * (1 + z2) * z3 * z4,
        8: (1 + z1) * z2 * z3 * z4,
        9: -z1 * z3 * z4 * (1 + z2 * z4),
        10: 1 - z1 * z2 * z4,
    }


def p_signed(blocks) -> Poly:
    s, sign = signed_index(blocks)
    return p_polynomials()[s] * sign


def q_polynomials() -> Dict[int, Poly]:
    """P_s pulled back along z = z(zt); each result must be a polynomial."""
    from .operators import O1_FROM_O1PLUS
    images = [(1, row) for row in O1_FROM_O1PLUS]
    out = {}
    for s, p in p_polynomials().items():
        q = p.substitute_monomials(images, 4)
        if not q.is_polynomial():
            raise ArithmeticError(f"Q_{s} is not a polynomial")
        out[s] = q
    return out


# --------------------------------------------------------------------------
# matrices


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _inv3(m):
    d = _det3(m)
    if d == 0:
        raise ZeroDivisionError("singular 3x3 block")
    cof = [[(m[(j + 1) % 3][(i + 1) % 3] * m[(j + 2) % 3][(i + 2) % 3]
             - m[(j + 1) % 3][(i + 2) % 3] * m[(j + 2) % 3][(i + 1) % 3]) for j in range(3)] for i in range(3)]
    return [[Fraction(cof[i][j]) / d for j in range(3)] for i in range(3)]


def minor(A, cols) -> Fraction:
    return _det3([[A[r][c - 1] for c in cols] for r in range(3)])


def y_value(A, blocks) -> Fraction:
    return minor(A, blocks[0]) * minor(A, blocks[1])


def matrix_from_z(z: Sequence) -> List[List[Fraction]]:
    """A0 = (E3 | X) in the gauge a0 = b0 = c0 = a1 = b1 = 1."""
    z1, z2, z3, z4 = (Fraction(x) for x in z)
    if z1 * z2 * z3 * z4 == 0:
        raise ValueError("all coordinates must be nonzero")
    a0 = b0 = c0 = a1 = b1 = Fraction(1)
    a2 = -1 / z2
    b2 = z1 * z2 * z4
    c1 = -z1 * z2 * z3 * z4
    c2 = z2 * z3 * z4
    X = [[a2, b1, c0], [a0, b2, c1], [a1, b0, c2]]
    A = [[Fraction(int(i == j)) for j in range(3)] + X[i] for i in range(3)]
    for cols in _triples():
        if minor(A, cols) == 0:
            raise ValueError(f"vanishing minor {cols}: point on a discriminant locus")
    return A


def _triples():
    from itertools import combinations
    return list(combinations(range(1, 7), 3))


def normal_form(A):
    """(B3, X) with A = B3 (E3 | X)."""
    B = [[Fraction(A[r][c]) for c in range(3)] for r in range(3)]
    Bi = _inv3(B)
    X = [[sum(Bi[r][k] * A[k][3 + c] for k in range(3)) for c in range(3)] for r in range(3)]
    return B, X


def entries(X):
    """(a0, a1, a2, b0, b1, b2, c0, c1, c2) read off X."""
    return {"a2": X[0][0], "a0": X[1][0], "a1": X[2][0],
            "b1": X[0][1], "b2": X[1][1], "b0": X[2][1],
            "c0": X[0][2], "c1": X[1][2], "c2": X[2][2]}


def z_of_matrix(A) -> Tuple[Tuple[Fraction, ...], Fraction]:
    """Affine coordinates of [A] and the factor (det B3)^2 a0 b0 c0."""
    B, X = normal_form(A)
    e = entries(X)
    if any(v == 0 for v in e.values()):
        raise ValueError("chart fails: a matrix entry vanishes")
    z1 = -e["a1"] * e["c1"] / (e["a0"] * e["c2"])
    z2 = -e["a1"] * e["b1"] / (e["a2"] * e["b0"])
    z3 = -e["b1"] * e["c1"] / (e["b2"] * e["c0"])
    z4 = e["a2"] * e["b2"] * e["c2"] / (e["a1"] * e["b1"] * e["c1"])
    return (z1, z2, z3, z4), _det3(B) ** 2 * e["a0"] * e["b0"] * e["c0"]


def permute_columns(A, sigma: Perm):
    """A.sigma: column i is column sigma(i) of A."""
    return [[row[sigma[i] - 1] for i in range(len(sigma))] for row in A]


def s6_action_on_matrix(A, sigma: Perm):
    ze, fe = z_of_matrix(A)
    zs, fs = z_of_matrix(permute_columns(A, sigma))
    return zs, fs / fe


def s6_action_numeric(sigma: Perm, z: Sequence) -> Tuple[Tuple[Fraction, ...], Fraction]:
    """(z^sigma, G(sigma, e)) at the point z."""
    return s6_action_on_matrix(matrix_from_z(z), sigma)


def random_rational(rng: random.Random, h=9):
    while True:
        v = Fraction(rng.randint(-h, h), rng.randint(1, h))
        if v:
            return v


def random_points(count: int, seed=0, sigmas: Sequence[Perm] = ()):
    """Random rational z avoiding every chart failure for the given sigmas."""
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        z = tuple(random_rational(rng) for _ in range(4))
        try:
            A = matrix_from_z(z)
            for s in sigmas:
                zs, g = s6_action_on_matrix(A, s)
                if any(x == 0 for x in zs) or g == 0:
                    raise ValueError
                matrix_from_z(zs)
        except (ValueError, ZeroDivisionError):
            continue
        pts.append(z)
    return pts


# --------------------------------------------------------------------------
# closed forms for three permutations


def _closed_forms():
    def f1(z):
        z1, z2, z3, z4 = z
        return (1 / z1, -z2 * z3 * z4, 1 / (z1 * z4), z1 / z3), 1 / (z1 * z3 * z4)

    def f2(z):
        z1, z2, z3, z4 = z
        # z4 entry: the only reading of the garbled factor that agrees with the
        # numeric action is (1 + z1 z4)(1 + z3 z4)/(1 - z1 z3 z4), with a plus sign
        return ((-z2 / (1 + z2), -(1 - z1 * z3 * z4) / (1 + z1 * z4), -(1 - z1 * z3 * z4) / (1 + z3 * z4),
                 (1 + z1 * z4) * (1 + z3 * z4) / (1 - z1 * z3 * z4)), -1 / (1 + z2))

    def f3(z):
        z1, z2, z3, z4 = z
        zs = (-(1 + z1) * z2 * (1 + z3) * z4 / ((1 + z2 * z4) * (1 - z1 * z3 * z4)),
              -z1 * (1 + z2) * (1 + z3) * z4 / ((1 + z1 * z4) * (1 - z2 * z3 * z4)),
              -(1 + z1) * (1 + z2) * z3 * z4 / ((1 - z1 * z2 * z4) * (1 + z3 * z4)),
              (1 + z1 * z4) * (1 + z2 * z4) * (1 + z3 * z4) / ((1 + z1) * (1 + z2) * (1 + z3) * z4))
        g = (p_polynomials()[0](*z)) / ((1 - z1 * z2 * z4) * (1 - z1 * z3 * z4) * (1 - z2 * z3 * z4))
        return zs, g

    return {(1, 2, 3, 6, 5, 4): f1, (2, 3, 4, 5, 6, 1): f2, (6, 5, 4, 3, 2, 1): f3}


CLOSED_FORMS = _closed_forms()


def closed_form_check(count=20, seed=0) -> dict:
    """Numeric action against the closed forms, plus the twist identity for all ten P_I.

    The listed twist factors are those of the reverse transition: they equal
    G(e, sigma) = 1/G(sigma, e), where G(sigma, e) is the factor with
    P_I(z) = G(sigma, e) P_{sigma^-1 I}(z^sigma).  Both facts are checked.
    """
    P = p_polynomials()
    out = {}
    for sigma, f in CLOSED_FORMS.items():
        pts = random_points(count, seed, [sigma])
        inv = inverse(sigma)
        ok_form, ok_twist = True, True
        first = None
        for z in pts:
            zs, g = s6_action_numeric(sigma, z)
            cz, cg = f(tuple(Fraction(x) for x in z))
            if tuple(zs) != tuple(cz) or g * cg != 1:
                ok_form = False
                first = first or {"z": [str(x) for x in z], "numeric": [str(x) for x in zs] + [str(g)],
                                  "closed": [str(x) for x in cz] + [str(cg)]}
            for s, blocks in Y_INDEX.items():
                lhs = P[s](*z)
                rhs = g * p_signed(act(inv, blocks))(*zs)
                if lhs != rhs:
                    ok_twist = False
        out["".join(map(str, sigma))] = {"closed_form": ok_form, "twist": ok_twist, "points": len(pts),
                                         "first_mismatch": first}
    return {"sigmas": out, "pass": all(v["closed_form"] and v["twist"] for v in out.values())}


def minor_oracle_check(count=20, seed=1) -> bool:
    """P_s(z) equals Y_s(A0)/(a0 b0 c0) on random points (the gauge has a0 b0 c0 = 1)."""
    P = p_polynomials()
    for z in random_points(count, seed):
        A = matrix_from_z(z)
        for s, blocks in Y_INDEX.items():
            if P[s](*z) != y_value(A, blocks):
                return False
    return True


def q_oracle_check(count=20, seed=2) -> bool:
    """Q_s(zt) against the minors of A0 built from z(zt)."""
    from .operators import O1_FROM_O1PLUS
    Q = q_polynomials()
    rng = random.Random(seed)
    done = 0
    while done < count:
        zt = [random_rational(rng) for _ in range(4)]
        z = []
        for row in O1_FROM_O1PLUS:
            v = Fraction(1)
            for x, k in zip(zt, row):
                v *= x ** k
            z.append(v)
        try:
            A = matrix_from_z(z)
        except ValueError:
            continue
        for s, blocks in Y_INDEX.items():
            if Q[s](*zt) != y_value(A, blocks):
                return False
        done += 1
    return True


def torus_invariance_check(count=10, seed=3, sigmas: Sequence[Perm] = tuple(CLOSED_FORMS)) -> bool:
    """(z^sigma, G) do not change under A -> g A t."""
    rng = random.Random(seed)
    pts = random_points(count, seed, sigmas)
    for z in pts:
        A = matrix_from_z(z)
        while True:
            g = [[random_rational(rng) for _ in range(3)] for _ in range(3)]
            if _det3(g) != 0:
                break
        t = [random_rational(rng) for _ in range(6)]
        A2 = [[sum(g[r][k] * A[k][c] for k in range(3)) * t[c] for c in range(6)] for r in range(3)]
        for s in sigmas:
            if s6_action_on_matrix(A, s) != s6_action_on_matrix(A2, s):
                return False
    return True


def antihomomorphism_check(pairs, count=10, seed=4) -> bool:
    """z^(sigma tau) = phi_tau(phi_sigma(z)) with (sigma tau)(i) = sigma(tau(i))."""
    for sigma, tau in pairs:
        st = compose(sigma, tau)
        for z in random_points(count, seed, [sigma, st]):
            zs, gs = s6_action_numeric(sigma, z)
            try:
                zst, _ = s6_action_numeric(tau, zs)
            except (ValueError, ZeroDivisionError):
                continue
            if tuple(zst) != tuple(s6_action_numeric(st, z)[0]):
                return False
    return True


def cocycle_check(pairs, count=10, seed=5) -> bool:
    """G(sigma, tau) = G(sigma, e)/G(tau, e) equals P_{tau^-1 I}(z^tau)/P_{sigma^-1 I}(z^sigma)."""
    for sigma, tau in pairs:
        for z in random_points(count, seed, [sigma, tau]):
            zs, gs = s6_action_numeric(sigma, z)
            zt, gt = s6_action_numeric(tau, z)
            for blocks in Y_INDEX.values():
                ps = p_signed(act(inverse(sigma), blocks))(*zs)
                pt = p_signed(act(inverse(tau), blocks))(*zt)
                if ps == 0:
                    continue
                if gs / gt != pt / ps:
                    return False
    return True


# --------------------------------------------------------------------------
# o2 coordinates

ALPHA = cycles_to_perm([(1, 6), (2, 4), (3, 5)])


def o2_alpha_check() -> dict:
    """P_I pushed to the o2 chart equals P_alpha(I) as polynomials."""
    from .operators import CHARTS
    _, A = CHARTS["o2"]
    images = [(1, row) for row in A]
    P = p_polynomials()
    res = {}
    for s, blocks in Y_INDEX.items():
        pp = P[s].substitute_monomials(images, 4)
        target = p_signed(act(ALPHA, blocks))
        res[s] = pp.is_polynomial() and pp == target
    involution = compose(ALPHA, ALPHA) == identity_perm()
    # random spot check of the same identity
    rng = random.Random(6)
    spot = True
    for _ in range(10):
        w = [random_rational(rng) for _ in range(4)]
        for s, blocks in Y_INDEX.items():
            lhs = P[s].substitute_monomials(images, 4)(*w)
            if lhs != p_signed(act(ALPHA, blocks))(*w):
                spot = False
    return {"per_index": {str(k): v for k, v in res.items()}, "involution": involution, "spot": spot,
            "pass": all(res.values()) and involution and spot}
