"""Mirror maps at o1 and o1plus, the master equation and the theta formulas.

Everything is computed in the Q-variables Q_k = exp(omega^(1)_k / omega_0),
where all series are power series.  The Q-box (q-weight <= N plus windows on
the weight-zero Q's) is chosen so that it contains the preimage of the
q-region e1 + e2 <= N, |e3|, |e4| <= W under the monomial map q = s * Q^P.
Theta constants are pulled back along the same map; their exponents satisfy
|e3|, |e4| <= e1 + e2, so they are power series in Q as well and truncation
stays exact throughout.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .gkz import frobenius_basis
from .indicial import GRAM_WITNESS
from .moduli import Y_INDEX, all_perms, canonical_partition, p_polynomials, q_polynomials, Poly
from .series import Coefficient, ExpRelationInverse, LogSeries, MultiSeries, TruncationPolicy
from .theta import CHARACTERISTICS, genus2_theta, theta_policy, theta_tilde

KAPPA = Coefficient.kappa()
VARPI = Coefficient.varpi()

TAU = (3, 2, 6, 1, 5, 4)
RHO = (1, 4, 5, 3, 6, 2)

THETA_OF_PARTITION = {c.partition: c.index for c in CHARACTERISTICS}

# q_i = s_i * Q^(P row i): o1 uses the Gram witness P and the shift q4 -> -q4
O1_SIGNS = (1, 1, 1, -1)
QBYQ_O1 = [(1, (1, 0, -1, 0)), (1, (0, 1, -1, 0)), (-1, (0, 0, 0, 1)), (-1, (0, 0, 1, -1))]


def _int_inverse(A):
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c])
        M[c], M[p] = M[p], M[c]
        M[c] = [x / M[c][c] for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    inv = [[M[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def q_of_Q(P, signs):
    """Images q_i = s_i Q^(P_i) as (sign, exponents) pairs."""
    return [(s, tuple(row)) for s, row in zip(signs, P)]


def Q_of_q(P, signs):
    """Inverse map Q_j = sign_j q^(P^-1 row j)."""
    inv = _int_inverse(P)
    out = []
    for row in inv:
        s = 1
        for si, k in zip(signs, row):
            if k % 2:
                s *= si
        out.append((s, tuple(row)))
    return out


def q_box_policy(P, N, W) -> TruncationPolicy:
    """Smallest box of the weight/window type containing the preimage of the q-region."""
    inv = _int_inverse(P)
    weights = tuple(row[0] + row[1] for row in inv)
    if any(w not in (0, 1) for w in weights):
        raise ValueError("unexpected q-weights of the Q variables")
    windows = []
    for j in range(4):
        if weights[j]:
            windows.append(0)
            continue
        col = [P[i][j] for i in range(4)]
        if min(col) < 0:
            raise ValueError("negative entries are not supported")
        windows.append(max(col[0], col[1]) * N + (col[2] + col[3]) * W)
    return TruncationPolicy(weights, N, tuple(windows))


def branch_shift_check() -> dict:
    """The Q -> q substitution equals t -> P t followed by q4 = exp(pi i (t4 + 1))."""
    derived = Q_of_q(GRAM_WITNESS["o1"], O1_SIGNS)
    return {"derived": [[s, list(e)] for s, e in derived], "pass": derived == QBYQ_O1}


# --------------------------------------------------------------------------
# mirror maps


@dataclass
class MirrorMap:
    side: str
    policy: TruncationPolicy
    consts: Tuple[Fraction, ...]
    z_Q: List[MultiSeries]
    omega0_Q: MultiSeries
    inverse: ExpRelationInverse = field(repr=False)
    basis: object = field(repr=False)
    P: List[List[int]] = field(default_factory=list)
    signs: Tuple[int, ...] = ()
    W: int = 0

    def pushforward(self, F: MultiSeries) -> MultiSeries:
        return self.inverse.pushforward(F)

    def pullback_theta(self, s: MultiSeries) -> MultiSeries:
        """A q-series (theta side) rewritten in Q."""
        return s.substitute_monomials(q_of_Q(self.P, self.signs), self.policy)

    def to_q(self, s: MultiSeries, W: Optional[int] = None) -> MultiSeries:
        """A Q-series rewritten in q, truncated to the q-region."""
        W = self.W if W is None else W
        return s.substitute_monomials(Q_of_q(self.P, self.signs), theta_policy(self.policy.cutoff, W))

    def z_q(self):
        return [self.to_q(z) for z in self.z_Q]


def _kappa_power(c: Coefficient) -> Fraction:
    """For c = -a kappa return 2^a, which must be rational."""
    rest = c - KAPPA * c[(1, 0)]
    if not rest.is_zero():
        raise ValueError(f"mirror exponent constant {c} is not a multiple of log 2")
    a = -Fraction(c[(1, 0)])
    if a.denominator != 1:
        raise ValueError("log 2 coefficient does not exponentiate to a rational")
    return Fraction(2) ** int(a)


SIDE_TAG = {"o1": "o1", "o1plus": "o1plus"}
SIDE_P = {"o1": GRAM_WITNESS["o1"], "o1plus": GRAM_WITNESS["o1plus"]}


@lru_cache(maxsize=None)
def _mirror_core(side: str, N: int, W: int):
    P = SIDE_P[side]
    pol = q_box_policy(P, N, W)
    basis = frobenius_basis(SIDE_TAG[side], pol)
    inv0 = basis.omega0.invert()
    consts, S = [], []
    for k in range(4):
        Sk = basis.sigma[k] * inv0
        c0 = Sk.constant_term()
        consts.append(_kappa_power(c0))
        rest = Sk - MultiSeries.constant(pol, c0)
        # z_k = c_k Q_k exp(-s_k(z))
        S.append(-rest)
    inv = ExpRelationInverse(consts, S, pol)
    return pol, basis, tuple(consts), inv


def build_mirror_map(side: str, N: int = 3, W: int = 3, signs: Optional[Sequence[int]] = None) -> MirrorMap:
    if side not in SIDE_TAG:
        raise ValueError(f"unknown side {side!r}")
    pol, basis, consts, inv = _mirror_core(side, N, W)
    if signs is None:
        signs = O1_SIGNS if side == "o1" else o1plus_signs()
    zQ = inv.mirror()
    om = inv.pushforward(basis.omega0)
    return MirrorMap(side, pol, consts, zQ, om, inv, basis, SIDE_P[side], tuple(signs), W)


def round_trip_check(m: MirrorMap) -> bool:
    """Q_k = z_k / c_k * exp(s_k(z)) recomputed from z(Q)."""
    for k in range(4):
        s = -m.inverse.S[k]
        lhs = m.z_Q[k].scale(Fraction(1) / m.consts[k]) * m.pushforward(s).exp()
        if lhs != MultiSeries.var(m.policy, k):
            return False
    return True


def leading_checks(m: MirrorMap) -> dict:
    """Linear parts z_k(Q) = c_k Q_k.  On o1 also z1(q) ~ 4 q1/q3 and z3(q) ~ -4 q4."""
    out = {}
    for k in range(4):
        lin = {e: c for e, c in m.z_Q[k].terms() if sum(e) == 1}
        e = tuple(int(i == k) for i in range(4))
        out[f"z{k + 1}"] = lin == {e: Coefficient(m.consts[k])}
    if m.side == "o1":
        zq = m.z_q()
        out["z1_q"] = zq[0].coefficient((1, 0, -1, 0)) == 4
        out["z3_q"] = zq[2].coefficient((0, 0, 0, 1)) == -4
    return out


# --------------------------------------------------------------------------
# omega0 squared as a q-series


def omega0_square_display() -> Dict[Tuple[int, ...], int]:
    """Weight <= 2 part of omega_0(z(q))^2 as printed."""
    d = {(0, 0, 0, 0): 1, (1, 0, 0, 0): 8, (0, 1, 0, 0): 8, (2, 0, 0, 0): 24, (0, 2, 0, 0): 24, (1, 1, 0, 0): 96}
    for s in (1, -1):
        d[(1, 1, s, 0)] = -32
        d[(1, 1, 0, s)] = 32
        for t in (1, -1):
            d[(1, 1, s, t)] = -8
    return d


def omega0_of_q(m: MirrorMap) -> MultiSeries:
    return m.to_q(m.omega0_Q * m.omega0_Q)


def omega0_square_check(m: MirrorMap) -> dict:
    s = omega0_of_q(m)
    low = {tuple(int(x) for x in e): c.rational() for e, c in s.terms() if e[0] + e[1] <= 2}
    disp = omega0_square_display()
    mism = sorted(set(low) | set(disp), key=lambda e: (e[0] + e[1], e))
    mism = [e for e in mism if low.get(e, 0) != disp.get(e, 0)]
    return {"pass": not mism, "first_mismatch": list(mism[0]) if mism else None,
            "terms_weight_le_2": len(low)}


# --------------------------------------------------------------------------
# master equation


def _poly_series(p: Poly, pol) -> MultiSeries:
    return MultiSeries(pol, {e: c for e, c in p.t.items()})


def side_polynomials(side: str) -> Dict[int, Poly]:
    return p_polynomials() if side == "o1" else q_polynomials()


def theta_index(sigma, s: int) -> Tuple[int, int]:
    """(theta number, sign) with Theta(sigma(Y_s))^2 = sign * Theta_j^2.

    Squared thetas of ordered partitions change sign like the brackets
    [ijk][lmn] under reordering inside a block.
    """
    blocks = tuple(tuple(sigma[i - 1] for i in b) for b in Y_INDEX[s])
    can, sign = canonical_partition(blocks)
    return THETA_OF_PARTITION[can], sign


@lru_cache(maxsize=None)
def _sides_data(side: str, N: int, W: int, signs: Tuple[int, ...], swap34: bool = False):
    m = build_mirror_map(side, N, W, signs)
    om2 = m.basis.omega0 * m.basis.omega0
    lhs = {s: m.pushforward(_poly_series(p, m.policy) * om2) for s, p in side_polynomials(side).items()}
    tpol = theta_policy(N, N)
    sq = {}
    for c in CHARACTERISTICS:
        t = genus2_theta(c, tpol)
        t2 = t * t
        if swap34:
            t2 = t2.swap_variables(2, 3)
        sq[c.index] = m.pullback_theta(t2)
    return m, lhs, sq


@dataclass
class MasterReport:
    side: str
    permutation: Tuple[int, ...]
    verdicts: Dict[str, bool]
    first_mismatch: Optional[Dict]
    cutoff: Tuple[int, int]

    @property
    def passed(self):
        return all(self.verdicts.values())

    def to_json(self):
        return {"side": self.side, "permutation": list(self.permutation), "verdicts": self.verdicts,
                "first_mismatch": self.first_mismatch, "cutoff": {"N": self.cutoff[0], "W": self.cutoff[1]},
                "pass": self.passed}


def _first(d: MultiSeries):
    keys = sorted((e for e, _ in d.terms()), key=lambda e: (sum(e), e))
    return [str(x) for x in keys[0]] if keys else None


def verify_master_equation(side: str, sigma: Sequence[int], N: int = 3, W: int = 3,
                           signs: Optional[Sequence[int]] = None) -> MasterReport:
    signs = tuple(signs) if signs is not None else (O1_SIGNS if side == "o1" else o1plus_signs())
    m, lhs, sq = _sides_data(side, N, W, signs)
    sigma = tuple(sigma)
    verdicts, first = {}, None
    for s in sorted(lhs):
        j, sign = theta_index(sigma, s)
        diff = lhs[s] - sq[j].scale(sign)
        name = "|".join("".join(map(str, b)) for b in Y_INDEX[s])
        verdicts[name] = diff.is_zero()
        if first is None and not diff.is_zero():
            first = {"partition": name, "theta": j * sign, "exponent": _first(diff)}
    return MasterReport(side, sigma, verdicts, first, (N, W))


def permutation_search(side: str, N: int = 2, W: int = 2, signs: Optional[Sequence[int]] = None,
                       swap34: bool = False) -> dict:
    """All sigma in S6 with P_I omega0^2 = Theta_{sigma(I)}^2 for the ten I."""
    signs = tuple(signs) if signs is not None else (O1_SIGNS if side == "o1" else o1plus_signs())
    m, lhs, sq = _sides_data(side, N, W, signs, swap34)
    match = {s: {(j, e) for j in sq for e in (1, -1) if (lhs[s] - sq[j].scale(e)).is_zero()} for s in lhs}
    found, best, best_score = [], None, -1
    for sigma in all_perms(6):
        score = sum(theta_index(sigma, s) in match[s] for s in lhs)
        if score == len(lhs):
            found.append(sigma)
        if score > best_score:
            best, best_score = sigma, score
    return {"side": side, "cutoff": {"N": N, "W": W}, "swap34": swap34, "found": [list(p) for p in found],
            "best": list(best), "best_score": best_score}


# --------------------------------------------------------------------------
# o1plus sign convention


def _QtoT(m: MirrorMap):
    tpol = theta_policy(m.policy.cutoff, m.policy.cutoff)
    sq = {c.index: m.pullback_theta(genus2_theta(c, tpol) ** 2) for c in CHARACTERISTICS}
    return sq


def zk_identities(side: str, m: MirrorMap, sq) -> Dict[str, MultiSeries]:
    """Denominator-cleared forms of the theta formulas for z_k; each must vanish."""
    w = m.omega0_Q * m.omega0_Q
    z = m.z_Q
    T = sq
    A = T[3] + T[9] - w
    B = T[4] + T[9] - w
    if side == "o1":
        return {
            "z1": z[0] * (w - T[7]) - A,
            "z2": z[1] * (w - T[9]) - A,
            "z3": z[2] * w * B - (w - T[7]) * (w - T[9]),
            "z4": z[3] * A - B,
        }
    return {
        "z1": z[0] * (w - T[6]) - A,
        "z2": z[1] * (w - T[6]) - B,
        "z3": z[2] * (w - T[9]) - (w - T[6]),
        "z4": z[3] * w * A * B - (w - T[6]) * (w - T[6]) * (w - T[9]),
    }


@lru_cache(maxsize=None)
def o1plus_sign_search(N: int = 2) -> dict:
    """Sign vectors s with q_i = s_i Qt^(Tt row i) making the o1plus theta formulas hold."""
    hits = []
    for signs in product((1, -1), repeat=4):
        m = build_mirror_map("o1plus", N, N, signs)
        ids = zk_identities("o1plus", m, _QtoT(m))
        if all(v.is_zero() for v in ids.values()):
            hits.append(signs)
    return {"cutoff": N, "hits": [list(h) for h in hits]}


def o1plus_signs() -> Tuple[int, ...]:
    hits = o1plus_sign_search()["hits"]
    if len(hits) != 1:
        raise ArithmeticError(f"o1plus sign convention is not unique: {hits}")
    return tuple(hits[0])


# --------------------------------------------------------------------------
# theta identities


def lambda_theta_identities(side: str, N: int = 3, W: int = 3) -> dict:
    m = build_mirror_map(side, N, W)
    tq = theta_policy(N, N)
    sq = {c.index: m.pullback_theta(genus2_theta(c, tq) ** 2) for c in CHARACTERISTICS}
    tt = m.pullback_theta(theta_tilde(tq))
    w = m.omega0_Q * m.omega0_Q
    T = sq[7] * sq[8] - sq[10] * sq[5] + sq[6] * sq[9]
    ids = {f"(a) {k}": v for k, v in zk_identities(side, m, sq).items()}
    ids["(b) quadratic"] = sq[8] * w * w - T * w + sq[6] * sq[7] * sq[9]
    ids["(b) closed form"] = sq[8] * w.scale(2) - (T - tt)
    ids["(c) discriminant"] = T * T - sq[6] * sq[7] * sq[8] * sq[9].scale(4) - tt * tt
    checks = {k: {"pass": v.is_zero(), "first_mismatch": _first(v)} for k, v in ids.items()}
    return {"side": side, "cutoff": {"N": N, "W": W}, "signs": list(m.signs), "checks": checks,
            "pass": all(c["pass"] for c in checks.values())}


def t_quadratic_check(N: int = 4) -> dict:
    """2 omega2 omega0 + 2 pi^2 omega0^2 + 4 U1 U2 - 2 U3^2 - 2 U4^2 = 0 with U = P omega^(1)."""
    from .gkz import z_policy
    b = frobenius_basis("o1", z_policy(N))
    P = GRAM_WITNESS["o1"]
    U = []
    for i in range(4):
        acc = None
        for j in range(4):
            if P[i][j]:
                t = b.omega1[j] * P[i][j]
                acc = t if acc is None else acc + t
        U.append(acc)
    w0 = LogSeries.from_series(b.omega0)
    expr = b.omega2 * w0 * 2 + LogSeries.from_series((b.omega0 * b.omega0).scale(VARPI * 2)) \
        + U[0] * U[1] * 4 - U[2] * U[2] * 2 - U[3] * U[3] * 2
    return {"cutoff": N, "pass": expr.is_zero()}


def mirror_report(side: str, N: int = 3, W: int = 3) -> dict:
    t0 = time.perf_counter()
    m = build_mirror_map(side, N, W)
    out = {
        "side": side,
        "cutoff": {"N": N, "W": W},
        "consts": [str(c) for c in m.consts],
        "signs": list(m.signs),
        "convention": "z_k(Q) = c_k Q_k + ...",
        "leading": leading_checks(m),
        "round_trip": round_trip_check(m),
    }
    if side == "o1":
        out["omega0_square"] = omega0_square_check(m)
        out["branch_shift"] = branch_shift_check()["pass"]
    else:
        out["sign_search"] = o1plus_sign_search()
    out["seconds"] = round(time.perf_counter() - t0, 3)
    flags = [all(out["leading"].values()), out["round_trip"]]
    if side == "o1":
        flags += [out["omega0_square"]["pass"], out["branch_shift"]]
    out["pass"] = all(flags)
    return out
