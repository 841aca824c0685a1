"""GKZ coefficient schemes, digamma bookkeeping and Frobenius solutions.

A scheme is a ratio of Gamma functions whose arguments are affine forms
l.n + a in the lattice vector n.  Replacing n by n + rho and expanding to
second order in rho gives c(n), its first and its second rho-derivatives as
elements of Q[kappa, varpi] (kappa = log 2, varpi = pi^2).  Euler's constant
is carried as a third formal symbol and must drop out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Dict, List, Sequence, Tuple

from .operators import pf_system
from .series import Coefficient, LogSeries, MultiSeries, TruncationPolicy

Vec = Tuple[int, ...]

# --------------------------------------------------------------------------
# Q[kappa, varpi, gamma] as {(a, b, g): Fraction}; small and private


def _padd(x, y, s=1):
    out = dict(x)
    for m, v in y.items():
        out[m] = out.get(m, 0) + s * v
    return {m: v for m, v in out.items() if v}


def _pmul(x, y):
    out = {}
    for (a, b, g), v in x.items():
        for (c, d, h), w in y.items():
            m = (a + c, b + d, g + h)
            out[m] = out.get(m, 0) + v * w
    return {m: v for m, v in out.items() if v}


def _pscale(x, r):
    return {m: v * r for m, v in x.items()} if r else {}


_ONE = {(0, 0, 0): Fraction(1)}


def _rat(r):
    return {(0, 0, 0): Fraction(r)} if r else {}


# --------------------------------------------------------------------------
# Gamma, digamma, trigamma at integers and half-integers


def _half(x: Fraction) -> bool:
    return x.denominator == 2


@lru_cache(maxsize=None)
def gamma_value(x: Fraction) -> Tuple[Fraction, int]:
    """Gamma(x) = r * sqrt(pi)^k for x in Z_{>0} or 1/2 + Z; returns (r, k)."""
    x = Fraction(x)
    if x.denominator == 1:
        if x <= 0:
            raise ValueError("pole")
        return Fraction(factorial(int(x) - 1)), 0
    if not _half(x):
        raise ValueError("only integer and half-integer arguments")
    m = x - Fraction(1, 2)
    if m >= 0:
        m = int(m)
        return Fraction(factorial(2 * m), 4 ** m * factorial(m)), 1
    k = int(-m)
    return Fraction((-4) ** k * factorial(k), factorial(2 * k)), 1


@lru_cache(maxsize=None)
def digamma(x: Fraction):
    """psi(x) in Q[kappa, gamma] (gamma = Euler's constant)."""
    x = Fraction(x)
    if x.denominator == 1:
        if x <= 0:
            raise ValueError("pole")
        return _padd({(0, 0, 1): Fraction(-1)}, _rat(sum(Fraction(1, j) for j in range(1, int(x)))))
    if not _half(x):
        raise ValueError("only integer and half-integer arguments")
    if x < 0:
        return _padd(digamma(x + 1), _rat(-1 / x))
    m = int(x - Fraction(1, 2))
    base = {(0, 0, 1): Fraction(-1), (1, 0, 0): Fraction(-2)}
    return _padd(base, _rat(2 * sum(Fraction(1, 2 * j - 1) for j in range(1, m + 1))))


@lru_cache(maxsize=None)
def trigamma(x: Fraction):
    """psi'(x) in Q[varpi]."""
    x = Fraction(x)
    if x.denominator == 1:
        if x <= 0:
            raise ValueError("pole")
        return _padd({(0, 1, 0): Fraction(1, 6)}, _rat(-sum(Fraction(1, k * k) for k in range(1, int(x)))))
    if x < 0:
        return _padd(trigamma(x + 1), _rat(1 / (x * x)))
    m = int(x - Fraction(1, 2))
    return _padd({(0, 1, 0): Fraction(1, 2)}, _rat(-4 * sum(Fraction(1, (2 * j - 1) ** 2) for j in range(1, m + 1))))


# --------------------------------------------------------------------------
# truncated polynomials in rho (total degree <= 2)

def _rho_keys(n=4):
    keys = [(0,) * n]
    for i in range(n):
        keys.append(tuple(int(j == i) for j in range(n)))
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            keys.append(tuple(e))
    return keys


def _rmul(A, B):
    out = {}
    for ea, va in A.items():
        for eb, vb in B.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) > 2:
                continue
            p = _pmul(va, vb)
            if p:
                out[e] = _padd(out.get(e, {}), p)
    return {e: v for e, v in out.items() if v}


def _linear_powers(l: Vec, c1, c2, n=4):
    """c0 + c1*eps + c2*eps^2 with eps = l.rho, as a rho polynomial (c0 = 1)."""
    out = {(0,) * n: dict(_ONE)}
    for i in range(n):
        if l[i] and c1:
            e = tuple(int(j == i) for j in range(n))
            out[e] = _padd(out.get(e, {}), _pscale(c1, l[i]))
    if c2:
        for i in range(n):
            for j in range(i, n):
                f = l[i] * l[j] * (1 if i == j else 2)
                if f:
                    e = [0] * n
                    e[i] += 1
                    e[j] += 1
                    out[tuple(e)] = _padd(out.get(tuple(e), {}), _pscale(c2, f))
    return {e: v for e, v in out.items() if v}


def _pole_factor(l: Vec, m: int, n=4):
    """1/Gamma(-m + eps) = (-1)^m m! eps (1 - psi(m+1) eps) + O(eps^3)."""
    lead = Fraction((-1) ** m * factorial(m))
    ps = digamma(Fraction(m + 1))
    out = {}
    for i in range(n):
        if l[i]:
            e = tuple(int(j == i) for j in range(n))
            out[e] = _rat(lead * l[i])
    for i in range(n):
        for j in range(i, n):
            f = l[i] * l[j] * (1 if i == j else 2)
            if f:
                e = [0] * n
                e[i] += 1
                e[j] += 1
                out[tuple(e)] = _padd(out.get(tuple(e), {}), _pscale(ps, -lead * f))
    return {e: v for e, v in out.items() if v}


# --------------------------------------------------------------------------
# coefficient schemes


@dataclass(frozen=True)
class GammaScheme:
    """c(n) = norm * prod Gamma(num) / (Gamma(1/2)^half_power * prod Gamma(den)).

    Each factor is (l, a) meaning the argument l.n + a.
    """

    tag: str
    num: Tuple[Tuple[Vec, Fraction], ...]
    den: Tuple[Tuple[Vec, Fraction], ...]
    half_power: int = 3
    norm: Fraction = Fraction(1)

    def expansion(self, n: Sequence[int]):
        """Second-order rho expansion of c(n + rho): {rho exponent: Q[k,p,g] dict}."""
        return _expansion(self, tuple(n))

    def coeff(self, n) -> Fraction:
        e = self.expansion(n).get((0, 0, 0, 0), {})
        return e.get((0, 0, 0), Fraction(0))

    def first(self, n, i) -> Coefficient:
        key = tuple(int(j == i) for j in range(4))
        return _to_coef(self.expansion(n).get(key, {}))

    def second(self, n, i, j) -> Coefficient:
        """d^2/(drho_i drho_j) c(n + rho) at rho = 0."""
        e = [0, 0, 0, 0]
        e[i] += 1
        e[j] += 1
        v = _to_coef(self.expansion(n).get(tuple(e), {}))
        return v * 2 if i == j else v


def _to_coef(p) -> Coefficient:
    t = {}
    for (a, b, g), v in p.items():
        if g:
            raise ArithmeticError("Euler's constant failed to cancel")
        t[(a, b)] = v
    return Coefficient(t)


@lru_cache(maxsize=None)
def _expansion(s: GammaScheme, n: Vec):
    n4 = len(n)
    rat = Fraction(s.norm)
    spi = -s.half_power
    poly = {(0,) * n4: dict(_ONE)}
    for l, a in s.num:
        x = sum(li * ni for li, ni in zip(l, n)) + Fraction(a)
        if x.denominator == 1 and x <= 0:
            raise ValueError(f"numerator pole in scheme {s.tag} at n={n}")
        r, k = gamma_value(x)
        rat *= r
        spi += k
        ps, tr = digamma(x), trigamma(x)
        c2 = _pscale(_padd(_pmul(ps, ps), tr), Fraction(1, 2))
        poly = _rmul(poly, _linear_powers(l, ps, c2, n4))
    poles = 0
    for l, a in s.den:
        x = sum(li * ni for li, ni in zip(l, n)) + Fraction(a)
        if x.denominator == 1 and x <= 0:
            poles += 1
            if poles > 2:
                return {}
            poly = _rmul(poly, _pole_factor(l, int(-x), n4))
            continue
        r, k = gamma_value(x)
        rat /= r
        spi -= k
        ps, tr = digamma(x), trigamma(x)
        c2 = _pscale(_padd(_pmul(ps, ps), _pscale(tr, -1)), Fraction(1, 2))
        poly = _rmul(poly, _linear_powers(l, _pscale(ps, -1), c2, n4))
    if spi != 0:
        raise ArithmeticError(f"scheme {s.tag}: sqrt(pi) does not cancel")
    return {e: _pscale(v, rat) for e, v in poly.items() if v}


def _f(x):
    return Fraction(x)


H = Fraction(1, 2)

O1 = GammaScheme(
    "o1",
    num=(((1, 0, 0, 0), H), ((0, 1, 0, 0), H), ((0, 0, 1, 0), H)),
    den=(((-1, 0, 0, 1), _f(1)), ((0, -1, 0, 1), _f(1)), ((0, 0, -1, 1), _f(1)),
         ((1, 1, 0, -1), _f(1)), ((1, 0, 1, -1), _f(1)), ((0, 1, 1, -1), _f(1))),
)

O1PLUS = GammaScheme(
    "o1plus",
    num=(((1, 1, -1, -1), H), ((0, 0, 1, 0), H), ((0, 0, 0, 1), H)),
    den=(((1, 0, -1, 0), _f(1)), ((1, 0, 0, -1), _f(1)), ((0, 1, -1, 0), _f(1)), ((0, 1, 0, -1), _f(1)),
         ((-1, 0, 1, 1), _f(1)), ((0, -1, 1, 1), _f(1))),
)

# printed without a Gamma(1/2) normalisation; here scaled so that c(0) = 1
YOSHIDA = GammaScheme(
    "yoshida",
    num=(((1, 0, 1, 0), H), ((0, 1, 0, 1), H), ((1, 1, 0, 0), H), ((0, 0, 1, 1), H)),
    den=(((1, 1, 1, 1), Fraction(3, 2)), ((1, 0, 0, 0), _f(1)), ((0, 1, 0, 0), _f(1)),
         ((0, 0, 1, 0), _f(1)), ((0, 0, 0, 1), _f(1))),
    half_power=3,
    norm=Fraction(1, 2),
)

SCHEMES = {"o1": O1, "o1plus": O1PLUS, "yoshida": YOSHIDA}


def coeff(scheme: str | GammaScheme, n) -> Fraction:
    s = SCHEMES[scheme] if isinstance(scheme, str) else scheme
    return s.coeff(n)


def rho_derivative(scheme: str | GammaScheme, n, order) -> Coefficient:
    """order = i (first derivative) or (i, j) (second); indices are 0-based."""
    s = SCHEMES[scheme] if isinstance(scheme, str) else scheme
    if isinstance(order, int):
        return s.first(n, order)
    i, j = order
    return s.second(n, i, j)


# --------------------------------------------------------------------------
# Frobenius basis


def z_policy(N: int, window=None) -> TruncationPolicy:
    """Total degree <= N in all four variables (window only for boxes)."""
    return TruncationPolicy((1, 1, 1, 1), N)


def box_points(policy: TruncationPolicy):
    """Nonnegative integer exponent vectors admitted by a policy."""
    tops = []
    for w, x in zip(policy.weights, policy.windows):
        tops.append(int(policy.cutoff / w) if w else int(x))
    for p in product(*[range(t + 1) for t in tops]):
        if policy.admits([4 * x for x in p]):
            yield p


@dataclass
class FrobeniusBasis:
    system: str
    omega0: MultiSeries
    omega1: List[LogSeries]
    omega2: LogSeries
    # the pieces: sum dc_i z^n and the M-weighted second-derivative sum
    sigma: List[MultiSeries]

    def solutions(self) -> List[LogSeries]:
        return [LogSeries.from_series(self.omega0)] + list(self.omega1) + [self.omega2]


def _system_data(tag: str):
    sysm = pf_system(tag)
    return sysm, SCHEMES[sysm.base]


def frobenius_basis(tag: str, policy: TruncationPolicy, M=None) -> FrobeniusBasis:
    """Six local solutions in the coordinates of the system ``tag``.

    For transported systems the base scheme is re-indexed through the
    monomial chart z = w^A: the exponent of w is A^T n and log z_j becomes
    sum_k A[j][k] log w_k.
    """
    from .indicial import pairing_matrix, indicial_ideal

    sysm, scheme = _system_data(tag)
    if M is None:
        M = pairing_matrix(indicial_ideal(sysm.base), 2)
    A = sysm.chart or [[int(i == j) for j in range(4)] for i in range(4)]
    AT_inv = _int_inverse_T(A)
    C: Dict = {}
    D = [dict() for _ in range(4)]
    Hm: Dict = {}
    for w in box_points(policy):
        n = tuple(sum(AT_inv[i][k] * w[k] for k in range(4)) for i in range(4))
        if min(n) < 0:
            continue
        exp = scheme.expansion(n)
        if not exp:
            continue
        c = exp.get((0, 0, 0, 0), {}).get((0, 0, 0), 0)
        if c:
            C[w] = c
        for i in range(4):
            d = scheme.first(n, i)
            if not d.is_zero():
                D[i][w] = d
        h = Coefficient(0)
        for i in range(4):
            for j in range(4):
                if M[i][j]:
                    h = h + scheme.second(n, i, j) * M[i][j]
        if not h.is_zero():
            Hm[w] = h
    om0 = MultiSeries(policy, C)
    sig = [MultiSeries(policy, D[i]) for i in range(4)]
    hser = MultiSeries(policy, Hm)
    # L_j (old logs) as linear forms in the new logs
    L = []
    for j in range(4):
        L.append(LogSeries(policy, {tuple(int(a == b) for a in range(4)): MultiSeries.constant(policy, A[j][b])
                                    for b in range(4) if A[j][b]}))
    om1 = [L[i] * om0 + sig[i] for i in range(4)]
    # omega2 = -1/2 sum M_ij (d_i d_j c + d_i c L_j + d_j c L_i + c L_i L_j)
    acc = LogSeries.from_series(hser)
    for i in range(4):
        for j in range(4):
            if M[i][j]:
                acc = acc + (L[j] * sig[i] + L[i] * sig[j] + L[i] * L[j] * om0) * M[i][j]
    om2 = acc * Fraction(-1, 2)
    return FrobeniusBasis(tag, om0, om1, om2, sig)


def _int_inverse_T(A):
    # (A^T)^{-1}
    from .operators import _inverse_int
    inv = _inverse_int(A)
    return [[inv[j][i] for j in range(4)] for i in range(4)]


# --------------------------------------------------------------------------
# checks


def verify_annihilation(tag: str, basis: FrobeniusBasis | None = None, N: int = 6):
    """Apply all nine operators to all six solutions; report residues."""
    policy = z_policy(N)
    sysm = pf_system(tag)
    basis = basis or frobenius_basis(tag, policy)
    labels = ["omega0", "omega1_1", "omega1_2", "omega1_3", "omega1_4", "omega2"]
    failures = []
    for op in sysm.operators:
        for lab, sol in zip(labels, basis.solutions()):
            r = op.apply(sol)
            if not r.is_zero():
                key, s = r.components()[0]
                e, c = next(s.terms())
                failures.append({"operator": op.name, "solution": lab, "log": list(key),
                                 "exp": [str(x) for x in e], "coef": c.to_json()})
    return {"system": tag, "N": N, "checked": len(sysm.operators) * 6, "pass": not failures,
            "failures": failures[:10]}


def quadratic_relation(basis: FrobeniusBasis, M, d) -> LogSeries:
    """(2 omega2 + d varpi omega0) omega0 + sum M_ij omega1_i omega1_j."""
    w0 = basis.omega0
    first = (basis.omega2 * 2 + LogSeries.from_series(w0.scale(Coefficient.varpi() * Fraction(d)))) * w0
    acc = first
    for i in range(4):
        for j in range(4):
            if M[i][j]:
                acc = acc + basis.omega1[i] * basis.omega1[j] * M[i][j]
    return acc


def verify_quadratic_relation(tag: str, d=2, N: int = 4):
    from .indicial import pairing_matrix, indicial_ideal
    sysm = pf_system(tag)
    M = pairing_matrix(indicial_ideal(sysm.base), 2)
    basis = frobenius_basis(tag, z_policy(N), M)
    r = quadratic_relation(basis, M, d)
    out = {"system": tag, "d": str(d), "N": N, "pass": r.is_zero()}
    if not r.is_zero():
        key, s = r.components()[0]
        e, c = next(s.terms())
        out["first_nonzero"] = {"log": list(key), "exp": [str(x) for x in e], "coef": c.to_json()}
    return out


def yoshida_laurent_witness(bound: int = 3):
    """Compare negative-exponent support of naive rho-derivatives."""
    from .indicial import pairing_matrix, indicial_ideal
    box = list(product(range(-bound, bound + 1), repeat=4))
    neg = [n for n in box if min(n) < 0]
    witness = None
    for n in sorted(neg, key=lambda v: (sum(abs(x) for x in v), v)):
        d = YOSHIDA.first(n, 0)
        if not d.is_zero():
            witness = {"n": list(n), "value": d.to_json()}
            break
    M = pairing_matrix(indicial_ideal("o1"), 2)
    o1_first = []
    o1_second = []
    for n in neg:
        for i in range(4):
            if not O1.first(n, i).is_zero():
                o1_first.append((list(n), i))
        h = Coefficient(0)
        for i in range(4):
            for j in range(4):
                if M[i][j]:
                    h = h + O1.second(n, i, j) * M[i][j]
        if not h.is_zero():
            o1_second.append(list(n))
    listed = YOSHIDA.first((-1, 1, 0, 0), 0)
    return {
        "box": bound,
        "yoshida_witness": witness,
        "yoshida_at_-1100": listed.to_json(),
        "o1_negative_first": o1_first[:5],
        "o1_negative_second": o1_second[:5],
        "pass": witness is not None and not o1_first and not o1_second,
    }
