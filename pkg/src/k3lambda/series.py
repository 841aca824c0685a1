"""Exact sparse truncated Laurent series in up to four variables.

Coefficients live in Q[kappa, varpi] where kappa stands for log 2 and
varpi for pi^2, each monomial of total degree at most 2.  Exponents are
rationals whose denominators divide 4.  Truncation is controlled by a
:class:`TruncationPolicy`: a weighted-degree cutoff on the graded
variables and a window on the absolute exponent of the weight-0 ones.

Internally an exponent vector is packed into one Python integer (each
component scaled by 4 and offset), so that multiplying monomials is a
single integer addition.  Nothing of this leaks through the public API.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterator, Mapping, Sequence, Tuple, Union

Rational = Union[int, Fraction]

# --------------------------------------------------------------------------
# Coefficient

# monomial kappa^a varpi^b  <->  JSON key
_CKEYS = {(0, 0): "1", (1, 0): "k", (0, 1): "p", (2, 0): "kk", (1, 1): "kp", (0, 2): "pp"}
_CKEYS_INV = {v: k for k, v in _CKEYS.items()}
_CORDER = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def _norm(v):
    # keep integral values as int: int arithmetic is much faster than Fraction
    if type(v) is Fraction and v.denominator == 1:
        return v.numerator
    return v


def as_rational(x) -> Rational:
    if isinstance(x, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return _norm(x)
    if isinstance(x, str):
        return _norm(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


class Coefficient:
    """Element of Q[kappa, varpi] truncated at total degree 2.

    >>> k = Coefficient.kappa()
    >>> str(-2 * k + Fraction(1, 2))
    '1/2 - 2k'
    """

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[Tuple[int, int], Rational] | Rational = 0):
        if not isinstance(terms, Mapping):
            terms = {(0, 0): terms}
        t = {}
        for m, v in terms.items():
            v = as_rational(v)
            if v == 0:
                continue
            if m not in _CKEYS:
                raise ValueError(f"constant monomial {m} exceeds degree 2")
            t[m] = v
        self._t = t

    @classmethod
    def kappa(cls) -> "Coefficient":
        return cls({(1, 0): 1})

    @classmethod
    def varpi(cls) -> "Coefficient":
        return cls({(0, 1): 1})

    @classmethod
    def coerce(cls, x) -> "Coefficient":
        return x if isinstance(x, Coefficient) else cls(as_rational(x))

    def items(self):
        return self._t.items()

    def __getitem__(self, m):
        if isinstance(m, str):
            m = _CKEYS_INV[m]
        return self._t.get(m, 0)

    def is_zero(self) -> bool:
        return not self._t

    def is_rational(self) -> bool:
        return all(m == (0, 0) for m in self._t)

    def rational(self) -> Rational:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._t.get((0, 0), 0)

    def __add__(self, o):
        o = Coefficient.coerce(o)
        t = dict(self._t)
        for m, v in o._t.items():
            t[m] = t.get(m, 0) + v
        return Coefficient(t)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient({m: -v for m, v in self._t.items()})

    def __sub__(self, o):
        return self + (-Coefficient.coerce(o))

    def __rsub__(self, o):
        return Coefficient.coerce(o) - self

    def __mul__(self, o):
        o = Coefficient.coerce(o)
        t: Dict[Tuple[int, int], Rational] = {}
        for (a, b), v in self._t.items():
            for (c, d), w in o._t.items():
                m = (a + c, b + d)
                if m not in _CKEYS:
                    raise ValueError("kappa/varpi degree would exceed 2")
                t[m] = t.get(m, 0) + v * w
        return Coefficient(t)

    __rmul__ = __mul__

    def __truediv__(self, o):
        r = as_rational(o)
        return Coefficient({m: Fraction(v) / r for m, v in self._t.items()})

    def __eq__(self, o):
        try:
            o = Coefficient.coerce(o)
        except TypeError:
            return NotImplemented
        return self._t == o._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def to_json(self) -> Dict[str, str]:
        return {_CKEYS[m]: str(self._t[m]) for m in _CORDER if m in self._t}

    @classmethod
    def from_json(cls, d: Mapping[str, str]) -> "Coefficient":
        return cls({_CKEYS_INV[k]: Fraction(v) for k, v in d.items()})

    def __str__(self):
        if not self._t:
            return "0"
        out = []
        for m in _CORDER:
            if m not in self._t:
                continue
            v = self._t[m]
            sym = _CKEYS[m]
            if sym == "1":
                s = str(abs(v))
            elif abs(v) == 1:
                s = sym
            else:
                s = f"{abs(v)}{sym}"
            out.append(("-" if v < 0 else "+", s))
        head = ("-" if out[0][0] == "-" else "") + out[0][1]
        return head + "".join(f" {sg} {s}" for sg, s in out[1:])

    def __repr__(self):
        return f"Coefficient({self})"


# --------------------------------------------------------------------------
# exponent packing

_BITS = 20
_OFF = 1 << (_BITS - 1)
_MASK = (1 << _BITS) - 1


def _scaled(e) -> int:
    f = Fraction(e)
    if 4 % f.denominator:
        raise ValueError(f"exponent {e} has denominator not dividing 4")
    return int(f * 4)


class _Packer:
    # component 0 lives in the highest bits, so integer order = lex order
    def __init__(self, n: int):
        self.n = n
        self.shifts = [_BITS * (n - 1 - i) for i in range(n)]
        self.bias = sum(_OFF << s for s in self.shifts)

    def pack(self, scaled: Sequence[int]) -> int:
        k = 0
        for e, s in zip(scaled, self.shifts):
            if not -_OFF <= e < _OFF:
                raise OverflowError("exponent out of packable range")
            k |= (e + _OFF) << s
        return k

    def unpack(self, k: int) -> Tuple[int, ...]:
        return tuple(((k >> s) & _MASK) - _OFF for s in self.shifts)

    def comp(self, k: int, i: int) -> int:
        return ((k >> self.shifts[i]) & _MASK) - _OFF


_PACKERS: Dict[int, _Packer] = {}


def _packer(n: int) -> _Packer:
    p = _PACKERS.get(n)
    if p is None:
        p = _PACKERS[n] = _Packer(n)
    return p


# --------------------------------------------------------------------------
# truncation policy


class TruncationPolicy:
    """Weighted-degree cutoff plus a Laurent window.

    ``weights`` has one nonnegative integer per variable.  A monomial is kept
    when sum(w_i e_i) <= cutoff and |e_j| <= window_j for every j of weight 0.
    ``window`` is either one bound for all weight-0 variables or a sequence
    with one entry per variable (entries at positive weights are ignored).
    """

    __slots__ = ("weights", "cutoff", "windows", "_cut", "_win")

    def __init__(self, weights: Sequence[int], cutoff, window=0):
        weights = tuple(int(w) for w in weights)
        if not weights or len(weights) > 4:
            raise ValueError("between 1 and 4 variables")
        if any(w < 0 for w in weights) or not any(weights):
            raise ValueError("weights must be nonnegative with at least one positive")
        if isinstance(window, (int, Fraction)):
            windows = tuple(Fraction(window) if w == 0 else None for w in weights)
        else:
            windows = tuple(Fraction(x) if w == 0 else None for w, x in zip(weights, window))
            if len(windows) != len(weights):
                raise ValueError("window sequence length mismatch")
        if any(x is not None and x < 0 for x in windows):
            raise ValueError("window must be nonnegative")
        self.weights = weights
        self.cutoff = Fraction(cutoff)
        self.windows = windows
        self._cut = int(self.cutoff * 4)  # compared against scaled degrees
        self._win = tuple((i, int(x * 4)) for i, x in enumerate(windows) if x is not None)

    @property
    def arity(self) -> int:
        return len(self.weights)

    def meet(self, other: "TruncationPolicy") -> "TruncationPolicy":
        if other is self:
            return self
        if self.weights != other.weights:
            raise ValueError("incompatible policies (different weights)")
        win = [None if a is None else min(a, b) for a, b in zip(self.windows, other.windows)]
        return TruncationPolicy(self.weights, min(self.cutoff, other.cutoff),
                                [0 if x is None else x for x in win])

    def admits(self, scaled: Sequence[int]) -> bool:
        if sum(w * e for w, e in zip(self.weights, scaled)) > self._cut:
            return False
        return all(abs(scaled[i]) <= b for i, b in self._win)

    def __eq__(self, o):
        return isinstance(o, TruncationPolicy) and (self.weights, self.cutoff, self.windows) == (
            o.weights, o.cutoff, o.windows)

    def __hash__(self):
        return hash((self.weights, self.cutoff, self.windows))

    def __repr__(self):
        w = [None if x is None else str(x) for x in self.windows]
        return f"TruncationPolicy(weights={self.weights}, cutoff={self.cutoff}, windows={w})"


# --------------------------------------------------------------------------
# MultiSeries


def _signed_degree(pol: TruncationPolicy, pk: _Packer, k: int) -> int:
    return sum(w * pk.comp(k, i) for i, w in enumerate(pol.weights) if w)


class MultiSeries:
    """Immutable sparse truncated Laurent series.

    Build from a mapping ``{exponent tuple: coefficient}``; exponents may be
    ints, Fractions or strings like ``"1/2"``, coefficients may be rationals
    or :class:`Coefficient`.  Terms outside the policy are dropped.
    """

    __slots__ = ("policy", "_parts", "_pk")

    def __init__(self, policy: TruncationPolicy, terms: Mapping | None = None):
        self.policy = policy
        self._pk = _packer(policy.arity)
        parts: Dict[Tuple[int, int], Dict[int, Rational]] = {}
        for e, c in (terms or {}).items():
            e = tuple(e) if not isinstance(e, (int, Fraction, str)) else (e,)
            if len(e) != policy.arity:
                raise ValueError("arity mismatch")
            sc = [_scaled(x) for x in e]
            if not policy.admits(sc):
                continue
            k = self._pk.pack(sc)
            for m, v in Coefficient.coerce(c).items():
                d = parts.setdefault(m, {})
                d[k] = _norm(d.get(k, 0) + v)
        self._parts = _clean(parts)

    # -- construction helpers ------------------------------------------------
    @classmethod
    def _raw(cls, policy, parts):
        s = object.__new__(cls)
        s.policy = policy
        s._pk = _packer(policy.arity)
        s._parts = parts
        return s

    @classmethod
    def zero(cls, policy):
        return cls._raw(policy, {})

    @classmethod
    def constant(cls, policy, c=1):
        return cls(policy, {(0,) * policy.arity: c})

    one = constant

    @classmethod
    def monomial(cls, policy, exps, c=1):
        return cls(policy, {tuple(exps): c})

    @classmethod
    def var(cls, policy, i, c=1):
        e = [0] * policy.arity
        e[i] = 1
        return cls(policy, {tuple(e): c})

    # -- inspection ------------------------------------------------------------
    @property
    def arity(self):
        return self.policy.arity

    def __len__(self):
        return len({k for d in self._parts.values() for k in d})

    def is_zero(self):
        return not self._parts

    def __bool__(self):
        return not self.is_zero()

    def _keys(self):
        ks = set()
        for d in self._parts.values():
            ks.update(d)
        return sorted(ks)

    def _coef_at(self, k) -> Coefficient:
        return Coefficient({m: d[k] for m, d in self._parts.items() if k in d})

    def terms(self) -> Iterator[Tuple[Tuple[Fraction, ...], Coefficient]]:
        """Yield (exponent tuple, Coefficient) in lexicographic exponent order."""
        for k in self._keys():
            yield tuple(Fraction(x, 4) for x in self._pk.unpack(k)), self._coef_at(k)

    def support(self):
        return [e for e, _ in self.terms()]

    def coefficient(self, exps) -> Coefficient:
        exps = tuple(exps) if not isinstance(exps, (int, Fraction, str)) else (exps,)
        k = self._pk.pack([_scaled(x) for x in exps])
        return self._coef_at(k)

    def __getitem__(self, exps):
        return self.coefficient(exps)

    def constant_term(self) -> Coefficient:
        return self.coefficient((0,) * self.arity)

    def is_rational(self):
        return all(m == (0, 0) for m in self._parts)

    def rational_part(self) -> "MultiSeries":
        return MultiSeries._raw(self.policy, {(0, 0): dict(self._parts[(0, 0)])} if (0, 0) in self._parts else {})

    def constant_part(self, key) -> "MultiSeries":
        """Coefficient series of one kappa/varpi monomial (key like 'k' or (1,0))."""
        if isinstance(key, str):
            key = _CKEYS_INV[key]
        d = self._parts.get(key)
        return MultiSeries._raw(self.policy, {(0, 0): dict(d)} if d else {})

    def min_degree(self):
        """Smallest weighted degree occurring (None for the zero series)."""
        ks = self._keys()
        if not ks:
            return None
        return Fraction(min(_signed_degree(self.policy, self._pk, k) for k in ks), 4)

    # -- arithmetic -------------------------------------------------------------
    def _coerce(self, o):
        if isinstance(o, MultiSeries):
            if o.arity != self.arity:
                raise ValueError("arity mismatch")
            return o
        return MultiSeries.constant(self.policy, o)

    def __add__(self, o):
        o = self._coerce(o)
        pol = self.policy.meet(o.policy)
        parts = {m: dict(d) for m, d in self._parts.items()}
        for m, d in o._parts.items():
            t = parts.setdefault(m, {})
            for k, v in d.items():
                t[k] = t.get(k, 0) + v
        out = MultiSeries._raw(pol, _clean(parts))
        return out if pol == self.policy and pol == o.policy else out.truncate(pol)

    __radd__ = __add__

    def __neg__(self):
        return MultiSeries._raw(self.policy, {m: {k: -v for k, v in d.items()} for m, d in self._parts.items()})

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def scale(self, c) -> "MultiSeries":
        c = Coefficient.coerce(c)
        parts: Dict = {}
        for (a, b), v in c.items():
            for (x, y), d in self._parts.items():
                m = (a + x, b + y)
                if m not in _CKEYS:
                    raise ValueError("kappa/varpi degree would exceed 2")
                t = parts.setdefault(m, {})
                for k, w in d.items():
                    t[k] = t.get(k, 0) + v * w
        return MultiSeries._raw(self.policy, _clean(parts))

    def __mul__(self, o):
        if not isinstance(o, MultiSeries):
            return self.scale(o)
        o = self._coerce(o)
        pol = self.policy.meet(o.policy)
        parts: Dict = {}
        for ma, da in self._parts.items():
            for mb, db in o._parts.items():
                m = (ma[0] + mb[0], ma[1] + mb[1])
                if m not in _CKEYS:
                    raise ValueError("kappa/varpi degree would exceed 2")
                _mul_into(parts.setdefault(m, {}), da, db, pol, self._pk)
        return MultiSeries._raw(pol, _clean(parts))

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, MultiSeries):
            return self * o.invert()
        return self.scale(Fraction(1) / as_rational(o))

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = MultiSeries.constant(self.policy, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_monomial(self, exps, c=1) -> "MultiSeries":
        sc = [_scaled(x) for x in exps]
        if len(sc) != self.arity:
            raise ValueError("arity mismatch")
        shift = self._pk.pack(sc) - self._pk.bias
        parts = {m: {k + shift: v for k, v in d.items()} for m, d in self._parts.items()}
        out = MultiSeries._raw(self.policy, parts).truncate(self.policy)
        return out if c == 1 else out.scale(c)

    def __eq__(self, o):
        if not isinstance(o, MultiSeries):
            try:
                o = self._coerce(o)
            except TypeError:
                return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        return hash(tuple(self.to_json_key()))

    def to_json_key(self):
        return [(tuple(map(str, e)), tuple(sorted(c.to_json().items()))) for e, c in self.terms()]

    # -- truncation and variable maps ---------------------------------------------
    def truncate(self, policy: TruncationPolicy) -> "MultiSeries":
        if policy.arity != self.arity:
            raise ValueError("arity mismatch")
        pk = self._pk
        keep = {}
        for m, d in self._parts.items():
            t = {k: v for k, v in d.items() if policy.admits(pk.unpack(k))}
            if t:
                keep[m] = t
        return MultiSeries._raw(policy, keep)

    def with_policy(self, policy):
        """Reinterpret under a policy (terms outside are dropped)."""
        return self.truncate(policy)

    def map_coefficients(self, f: Callable[[Tuple[Fraction, ...], Coefficient], Coefficient]):
        return MultiSeries(self.policy, {e: f(e, c) for e, c in self.terms()})

    def euler(self, i: int) -> "MultiSeries":
        """Euler operator z_i d/dz_i."""
        pk = self._pk
        parts = {}
        for m, d in self._parts.items():
            t = {}
            for k, v in d.items():
                e = pk.comp(k, i)
                if e:
                    t[k] = _norm(v * Fraction(e, 4)) if e % 4 else v * (e // 4)
            if t:
                parts[m] = t
        return MultiSeries._raw(self.policy, parts)

    def substitute_monomials(self, images: Sequence[Tuple[Rational, Sequence]], policy: TruncationPolicy):
        """Replace variable i by images[i] = (c_i, exponents in the new variables).

        c_i must be a nonzero rational; a fractional power of c_i is only
        allowed when c_i = 1.
        """
        if len(images) != self.arity:
            raise ValueError("one image per variable")
        imgs = [(as_rational(c), [Fraction(x) for x in e]) for c, e in images]
        for _, e in imgs:
            if len(e) != policy.arity:
                raise ValueError("image arity mismatch")
        pk_new = _packer(policy.arity)
        parts: Dict = {}
        for m, d in self._parts.items():
            t = parts.setdefault(m, {})
            for k, v in d.items():
                sc = self._pk.unpack(k)
                new = [Fraction(0)] * policy.arity
                coef = Fraction(1)
                for s, (c, e) in zip(sc, imgs):
                    if not s:
                        continue
                    ex = Fraction(s, 4)
                    if c != 1:
                        if ex.denominator != 1:
                            raise ValueError("fractional power of a non-unit image coefficient")
                        coef *= Fraction(c) ** int(ex)
                    for j, x in enumerate(e):
                        new[j] += ex * x
                nsc = [_scaled(x) for x in new]
                if not policy.admits(nsc):
                    continue
                nk = pk_new.pack(nsc)
                t[nk] = t.get(nk, 0) + v * coef
        return MultiSeries._raw(policy, _clean(parts))

    def swap_variables(self, i, j) -> "MultiSeries":
        perm = list(range(self.arity))
        perm[i], perm[j] = perm[j], perm[i]
        imgs = []
        for a in range(self.arity):
            e = [0] * self.arity
            e[perm[a]] = 1
            imgs.append((1, e))
        return self.substitute_monomials(imgs, self.policy)

    # -- transcendental operations ----------------------------------------------
    def _split_unit(self):
        c0 = self.constant_term()
        if c0.is_zero() or not c0.is_rational():
            raise ValueError("constant term is not an invertible rational")
        c = c0.rational()
        r = self.scale(Fraction(1) / Fraction(c)) - 1
        return c, r

    def invert(self) -> "MultiSeries":
        c, r = self._split_unit()
        # 1/(c(1+r)) = (1/c) sum (-r)^k
        return _nilpotent_sum(r, lambda k: (-1) ** k).scale(Fraction(1) / Fraction(c))

    invert_unit = invert

    def exp(self) -> "MultiSeries":
        if not self.constant_term().is_zero():
            raise ValueError("exp needs a zero constant term")
        return _nilpotent_sum(self, lambda k: Fraction(1, factorial(k)))

    def log(self) -> "MultiSeries":
        if self.constant_term() != 1:
            raise ValueError("log needs constant term 1")
        r = self - 1
        return _nilpotent_sum(r, lambda k: 0 if k == 0 else Fraction((-1) ** (k + 1), k))

    def power_unit(self, alpha) -> "MultiSeries":
        """(1+r)^alpha for a series with constant term 1 and rational alpha."""
        if self.constant_term() != 1:
            raise ValueError("power_unit needs constant term 1")
        alpha = Fraction(alpha)
        r = self - 1

        def binom(k):
            out = Fraction(1)
            for j in range(k):
                out *= (alpha - j) / (j + 1)
            return out
        return _nilpotent_sum(r, binom)

    def sqrt_with_leading(self, c, exps) -> "MultiSeries":
        """Square root whose leading term is the signed monomial c*x^exps."""
        c = as_rational(c)
        exps = [Fraction(x) for x in exps]
        lead_sq = [2 * x for x in exps]
        u = self.mul_monomial([-x for x in lead_sq]) if any(lead_sq) else self
        # the shift back must not lose terms: compare with an unshifted check
        if u.mul_monomial(lead_sq) != self:
            raise ValueError("series is not leading^2 times a unit within the window")
        u = u.scale(Fraction(1) / (Fraction(c) ** 2))
        if u.constant_term() != 1:
            raise ValueError("series does not start with leading^2")
        return u.power_unit(Fraction(1, 2)).mul_monomial(exps, c)

    # -- output ---------------------------------------------------------------------
    def to_json(self):
        return [{"exp": [str(x) for x in e], "coef": c.to_json()} for e, c in self.terms()]

    @classmethod
    def from_json(cls, policy, data):
        return cls(policy, {tuple(Fraction(x) for x in t["exp"]): Coefficient.from_json(t["coef"]) for t in data})

    def to_dict(self):
        """{exponent tuple: rational} for rational series (handy in tests)."""
        out = {}
        for e, c in self.terms():
            out[e] = c.rational()
        return out

    def format(self, names: Sequence[str] | None = None, limit: int | None = None) -> str:
        names = names or [f"q{i + 1}" for i in range(self.arity)]
        out = []
        for n, (e, c) in enumerate(self.terms()):
            if limit is not None and n >= limit:
                out.append("...")
                break
            mono = "*".join(
                nm if x == 1 else f"{nm}^{x}" if x.denominator == 1 else f"{nm}^({x})"
                for nm, x in zip(names, e) if x != 0)
            cs = str(c)
            cs = f"({cs})" if (" " in cs) else cs
            out.append(cs if not mono else mono if cs == "1" else f"-{mono}" if cs == "-1" else f"{cs}*{mono}")
        if not out:
            return "0"
        text = out[0]
        for t in out[1:]:
            text += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return text

    def __repr__(self):
        return f"MultiSeries({self.format(limit=12)})"


def _clean(parts):
    out = {}
    for m, d in parts.items():
        t = {k: _norm(v) for k, v in d.items() if v != 0}
        if t:
            out[m] = t
    return out


def _mul_into(out, da, db, pol, pk):
    cut = pol._cut
    win = pol._win
    weights = [(i, w) for i, w in enumerate(pol.weights) if w]
    bias = pk.bias

    def deg(k):
        return sum(w * pk.comp(k, i) for i, w in weights)

    B = sorted((deg(k), k, v) for k, v in db.items())
    bdeg = [b[0] for b in B]
    if not win:
        for ka, va in da.items():
            n = bisect_right(bdeg, cut - deg(ka))
            for j in range(n):
                _, kb, vb = B[j]
                k = ka + kb - bias
                out[k] = out.get(k, 0) + va * vb
        return
    # window checks on packed fields
    Bw = [tuple(pk.comp(kb, i) for i, _ in win) for _, kb, _ in B]
    bounds = [b for _, b in win]
    if len(win) == 1:
        (b0,) = bounds
        for ka, va in da.items():
            n = bisect_right(bdeg, cut - deg(ka))
            a0 = pk.comp(ka, win[0][0])
            for j in range(n):
                s0 = a0 + Bw[j][0]
                if s0 > b0 or s0 < -b0:
                    continue
                kb, vb = B[j][1], B[j][2]
                k = ka + kb - bias
                out[k] = out.get(k, 0) + va * vb
        return
    for ka, va in da.items():
        n = bisect_right(bdeg, cut - deg(ka))
        aw = [pk.comp(ka, i) for i, _ in win]
        for j in range(n):
            bw = Bw[j]
            ok = True
            for x, y, b in zip(aw, bw, bounds):
                s = x + y
                if s > b or s < -b:
                    ok = False
                    break
            if not ok:
                continue
            kb, vb = B[j][1], B[j][2]
            k = ka + kb - bias
            out[k] = out.get(k, 0) + va * vb


def _nilpotent_sum(r: MultiSeries, coef: Callable[[int], Rational], max_terms: int | None = None) -> MultiSeries:
    """sum_k coef(k) r^k, stopping when r^k truncates to zero."""
    if not r.constant_term().is_zero():
        raise ValueError("argument must have zero constant term")
    if max_terms is None:
        pol = r.policy
        span = 4 * pol.cutoff + sum(2 * x for x in pol.windows if x is not None)
        max_terms = int(4 * span) + 8
    total = MultiSeries.constant(r.policy, coef(0))
    power = MultiSeries.constant(r.policy, 1)
    for k in range(1, max_terms + 1):
        power = power * r
        if power.is_zero():
            return total
        c = coef(k)
        if c:
            total = total + power.scale(c)
    raise ValueError("series is not contractive under the policy (powers do not vanish)")


# --------------------------------------------------------------------------
# polynomial composition and fixed points


Polynomial = Mapping[Tuple[int, ...], Rational]


def compose_poly(p: Polynomial, args: Sequence[MultiSeries]) -> MultiSeries:
    """Evaluate a polynomial {exponent tuple: rational} at the given series."""
    if not args:
        raise ValueError("need at least one argument")
    pol = args[0].policy
    for a in args[1:]:
        pol = pol.meet(a.policy)
    powers: Dict[Tuple[int, int], MultiSeries] = {}

    def pw(i, n):
        key = (i, n)
        if key not in powers:
            powers[key] = MultiSeries.constant(pol, 1) if n == 0 else pw(i, n - 1) * args[i]
        return powers[key]

    total = MultiSeries.zero(pol)
    for e, c in sorted(p.items()):
        if len(e) != len(args):
            raise ValueError("arity mismatch")
        if any(x < 0 for x in e):
            raise ValueError("negative exponent in a polynomial")
        term = MultiSeries.constant(pol, c)
        for i, n in enumerate(e):
            if n:
                term = term * pw(i, n)
        total = total + term
    return total


def solve_fixed_point(monomials: Sequence[Tuple[Rational, Sequence]], S: Callable[[Sequence[MultiSeries]], Sequence[MultiSeries]],
                      policy: TruncationPolicy, max_iter: int | None = None):
    """Solve z_k = m_k * exp(S_k(z)) by iteration.

    ``monomials[k] = (c_k, exponents)`` is a rational times a monomial in the
    target variables; ``S`` maps the current list of series to the list of
    exponents S_k(z), each with zero constant term.  Each pass must raise the
    agreement degree; otherwise a ValueError is raised.
    """
    ms = [MultiSeries.monomial(policy, e, c) for c, e in monomials]
    z = list(ms)
    if max_iter is None:
        span = 4 * policy.cutoff + sum(2 * x for x in policy.windows if x is not None)
        max_iter = int(4 * span) + 8
    for _ in range(max_iter):
        exps = S(z)
        for s in exps:
            if not s.constant_term().is_zero():
                raise ValueError("S_k must have zero constant term")
        new = [m * s.exp() for m, s in zip(ms, exps)]
        if all(a == b for a, b in zip(new, z)):
            return new
        z = new
    raise ValueError("fixed-point iteration did not stabilise (non-contractive system)")


# --------------------------------------------------------------------------
# LogSeries


LogKey = Tuple[int, ...]


class LogSeries:
    """Polynomial of degree <= 2 in L_1..L_n (L_i = log z_i) over MultiSeries."""

    __slots__ = ("policy", "_c")

    def __init__(self, policy: TruncationPolicy, comps: Mapping[LogKey, MultiSeries] | None = None):
        self.policy = policy
        c = {}
        for key, s in (comps or {}).items():
            key = tuple(key)
            if len(key) != policy.arity or sum(key) > 2 or min(key) < 0:
                raise ValueError(f"bad log multidegree {key}")
            if s.arity != policy.arity:
                raise ValueError("arity mismatch")
            s = s if s.policy == policy else s.truncate(policy)
            if not s.is_zero():
                c[key] = s
        self._c = c

    @classmethod
    def from_series(cls, s: MultiSeries):
        return cls(s.policy, {(0,) * s.arity: s})

    @classmethod
    def log_var(cls, policy, i):
        key = [0] * policy.arity
        key[i] = 1
        return cls(policy, {tuple(key): MultiSeries.constant(policy, 1)})

    @property
    def arity(self):
        return self.policy.arity

    def component(self, key) -> MultiSeries:
        return self._c.get(tuple(key), MultiSeries.zero(self.policy))

    def components(self):
        return sorted(self._c.items())

    def log_degree(self):
        return max((sum(k) for k in self._c), default=0)

    def is_zero(self):
        return not self._c

    def _co(self, o):
        if isinstance(o, LogSeries):
            return o
        if isinstance(o, MultiSeries):
            return LogSeries.from_series(o)
        return LogSeries.from_series(MultiSeries.constant(self.policy, o))

    def __add__(self, o):
        o = self._co(o)
        pol = self.policy.meet(o.policy)
        c = dict(self._c)
        for k, s in o._c.items():
            c[k] = c[k] + s if k in c else s
        return LogSeries(pol, c)

    __radd__ = __add__

    def __neg__(self):
        return LogSeries(self.policy, {k: -s for k, s in self._c.items()})

    def __sub__(self, o):
        return self + (-self._co(o))

    def __mul__(self, o):
        if not isinstance(o, (LogSeries, MultiSeries)):
            return LogSeries(self.policy, {k: s.scale(o) for k, s in self._c.items()})
        o = self._co(o)
        pol = self.policy.meet(o.policy)
        c: Dict[LogKey, MultiSeries] = {}
        for ka, sa in self._c.items():
            for kb, sb in o._c.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                if sum(k) > 2:
                    raise ValueError("log degree would exceed 2")
                p = sa * sb
                c[k] = c[k] + p if k in c else p
        return LogSeries(pol, c)

    __rmul__ = __mul__

    def euler(self, i: int) -> "LogSeries":
        """theta_i acting on f * L^key: theta_i(f) L^key + key_i f L^(key - e_i)."""
        c: Dict[LogKey, MultiSeries] = {}
        for k, s in self._c.items():
            d = s.euler(i)
            if not d.is_zero():
                c[k] = c[k] + d if k in c else d
            if k[i]:
                k2 = list(k)
                k2[i] -= 1
                k2 = tuple(k2)
                t = s.scale(k[i])
                c[k2] = c[k2] + t if k2 in c else t
        return LogSeries(self.policy, c)

    def mul_monomial(self, exps, c=1):
        return LogSeries(self.policy, {k: s.mul_monomial(exps, c) for k, s in self._c.items()})

    def truncate(self, policy):
        return LogSeries(policy, {k: s.truncate(policy) for k, s in self._c.items()})

    def substitute_monomials(self, matrix: Sequence[Sequence[int]], policy: TruncationPolicy) -> "LogSeries":
        """Change of coordinates z_j = prod_k w_k^matrix[j][k] (unit coefficients).

        Series parts are substituted; L_j becomes sum_k matrix[j][k] L'_k.
        """
        n = self.arity
        images = [(1, list(matrix[j])) for j in range(n)]
        out = LogSeries(policy, {})
        lin = [LogSeries(policy, {tuple(1 if a == b else 0 for a in range(policy.arity)): MultiSeries.constant(policy, matrix[j][b])
                                  for b in range(policy.arity) if matrix[j][b]}) for j in range(n)]
        for k, s in self._c.items():
            term = LogSeries.from_series(s.substitute_monomials(images, policy))
            for j, p in enumerate(k):
                for _ in range(p):
                    term = term * lin[j]
            out = out + term
        return out

    def __eq__(self, o):
        return (self - self._co(o)).is_zero()

    def __repr__(self):
        parts = []
        for k, s in self.components():
            ln = "*".join(f"L{i + 1}" if p == 1 else f"L{i + 1}^{p}" for i, p in enumerate(k) if p)
            parts.append(f"[{s.format(limit=6)}]" + (f"*{ln}" if ln else ""))
        return "LogSeries(" + " + ".join(parts) + ")" if parts else "LogSeries(0)"


# --------------------------------------------------------------------------
# Lagrange inversion of exponential relations


class ExpRelationInverse:
    """Invert z_k = c_k Q_k exp(S_k(z)) with the Lagrange-Good formula.

    For any series F(z) the coefficient of Q^m in F(z(Q)) is

        c^m [z^m] F(z) exp(sum_k m_k S_k(z)) det(delta_ij - theta_j S_i(z)).

    The policy must describe a finite box of nonnegative exponents (for
    instance weights (1,1,0,0) with windows on the last two variables);
    all series are power series there, so truncation is exact.
    """

    def __init__(self, consts: Sequence[Rational], S: Sequence[MultiSeries], policy: TruncationPolicy,
                 order: Sequence[int] | None = None):
        n = policy.arity
        if len(consts) != n or len(S) != n:
            raise ValueError("one relation per variable")
        self.policy = policy
        self.consts = [as_rational(c) for c in consts]
        self.S = [s.truncate(policy) for s in S]
        for s in self.S:
            if not s.constant_term().is_zero():
                raise ValueError("S_k must have zero constant term")
            if not s.is_rational():
                raise ValueError("S_k must have rational coefficients")
        pk = _packer(n)
        self._pk = pk
        self.top = [self._max_exponent(i) for i in range(n)]
        # variable with the most values goes last (single-coefficient stage)
        self.order = list(order) if order is not None else sorted(range(n), key=lambda i: self.top[i])
        E = [s.exp() for s in self.S]
        self.powers = []
        for i in range(n):
            row = [MultiSeries.constant(policy, 1)]
            for _ in range(self.top[i]):
                row.append(row[-1] * E[i])
            self.powers.append(row)
        # Jacobian determinant
        mat = [[(MultiSeries.constant(policy, 1) if i == j else MultiSeries.zero(policy)) - self.S[i].euler(j)
                for j in range(n)] for i in range(n)]
        self.delta = _det(mat)

    def _max_exponent(self, i):
        pol = self.policy
        w = pol.weights[i]
        bound = pol.cutoff / w if w else pol.windows[i]
        return int(bound)

    def _box(self):
        # all nonnegative integer points admitted by the policy
        n = self.policy.arity
        pts = [()]
        for i in range(n):
            pts = [p + (a,) for p in pts for a in range(self.top[i] + 1)]
        return [p for p in pts if self.policy.admits([4 * x for x in p])]

    def pushforward(self, F: MultiSeries) -> MultiSeries:
        """F(z(Q)) as a series in Q (same policy)."""
        pol = self.policy
        H = F.truncate(pol) * self.delta
        order = self.order
        pts = self._box()
        out_parts: Dict = {}
        pk = self._pk

        def rec(level, acc, fixed):
            i = order[level]
            if level == len(order) - 1:
                for m in pts:
                    if any(m[j] != fixed[j] for j in fixed):
                        continue
                    prod = acc_coefficient(acc, self.powers[i][m[i]], m)
                    if not prod:
                        continue
                    cm = Fraction(1)
                    for c, e in zip(self.consts, m):
                        cm *= Fraction(c) ** e
                    k = pk.pack([4 * x for x in m])
                    for mono, v in prod.items():
                        out_parts.setdefault(mono, {})[k] = v * cm
                return
            for a in range(self.top[i] + 1):
                f2 = dict(fixed)
                f2[i] = a
                if not any(all(m[j] == f2[j] for j in f2) for m in pts):
                    continue
                rec(level + 1, acc * self.powers[i][a], f2)

        rec(0, H, {})
        return MultiSeries._raw(pol, _clean(out_parts))

    def mirror(self):
        """The series z_k(Q)."""
        pol = self.policy
        return [self.pushforward(MultiSeries.var(pol, k)) for k in range(pol.arity)]


def acc_coefficient(A: MultiSeries, B: MultiSeries, m) -> Dict[Tuple[int, int], Rational]:
    """Coefficient of x^m in A*B (as {const monomial: value}); m nonnegative ints."""
    pk = A._pk
    target = pk.pack([4 * x for x in m])
    out: Dict = {}
    for ma, da in A._parts.items():
        for mb, db in B._parts.items():
            mono = (ma[0] + mb[0], ma[1] + mb[1])
            s = 0
            if len(da) < len(db):
                for ka, va in da.items():
                    vb = db.get(target - ka + pk.bias)
                    if vb is not None:
                        s += va * vb
            else:
                for kb, vb in db.items():
                    va = da.get(target - kb + pk.bias)
                    if va is not None:
                        s += va * vb
            if s:
                out[mono] = out.get(mono, 0) + s
    return {k: _norm(v) for k, v in out.items() if v}


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = None
    for j in range(n):
        if mat[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        t = mat[0][j] * _det(minor)
        if j % 2:
            t = -t
        total = t if total is None else total + t
    return total if total is not None else MultiSeries.zero(mat[0][0].policy)
