"""
Exact arithmetic: rationals, multivariate polynomials over a fixed set of
named variables, and truncated power series with a pluggable coefficient ring.

Nothing in here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Mapping, Sequence

Rational = Fraction

#: x = L^2, y = L.K_S, z = K_S^2, t = c_2(S); g is an auxiliary genus symbol.
VARIABLES = ("x", "y", "z", "t", "g")
NVARS = len(VARIABLES)
_INDEX = {name: i for i, name in enumerate(VARIABLES)}


class UsageError(ValueError):
    """Operands do not satisfy the preconditions of an operation."""


class SingularInputError(ZeroDivisionError):
    """A series or polynomial that had to be inverted is not a unit."""


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected an exact scalar, got {type(c).__name__}")


class MultiPoly:
    """
    Polynomial in x, y, z, t, g with Fraction coefficients.

    Stored as a dict from exponent 5-tuples to nonzero coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean = {}
        if terms:
            for exps, c in terms.items():
                c = _as_fraction(c)
                if c:
                    exps = tuple(exps)
                    if len(exps) != NVARS or any(e < 0 for e in exps):
                        raise UsageError(f"bad exponent vector {exps}")
                    clean[exps] = c
        self._terms = clean
        self._hash = None

    # constructors

    @classmethod
    def constant(cls, c) -> MultiPoly:
        return cls({(0,) * NVARS: c})

    @classmethod
    def var(cls, name: str) -> MultiPoly:
        exps = [0] * NVARS
        exps[_INDEX[name]] = 1
        return cls({tuple(exps): 1})

    @classmethod
    def coerce(cls, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            return other
        return cls.constant(_as_fraction(other))

    # queries

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, name: str) -> int:
        i = _INDEX[name]
        return max((e[i] for e in self._terms), default=-1)

    def variables(self) -> set:
        return {VARIABLES[i] for e in self._terms for i in range(NVARS) if e[i]}

    def coeff(self, monomial: Mapping[str, int] | Sequence[int] | None = None) -> Fraction:
        """Coefficient of a monomial given as {'t': 2} or as an exponent vector."""
        if monomial is None:
            exps = (0,) * NVARS
        elif isinstance(monomial, Mapping):
            e = [0] * NVARS
            for name, k in monomial.items():
                e[_INDEX[name]] = k
            exps = tuple(e)
        else:
            exps = tuple(monomial) + (0,) * (NVARS - len(monomial))
        return self._terms.get(exps, Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise UsageError(f"{self} is not a constant")
        return self._terms.get((0,) * NVARS, Fraction(0))

    # arithmetic

    def __add__(self, other):
        other = MultiPoly.coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-MultiPoly.coerce(other))

    def __rsub__(self, other):
        return MultiPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = _as_fraction(other)
            return MultiPoly({e: v * c for e, v in self._terms.items()})
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _as_fraction(other) if not isinstance(other, MultiPoly) else other.constant_value()
        if not c:
            raise SingularInputError("division by zero")
        return self * (1 / c)

    def __pow__(self, n: int):
        if n < 0:
            raise UsageError("negative power of a polynomial")
        result = MultiPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # substitution / evaluation

    def subs(self, **values) -> MultiPoly:
        """Substitute polynomials (or scalars) for named variables."""
        idx = {_INDEX[k]: MultiPoly.coerce(v) for k, v in values.items()}
        powers: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = idx[i] ** k
            return powers[key]

        out = MultiPoly()
        for e, c in self._terms.items():
            kept = tuple(0 if i in idx else e[i] for i in range(NVARS))
            term = MultiPoly({kept: c})
            for i in idx:
                if e[i]:
                    term = term * power(i, e[i])
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, object]) -> Fraction:
        """Evaluate at exact values for every variable that occurs."""
        total = Fraction(0)
        vals = [None] * NVARS
        for k, v in values.items():
            vals[_INDEX[k]] = _as_fraction(v)
        for e, c in self._terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    if vals[i] is None:
                        raise UsageError(f"no value for {VARIABLES[i]}")
                    term *= vals[i] ** k
            total += term
        return total

    # presentation

    def sorted_terms(self) -> list:
        """Terms ordered by descending total degree, then descending lex."""
        return sorted(self._terms.items(), key=lambda it: (-sum(it[0]), tuple(-a for a in it[0])))

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                VARIABLES[i] if k == 1 else f"{VARIABLES[i]}^{k}"
                for i, k in enumerate(exps) if k
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MultiPoly({self})"


X = MultiPoly.var("x")
Y = MultiPoly.var("y")
Z = MultiPoly.var("z")
T = MultiPoly.var("t")
G = MultiPoly.var("g")


def ring_inverse(c):
    """Inverse of a unit of the coefficient ring (Fraction, int or constant MultiPoly)."""
    if isinstance(c, MultiPoly):
        if not c.is_constant() or c.is_zero():
            raise SingularInputError(f"{c} is not a unit")
        return Fraction(1) / c.constant_value()
    c = _as_fraction(c)
    if not c:
        raise SingularInputError("zero is not a unit")
    return 1 / c


def _is_zero(c) -> bool:
    if isinstance(c, MultiPoly):
        return c.is_zero()
    return c == 0


class TruncSeries:
    """
    Power series in one formal variable, truncated after ``order``.

    Coefficients may come from any exact commutative ring whose elements
    support ``+``, ``-``, ``*`` with each other and with ints (Fraction,
    MultiPoly, ...).
    """

    __slots__ = ("var", "order", "coeffs")

    def __init__(self, coeffs: Iterable, order: int, var: str = "q"):
        if order < 0:
            raise UsageError("order must be non-negative")
        cs = list(coeffs)[: order + 1]
        cs += [0] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.order = order
        self.var = var

    @classmethod
    def one(cls, order: int, var: str = "q") -> TruncSeries:
        return cls([1], order, var)

    @classmethod
    def gen(cls, order: int, var: str = "q") -> TruncSeries:
        return cls([0, 1], order, var)

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k <= self.order else 0

    def __len__(self):
        return self.order + 1

    def _check(self, other: TruncSeries):
        if not isinstance(other, TruncSeries):
            raise UsageError("expected a TruncSeries")
        if other.var != self.var or other.order != self.order:
            raise UsageError(
                f"mismatched series: {self.var}/O({self.order}) vs {other.var}/O({other.order})"
            )

    def _like(self, coeffs) -> TruncSeries:
        return TruncSeries(coeffs, self.order, self.var)

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return self._like([self.coeffs[0] + other, *self.coeffs[1:]])
        self._check(other)
        return self._like(a + b for a, b in zip(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return self._like(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self._like(a * other for a in self.coeffs)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return series_invert(self) ** (-n)
        result = TruncSeries.one(self.order, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.var == other.var
            and self.order == other.order
            and all(_is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.var, self.order))

    def map(self, fn: Callable) -> TruncSeries:
        return self._like(fn(c) for c in self.coeffs)

    def truncate(self, order: int) -> TruncSeries:
        return TruncSeries(self.coeffs, order, self.var)

    def __repr__(self):
        body = " + ".join(f"({c})*{self.var}^{k}" for k, c in enumerate(self.coeffs) if not _is_zero(c))
        return f"TruncSeries({body or 0} + O({self.var}^{self.order + 1}))"


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Cauchy product, truncated at the common order."""
    a._check(b)
    n = a.order
    out = []
    for k in range(n + 1):
        acc = 0
        for i in range(k + 1):
            ai, bj = a.coeffs[i], b.coeffs[k - i]
            if _is_zero(ai) or _is_zero(bj):
                continue
            acc = acc + ai * bj
        out.append(acc)
    return a._like(out)


def series_invert(a: TruncSeries) -> TruncSeries:
    """Multiplicative inverse; the constant term must be a unit."""
    inv0 = ring_inverse(a.coeffs[0])
    out = [inv0]
    for k in range(1, a.order + 1):
        acc = 0
        for i in range(1, k + 1):
            if not _is_zero(a.coeffs[i]):
                acc = acc + a.coeffs[i] * out[k - i]
        out.append(-(acc * inv0))
    return a._like(out)


def series_compose(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """a(b(q)); requires b(0) = 0."""
    a._check(b)
    if not _is_zero(b.coeffs[0]):
        raise UsageError("inner series must have zero constant term")
    result = a._like([a.coeffs[a.order]])
    for k in range(a.order - 1, -1, -1):
        result = result * b + a.coeffs[k]
    return result


def series_reversion(a: TruncSeries) -> TruncSeries:
    """Compositional inverse r with a(r(q)) = q mod q^(N+1)."""
    if not _is_zero(a.coeffs[0]):
        raise UsageError("reversion needs zero constant term")
    if a.order == 0:
        return a._like([0])
    try:
        inv1 = ring_inverse(a.coeffs[1])
    except SingularInputError as exc:
        raise UsageError("reversion needs a unit linear coefficient") from exc
    r = a._like([0, inv1])
    # fix one coefficient per pass: a(r + c q^k) = a(r) + a_1 c q^k + O(q^{k+1})
    for k in range(2, a.order + 1):
        err = series_compose(a, r).coeffs[k]
        cs = list(r.coeffs)
        cs[k] = -(err * inv1)
        r = a._like(cs)
    return r


def series_derivative(a: TruncSeries) -> TruncSeries:
    return a._like([a.coeffs[k] * k for k in range(1, a.order + 1)])


def series_integral(a: TruncSeries) -> TruncSeries:
    """Antiderivative with zero constant term; the top coefficient is dropped."""
    return a._like([0] + [a.coeffs[k] * Fraction(1, k + 1) for k in range(a.order)])


def series_log(a: TruncSeries) -> TruncSeries:
    """log(a) for a series with constant term 1."""
    if _is_zero(a.coeffs[0] - 1):
        return series_integral(series_derivative(a) * series_invert(a))
    raise UsageError("log needs constant term 1")


def series_exp(a: TruncSeries) -> TruncSeries:
    """exp(a) for a series with zero constant term, via b' = a' b."""
    if not _is_zero(a.coeffs[0]):
        raise UsageError("exp needs zero constant term")
    out = [1]
    for n in range(1, a.order + 1):
        acc = 0
        for k in range(1, n + 1):
            if not _is_zero(a.coeffs[k]):
                acc = acc + a.coeffs[k] * k * out[n - k]
        out.append(acc * Fraction(1, n))
    return a._like(out)


def binom_symbolic(a, b, order: int, var: str = "q") -> TruncSeries:
    """
    (1 - q)^(a*g + b) with g symbolic, as a series whose coefficients are
    MultiPolys in g. ``a`` and ``b`` are exact scalars.

    Computed as exp((a*g + b) * log(1 - q)).
    """
    exponent = G * a + b
    log1mq = TruncSeries([0] + [Fraction(-1, k) for k in range(1, order + 1)], order, var)
    return series_exp(log1mq.map(lambda c: exponent * c)).map(MultiPoly.coerce)


def binom_int(n: int, order: int, var: str = "q") -> TruncSeries:
    """(1 - q)^n for an integer n, by the binomial theorem."""
    if n >= 0:
        cs = [(-1) ** k * comb(n, k) for k in range(order + 1)]
    else:
        cs = [comb(-n + k - 1, k) for k in range(order + 1)]
    return TruncSeries(cs, order, var)
