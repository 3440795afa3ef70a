"""Exact univariate rational functions over Q in a single variable ``t``.

Scalars are :class:`fractions.Fraction`.  A :class:`RatFunc` is kept in a
canonical form (coprime numerator and denominator, monic denominator), so
structural equality is semantic equality.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import DivisionByZeroFunction, PoleAtZero, StarDiverges

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} exactly to a rational")


def _trim(coeffs: list) -> tuple:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Polynomial in ``t`` with rational coefficients, ascending degree."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs=()):
        self.coeffs = _trim([as_fraction(c) for c in coeffs])
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: tuple) -> "Poly":
        # coeffs must already be trimmed Fractions
        p = object.__new__(cls)
        p.coeffs = coeffs
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        c = as_fraction(c)
        return cls._raw((c,) if c else ())

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        c = as_fraction(c)
        return cls._raw((_ZERO,) * k + (c,) if c else ())

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else _ZERO

    def __call__(self, x) -> Fraction:
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly", self.coeffs))
        return self._hash

    def __neg__(self):
        return Poly._raw(tuple(-c for c in self.coeffs))

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly._raw(_trim(out))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(())
        if len(b) == 1:
            s = b[0]
            return Poly._raw(tuple(c * s for c in a))
        if len(a) == 1:
            s = a[0]
            return Poly._raw(tuple(c * s for c in b))
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly._raw(tuple(out))

    def scale(self, s) -> "Poly":
        s = as_fraction(s)
        if not s:
            return Poly._raw(())
        return Poly._raw(tuple(c * s for c in self.coeffs))

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise DivisionByZeroFunction("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) - 1 < db:
            return Poly._raw(()), self
        inv = 1 / other.lead
        bc = other.coeffs
        quot = [_ZERO] * (len(rem) - db)
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db] * inv
            quot[k] = c
            if c:
                for j in range(db + 1):
                    rem[k + j] -= c * bc[j]
        return Poly._raw(_trim(quot)), Poly._raw(_trim(rem[:db]))

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if not self.coeffs or self.coeffs[-1] == 1:
            return self
        return self.scale(1 / self.coeffs[-1])

    def __repr__(self):
        return f"Poly({format_poly(self)})"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd via the Euclidean algorithm (gcd(0, 0) = 0)."""
    a, b = a.monic(), b.monic()
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a


def format_poly(p: Poly, var: str = "t") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(p.coeffs):
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_P_ONE = Poly._raw((_ONE,))
_P_ZERO = Poly._raw(())


class RatFunc:
    """Normalized quotient ``num/den`` of polynomials in ``t``.

    Immutable.  Supports ``+ - * /`` with other RatFuncs and with plain
    rationals/ints, and evaluation at a rational point.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly(num if isinstance(num, (list, tuple)) else [num])
        if den is None:
            den = _P_ONE
        elif not isinstance(den, Poly):
            den = Poly(den if isinstance(den, (list, tuple)) else [den])
        if den.is_zero():
            raise DivisionByZeroFunction("rational function with zero denominator")
        self.num, self.den = _normalize(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFunc":
        f = object.__new__(cls)
        f.num = num
        f.den = den
        f._hash = None
        return f

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls._raw(Poly.const(c), _P_ONE)

    @classmethod
    def var(cls) -> "RatFunc":
        """The indeterminate ``t``."""
        return cls._raw(Poly.monomial(1), _P_ONE)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.coeffs[0] if self.num.coeffs else _ZERO

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == RatFunc.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        return RatFunc.const(as_fraction(x))

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __add__(self, other):
        g = RatFunc._coerce(other)
        if g.num.is_zero():
            return self
        if self.num.is_zero():
            return g
        if self.den == g.den:
            return _make(self.num + g.num, self.den)
        return _make(self.num * g.den + g.num * self.den, self.den * g.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-RatFunc._coerce(other))

    def __rsub__(self, other):
        return RatFunc._coerce(other) - self

    def __mul__(self, other):
        g = RatFunc._coerce(other)
        if self.num.is_zero() or g.num.is_zero():
            return RatFunc._raw(_P_ZERO, _P_ONE)
        if g.den.degree == 0 and g.num.degree == 0:
            return RatFunc._raw(self.num.scale(g.num.coeffs[0]), self.den)
        if self.den.degree == 0 and self.num.degree == 0:
            return RatFunc._raw(g.num.scale(self.num.coeffs[0]), g.den)
        # cross-cancel before multiplying keeps degrees small
        g1 = poly_gcd(self.num, g.den)
        g2 = poly_gcd(g.num, self.den)
        n1, d2 = (self.num // g1, g.den // g1) if g1.degree > 0 else (self.num, g.den)
        n2, d1 = (g.num // g2, self.den // g2) if g2.degree > 0 else (g.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.lead
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return RatFunc._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise DivisionByZeroFunction("division by the zero function")
        lc = self.num.lead
        return RatFunc._raw(self.den.scale(1 / lc), self.num.scale(1 / lc))

    def __truediv__(self, other):
        return self * RatFunc._coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFunc._coerce(other) * self.inverse()

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        d = self.den(x)
        if not d:
            raise DivisionByZeroFunction(f"denominator vanishes at t={x}")
        return self.num(x) / d

    def __str__(self):
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    def __repr__(self):
        return f"RatFunc{self}"


def _normalize(num: Poly, den: Poly):
    if num.is_zero():
        return _P_ZERO, _P_ONE
    if num.degree > 0 and den.degree > 0:
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
    lc = den.lead
    if lc != 1:
        inv = 1 / lc
        num, den = num.scale(inv), den.scale(inv)
    return num, den


def _make(num: Poly, den: Poly) -> RatFunc:
    n, d = _normalize(num, den)
    return RatFunc._raw(n, d)


def rf_arith(op: str, f, g) -> RatFunc:
    """Field operation ``op`` in {add, sub, mul, div} on rational functions."""
    f, g = RatFunc._coerce(f), RatFunc._coerce(g)
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown operation {op!r}")


def rf_star(f) -> RatFunc:
    """Geometric series ``1 / (1 - f)``."""
    f = RatFunc._coerce(f)
    one_minus = RatFunc.const(1) - f
    if one_minus.is_zero():
        raise StarDiverges(f"star of {f} diverges: 1 - f is identically zero")
    return one_minus.inverse()


def rf_limit_at_zero(f) -> Fraction:
    """``num(0)/den(0)`` of the canonical form, i.e. the limit as t -> 0."""
    f = RatFunc._coerce(f)
    d0 = f.den.coeffs[0] if f.den.coeffs else _ZERO
    if not d0:
        raise PoleAtZero(f"{f} has a pole at t = 0")
    n0 = f.num.coeffs[0] if f.num.coeffs else _ZERO
    return n0 / d0


def star(x):
    """``1/(1-x)`` for either a Fraction or a RatFunc."""
    if isinstance(x, RatFunc):
        return rf_star(x)
    x = as_fraction(x)
    if x == 1:
        raise StarDiverges("star of 1 diverges")
    return 1 / (1 - x)


def format_value(x) -> str:
    """Render a Fraction as ``p/q`` (always with a slash) or a RatFunc."""
    if isinstance(x, RatFunc):
        return str(x)
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"
