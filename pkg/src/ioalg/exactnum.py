"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored as an integer coordinate vector over a common positive
denominator, in the power basis 1, z, ..., z^(phi(N)-1), reduced modulo the
N-th cyclotomic polynomial.  The representation is canonical, so equality is
coordinate-wise.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache, reduce

from ioalg.kernel import poly_mulmod


class IncompatibleOrderError(ValueError):
    """Operands live in cyclotomic fields of different orders."""


class OrderInsufficientError(ValueError):
    """A requested root of unity or phase does not lie in Q(zeta_N)."""


class CycloParseError(ValueError):
    """Malformed textual cyclotomic number."""


# ---------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + dn]
        out[k] = c
        if c:
            for t in range(dn + 1):
                num[k + t] -= c * den[t]
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (lowest degree first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of z^e for 0 <= e < max(n, 2*phi-1) modulo Phi_n."""
    phi = cyclotomic_poly(n)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(max(n, 2 * d - 1)):
        rows.append(tuple(cur))
        # multiply by z
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for t in range(d):
                cur[t] -= top * phi[t]
    return tuple(rows)


@lru_cache(maxsize=None)
def _reduction_rows(n: int) -> list[list[int]]:
    d = euler_phi(n)
    table = _power_table(n)
    return [list(table[d + k]) for k in range(max(d - 1, 0))]


# ---------------------------------------------------------------------------


def _normalize(den: int, nums: list[int]) -> tuple[int, tuple[int, ...]]:
    g = reduce(math.gcd, nums, den)
    if g != 1:
        den //= g
        nums = [c // g for c in nums]
    if not any(nums):
        return 1, tuple(nums)
    return den, tuple(nums)


class CycloNumber:
    """Element of Q(zeta_N) in canonical power-basis coordinates."""

    __slots__ = ("order", "_den", "_nums", "_hash")

    def __init__(self, order: int, coeffs=None):
        if order < 1:
            raise ValueError("order must be positive")
        d = euler_phi(order)
        if coeffs is None:
            coeffs = [0] * d
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) != d:
            raise ValueError(f"expected {d} coordinates for order {order}")
        den = reduce(math.lcm, (c.denominator for c in coeffs), 1)
        nums = [c.numerator * (den // c.denominator) for c in coeffs]
        self.order = order
        self._den, self._nums = _normalize(den, nums)
        self._hash = None

    @classmethod
    def _raw(cls, order: int, den: int, nums) -> "CycloNumber":
        obj = cls.__new__(cls)
        obj.order = order
        obj._den, obj._nums = _normalize(den, list(nums))
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, value, order: int = 1) -> "CycloNumber":
        value = Fraction(value)
        d = euler_phi(order)
        return cls._raw(order, value.denominator, [value.numerator] + [0] * (d - 1))

    @classmethod
    def zero(cls, order: int) -> "CycloNumber":
        return cls._raw(order, 1, [0] * euler_phi(order))

    @classmethod
    def one(cls, order: int) -> "CycloNumber":
        return cls.rational(1, order)

    # -- views -------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._nums)

    def is_zero(self) -> bool:
        return not any(self._nums)

    def __bool__(self) -> bool:
        return any(self._nums)

    def is_rational(self) -> bool:
        return not any(self._nums[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return Fraction(self._nums[0], self._den)

    # -- coercion ------------------------------------------------------------
    def _coerce(self, other) -> "CycloNumber":
        if isinstance(other, CycloNumber):
            if other.order != self.order:
                raise IncompatibleOrderError(
                    f"cyclotomic orders differ: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNumber.rational(other, self.order)
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = math.lcm(self._den, o._den)
        fa, fb = den // self._den, den // o._den
        return CycloNumber._raw(self.order, den,
                                [a * fa + b * fb for a, b in zip(self._nums, o._nums)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber._raw(self.order, self._den, [-a for a in self._nums])

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CycloNumber._raw(self.order, self._den * other.denominator,
                                    [a * other.numerator for a in self._nums])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if len(self._nums) == 1:
            nums = [self._nums[0] * o._nums[0]]
        else:
            nums = poly_mulmod(list(self._nums), list(o._nums), _reduction_rows(self.order))
        return CycloNumber._raw(self.order, self._den * o._den, nums)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycloNumber.rational(1 / self.to_fraction(), self.order)
        # a * prod(sigma(a)) over non-trivial Galois conjugates is rational
        conj = CycloNumber.one(self.order)
        for k in range(2, self.order):
            if math.gcd(k, self.order) == 1:
                conj = conj * self.galois(k)
        norm = (self * conj).to_fraction()
        return conj * (1 / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = CycloNumber.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, k: int) -> "CycloNumber":
        """Image under the automorphism z -> z^k (gcd(k, N) = 1)."""
        n = self.order
        table = _power_table(n)
        d = len(self._nums)
        out = [0] * d
        for i, c in enumerate(self._nums):
            if c:
                row = table[(i * k) % n]
                for t in range(d):
                    if row[t]:
                        out[t] += c * row[t]
        return CycloNumber._raw(n, self._den, out)

    def conjugate(self) -> "CycloNumber":
        return self.galois(self.order - 1) if self.order > 2 else self

    def embed(self, order: int) -> "CycloNumber":
        """Image of this element in Q(zeta_M) for a multiple M of the order."""
        if order == self.order:
            return self
        if order % self.order:
            raise IncompatibleOrderError(f"order {self.order} does not divide {order}")
        step = order // self.order
        table = _power_table(order)
        d = euler_phi(order)
        out = [0] * d
        for i, c in enumerate(self._nums):
            if c:
                row = table[(i * step) % order]
                for t in range(d):
                    if row[t]:
                        out[t] += c * row[t]
        return CycloNumber._raw(order, self._den, out)

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self._nums[0], self._den) == other
        if not isinstance(other, CycloNumber):
            return NotImplemented
        return (self.order == other.order and self._den == other._den
                and self._nums == other._nums)

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self._nums[0], self._den))
            else:
                self._hash = hash((self.order, self._den, self._nums))
        return self._hash

    def __repr__(self):
        return f"CycloNumber({self.order}, {format_cyclo(self)!r})"

    def __str__(self):
        return format_cyclo(self)


# ---------------------------------------------------------------------------
# constructors


def root_of_unity(k: int, n: int, order: int | None = None) -> CycloNumber:
    """zeta_n^k as an element of Q(zeta_order) (default order = n)."""
    if n < 1:
        raise ValueError("root order must be positive")
    amb = n if order is None else order
    if amb % n:
        raise IncompatibleOrderError(f"zeta_{n} does not lie in Q(zeta_{amb})")
    e = (k * (amb // n)) % amb
    return CycloNumber._raw(amb, 1, _power_table(amb)[e])


def phase(q, order: int) -> CycloNumber:
    """e^{pi i q} for rational q, as an element of Q(zeta_order)."""
    q = Fraction(q)
    t = q * order / 2
    if t.denominator == 1:
        return root_of_unity(int(t), order)
    a, b = q.numerator, q.denominator
    if b % 2 and order % b == 0:
        # a odd, b odd: e^{pi i a/b} = -zeta_b^{(a+b)/2}
        return -root_of_unity((a + b) // 2, b, order)
    raise OrderInsufficientError(f"e^(pi i {q}) is not in Q(zeta_{order})")


def phase_order(q) -> int:
    """Smallest N with e^{pi i q} in Q(zeta_N)."""
    b = Fraction(q).denominator
    return b if b % 2 else 2 * b


def field_add(a: CycloNumber, b: CycloNumber) -> CycloNumber:
    return a + b


def field_mul(a: CycloNumber, b: CycloNumber) -> CycloNumber:
    return a * b


def field_inv(a: CycloNumber) -> CycloNumber:
    return a.inverse()


def field_eq(a: CycloNumber, b: CycloNumber) -> bool:
    if isinstance(a, CycloNumber) and isinstance(b, CycloNumber) and a.order != b.order:
        raise IncompatibleOrderError(f"cyclotomic orders differ: {a.order} vs {b.order}")
    return a == b


def as_cyclo(value, order: int) -> CycloNumber:
    """Coerce an int, Fraction or CycloNumber into Q(zeta_order)."""
    if isinstance(value, CycloNumber):
        return value.embed(order) if value.order != order else value
    return CycloNumber.rational(value, order)


# ---------------------------------------------------------------------------
# textual form:  a/b,  z(k,N),  + - * and parentheses

_TOKEN = re.compile(r"\s*(?:(z\(\s*-?\d+\s*,\s*\d+\s*\))|(\d+(?:/\d+)?)|([-+*()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise CycloParseError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        if m.group(1):
            k, n = m.group(1)[2:-1].split(",")
            out.append(("z", int(k), int(n)))
        elif m.group(2):
            out.append(("q", Fraction(m.group(2))))
        else:
            out.append(("op", m.group(3)))
        pos = m.end()
    return out


def cyclo_orders(text: str) -> list[int]:
    """Orders M of every z(k,M) token in a textual number."""
    return [t[2] for t in _tokenize(text) if t[0] == "z"]


def parse_cyclo(text: str, order: int | None = None) -> CycloNumber:
    """Parse the textual syntax; the order defaults to the lcm of z(.,M) orders."""
    tokens = _tokenize(text)
    if not tokens:
        raise CycloParseError("empty number")
    if order is None:
        order = reduce(math.lcm, (t[2] for t in tokens if t[0] == "z"), 1)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = factor()
        while peek() == ("op", "*"):
            take()
            val = val * factor()
        return val

    def factor():
        tok = take()
        if tok is None:
            raise CycloParseError("unexpected end of number")
        if tok == ("op", "-"):
            return -factor()
        if tok == ("op", "+"):
            return factor()
        if tok == ("op", "("):
            val = expr()
            if take() != ("op", ")"):
                raise CycloParseError("missing ')'")
            return val
        if tok[0] == "q":
            return CycloNumber.rational(tok[1], order)
        if tok[0] == "z":
            if tok[2] < 1:
                raise CycloParseError("root order must be positive")
            return root_of_unity(tok[1], tok[2], order)
        raise CycloParseError(f"unexpected token {tok!r}")

    value = expr()
    if pos != len(tokens):
        raise CycloParseError(f"trailing input in {text!r}")
    return value


def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_cyclo(c: CycloNumber) -> str:
    """Canonical text: power-basis terms, lowest power first."""
    parts = []
    for k, coef in enumerate(c.coeffs):
        if not coef:
            continue
        mag = abs(coef)
        if k == 0:
            body = _format_rational(mag)
        elif mag == 1:
            body = f"z({k},{c.order})"
        else:
            body = f"{_format_rational(mag)}*z({k},{c.order})"
        sign = "-" if coef < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text
