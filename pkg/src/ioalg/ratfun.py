"""Exact rational functions in x1, x2 with (x1 - x2) inverted, times a
rational-exponent prefactor, together with the three expansion maps.

A LaurentRational is  x1^p x2^q (x1-x2)^s * g(x1, x2) / (x1-x2)^u  with
p, q, s in [0, 1), g a Laurent polynomial and u >= 0 minimal (g not
divisible by x1 - x2 when u > 0).  Equal functions have equal canonical data.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from ioalg.exactnum import CycloNumber, parse_cyclo, phase
from ioalg.exactnum import phase_order as _phase_order
from ioalg.series import INF, FormalSeries, SeriesError, Window, binom_row, frac


class NotInSpanError(ValueError):
    """A function is not in the span of the supplied basis at its coset triple."""


class RatParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Laurent polynomials in x1, x2 as {(i, j): coeff}


def _padd(a: dict, b: dict, sign=1) -> dict:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, 0) + (c if sign == 1 else -c)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pmul(a: dict, b: dict) -> dict:
    out = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            v = out.get(k, 0) + c1 * c2
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def _pshift(a: dict, di: int, dj: int) -> dict:
    return {(i + di, j + dj): c for (i, j), c in a.items()}


def _diff_power(k: int) -> dict:
    """(x1 - x2)^k for k >= 0."""
    out = {}
    for m, c in enumerate(binom_row(k, k + 1)):
        out[(k - m, m)] = c * (-1) ** m
    return out


def _divide_diff(g: dict):
    """g / (x1 - x2) when exact, else None."""
    by_deg = {}
    for (i, j), c in g.items():
        by_deg.setdefault(i + j, {})[i] = c
    out = {}
    for d, comp in by_deg.items():
        imin, imax = min(comp), max(comp)
        running = 0
        for i in range(imax, imin, -1):
            running = comp.get(i, 0) + running
            if running:
                out[(i - 1, d - i)] = running
        if comp.get(imin, 0) + running:
            return None
    return out


class LaurentRational:
    __slots__ = ("prefactor", "num", "u")

    def __init__(self, num=None, u: int = 0, prefactor=(0, 0, 0)):
        p, q, s = (Fraction(x) for x in prefactor)
        num = {(int(i), int(j)): c for (i, j), c in (num or {}).items() if c}
        ip, iq, is_ = math.floor(p), math.floor(q), math.floor(s)
        p, q, s = p - ip, q - iq, s - is_
        num = _pshift(num, ip, iq)
        u = u - is_
        if u < 0:
            num = _pmul(num, _diff_power(-u))
            u = 0
        while u > 0 and num:
            quot = _divide_diff(num)
            if quot is None:
                break
            num, u = quot, u - 1
        if not num:
            p = q = s = Fraction(0)
            u = 0
        self.prefactor = (p, q, s)
        self.num = num
        self.u = u

    @classmethod
    def monomial(cls, a=0, b=0, c=0, coeff=1) -> "LaurentRational":
        """coeff * x1^a x2^b (x1 - x2)^c."""
        return cls({(0, 0): coeff}, 0, (a, b, c))

    @classmethod
    def gbasis(cls, a, b, c) -> "LaurentRational":
        """x1^a x2^b (1 - x2/x1)^c."""
        return cls.monomial(Fraction(a) - Fraction(c), b, c)

    def is_zero(self) -> bool:
        return not self.num

    def coset(self) -> tuple:
        return self.prefactor

    def degrees(self) -> set:
        p, q, s = self.prefactor
        return {p + q + s - self.u + i + j for (i, j) in self.num}

    # -- arithmetic ----------------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, LaurentRational):
            return LaurentRational({k: c * other for k, c in self.num.items()}, self.u,
                                   self.prefactor)
        p = tuple(a + b for a, b in zip(self.prefactor, other.prefactor))
        return LaurentRational(_pmul(self.num, other.num), self.u + other.u, p)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, LaurentRational):
            other = LaurentRational({(0, 0): other})
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.prefactor != other.prefactor:
            raise ValueError("cannot add functions with different coset triples")
        u = max(self.u, other.u)
        a = _pmul(self.num, _diff_power(u - self.u))
        b = _pmul(other.num, _diff_power(u - other.u))
        return LaurentRational(_padd(a, b), u, self.prefactor)

    __radd__ = __add__

    def __neg__(self):
        return LaurentRational({k: -c for k, c in self.num.items()}, self.u, self.prefactor)

    def __sub__(self, other):
        return self + (-other)

    def inverse(self) -> "LaurentRational":
        """Inverse of a single-term function c x1^i x2^j times prefactor over (x1-x2)^u."""
        if len(self.num) != 1:
            raise ValueError("only single-term functions are invertible here")
        (i, j), c = next(iter(self.num.items()))
        p, q, s = self.prefactor
        inv = c.inverse() if isinstance(c, CycloNumber) else 1 / Fraction(c)
        return LaurentRational({(-i, -j): inv}, 0, (-p, -q, self.u - s))

    def __truediv__(self, other):
        if isinstance(other, LaurentRational):
            return self * other.inverse()
        inv = other.inverse() if isinstance(other, CycloNumber) else 1 / Fraction(other)
        return self * inv

    def __eq__(self, other):
        if not isinstance(other, LaurentRational):
            return NotImplemented
        return rat_equal(self, other)

    def __hash__(self):
        return hash((self.prefactor, self.u, frozenset(self.num)))

    def __repr__(self):
        return f"LaurentRational({format_rat(self)!r})"

    def __str__(self):
        return format_rat(self)


def rat_equal(f: LaurentRational, g: LaurentRational) -> bool:
    if f.prefactor != g.prefactor or f.u != g.u or set(f.num) != set(g.num):
        return False
    return all(f.num[k] == g.num[k] for k in f.num)


# ---------------------------------------------------------------------------
# expansions


def _terms_with_exponent(f: LaurentRational):
    p, q, s = f.prefactor
    e = s - f.u
    for (i, j), c in f.num.items():
        yield p + i, q + j, e, c


def _is_poly_power(e: Fraction) -> bool:
    return e.denominator == 1 and e >= 0


def iota12(f: LaurentRational, window: Window, variables=("x1", "x2")) -> FormalSeries:
    """Expand in nonnegative powers of x2/x1."""
    v1, v2 = variables
    lo1, hi1 = window.get(v1)
    lo2, hi2 = window.get(v2)
    terms = {}
    for b1, b2, e, c in _terms_with_exponent(f):
        m_hi = min(hi2 - b2, b1 + e - lo1)
        if _is_poly_power(e):
            m_hi = min(m_hi, e)
        if m_hi == INF:
            raise SeriesError("iota12 window is unbounded")
        m_lo = max(0, math.ceil(lo2 - b2) if lo2 != -INF else 0,
                   math.ceil(b1 + e - hi1) if hi1 != INF else 0)
        if m_hi < m_lo:
            continue
        row = binom_row(e, math.floor(m_hi) + 1)
        for m in range(m_lo, math.floor(m_hi) + 1):
            if row[m]:
                key = (b1 + e - m, b2 + m)
                val = terms.get(key, 0) + c * row[m] * (-1) ** m
                if val:
                    terms[key] = val
                else:
                    terms.pop(key, None)
    p, q, s = f.prefactor
    if f.num:
        e = s - f.u
        sup1 = (-INF, p + max(i for i, _ in f.num) + e)
        if _is_poly_power(e):
            sup1 = (p + min(i for i, _ in f.num), sup1[1])
        sup2 = (q + min(j for _, j in f.num), INF)
    else:
        sup1 = sup2 = (0, 0)
    return FormalSeries((v1, v2), terms, {v1: {p + s}, v2: {q}}, window.restrict((v1, v2)),
                        {v1: sup1, v2: sup2}, f.degrees() or {0})


def branch_phase(e: Fraction, half_turns: int = -1, order: int | None = None):
    """Phase e^{half_turns * pi i * e} relating (x1-x2)^e and (x2-x1)^e."""
    e = Fraction(e)
    if e.denominator == 1:
        return (-1) ** (int(e) % 2)
    if order is None:
        order = _phase_order(half_turns * e)
    return phase(half_turns * e, order)


def iota21(f: LaurentRational, window: Window, variables=("x1", "x2"), half_turns: int = -1,
           order: int | None = None) -> FormalSeries:
    """Expand in nonnegative powers of x1/x2.

    A fractional power is continued by (x1-x2)^e = e^{half_turns pi i e} (x2-x1)^e;
    the default half_turns = -1 matches the Omega_{-1} convention.
    """
    v1, v2 = variables
    lo1, hi1 = window.get(v1)
    lo2, hi2 = window.get(v2)
    if order is None:
        orders = {c.order for c in f.num.values() if isinstance(c, CycloNumber)}
        order = max(orders) if orders else None
    terms = {}
    for b1, b2, e, c in _terms_with_exponent(f):
        m_hi = min(hi1 - b1, b2 + e - lo2)
        if _is_poly_power(e):
            m_hi = min(m_hi, e)
        if m_hi == INF:
            raise SeriesError("iota21 window is unbounded")
        m_lo = max(0, math.ceil(lo1 - b1) if lo1 != -INF else 0,
                   math.ceil(b2 + e - hi2) if hi2 != INF else 0)
        if m_hi < m_lo:
            continue
        ph = branch_phase(e, half_turns, order) if e.denominator != 1 else 1
        sign = 1 if e.denominator != 1 else (-1) ** (int(e) % 2)
        row = binom_row(e, math.floor(m_hi) + 1)
        for m in range(m_lo, math.floor(m_hi) + 1):
            if row[m]:
                key = (b1 + m, b2 + e - m)
                val = terms.get(key, 0) + c * ph * (row[m] * sign * (-1) ** m)
                if val:
                    terms[key] = val
                else:
                    terms.pop(key, None)
    p, q, s = f.prefactor
    if f.num:
        e = s - f.u
        sup2 = (-INF, q + max(j for _, j in f.num) + e)
        if _is_poly_power(e):
            sup2 = (q + min(j for _, j in f.num), sup2[1])
        sup1 = (p + min(i for i, _ in f.num), INF)
    else:
        sup1 = sup2 = (0, 0)
    return FormalSeries((v1, v2), terms, {v1: {p}, v2: {q + s}}, window.restrict((v1, v2)),
                        {v1: sup1, v2: sup2}, f.degrees() or {0})


def iota20(f: LaurentRational, window: Window, variables=("x0", "x2")) -> FormalSeries:
    """Substitute x1 = x2 + x0 and expand in nonnegative powers of x0/x2."""
    v0, v2 = variables
    lo0, hi0 = window.get(v0)
    lo2, hi2 = window.get(v2)
    terms = {}
    for b1, b2, e, c in _terms_with_exponent(f):
        # (x2 + x0)^b1 x2^b2 x0^e
        m_hi = min(hi0 - e, b1 + b2 - lo2)
        if _is_poly_power(b1):
            m_hi = min(m_hi, b1)
        if m_hi == INF:
            raise SeriesError("iota20 window is unbounded")
        m_lo = max(0, math.ceil(lo0 - e) if lo0 != -INF else 0,
                   math.ceil(b1 + b2 - hi2) if hi2 != INF else 0)
        if m_hi < m_lo:
            continue
        row = binom_row(b1, math.floor(m_hi) + 1)
        for m in range(m_lo, math.floor(m_hi) + 1):
            if row[m]:
                key = (e + m, b1 + b2 - m)
                val = terms.get(key, 0) + c * row[m]
                if val:
                    terms[key] = val
                else:
                    terms.pop(key, None)
    p, q, s = f.prefactor
    if f.num:
        sup0 = (s - f.u, INF)
        sup2 = (-INF, p + q + max(i + j for i, j in f.num))
    else:
        sup0 = sup2 = (0, 0)
    return FormalSeries((v0, v2), terms, {v0: {s}, v2: {p + q}}, window.restrict((v0, v2)),
                        {v0: sup0, v2: sup2}, f.degrees() or {0})


# ---------------------------------------------------------------------------
# G-basis


class GBasisElement:
    """Label plus exponent triple (a, b, c) for x1^a x2^b (1 - x2/x1)^c."""

    __slots__ = ("label", "a", "b", "c")

    def __init__(self, label, a, b, c):
        self.label = label
        self.a, self.b, self.c = Fraction(a), Fraction(b), Fraction(c)

    def function(self) -> LaurentRational:
        return LaurentRational.gbasis(self.a, self.b, self.c)

    def coset(self) -> tuple:
        return (frac(self.a - self.c), frac(self.b), frac(self.c))

    def __eq__(self, other):
        return (isinstance(other, GBasisElement) and self.label == other.label
                and (self.a, self.b, self.c) == (other.a, other.b, other.c))

    def __hash__(self):
        return hash((self.label, self.a, self.b, self.c))

    def __repr__(self):
        return f"GBasisElement({self.label!r}, {self.a}, {self.b}, {self.c})"


def decompose_in_gbasis(f, basis) -> dict:
    """Coefficients F_alpha (integer-exponent functions) with f = sum F_alpha f_alpha.

    ``f`` is a LaurentRational or an iterable of them (a sum over coset triples).
    """
    parts = [f] if isinstance(f, LaurentRational) else list(f)
    by_coset = {}
    for el in basis:
        by_coset.setdefault(el.coset(), []).append(el)
    out = {}
    for part in parts:
        if part.is_zero():
            continue
        cands = by_coset.get(part.coset(), [])
        if not cands:
            raise NotInSpanError(f"no basis element with coset triple {part.coset()}")
        if len(cands) > 1:
            raise NotInSpanError(
                f"coset triple {part.coset()} is shared by {[c.label for c in cands]}")
        el = cands[0]
        coeff = part / el.function()
        out[el.label] = out[el.label] + coeff if el.label in out else coeff
    return {k: v for k, v in out.items() if not v.is_zero()}


def reconstruct_from_gbasis(coeffs: dict, basis) -> list:
    """Inverse of decompose_in_gbasis: list of LaurentRational summands."""
    lookup = {el.label: el for el in basis}
    return [c * lookup[label].function() for label, c in coeffs.items()]


# ---------------------------------------------------------------------------
# text form:  x1^(p) * x2^(q) * (x1-x2)^(s) * [poly / x1^r x2^t (x1-x2)^u]


def _format_coeff(c) -> str:
    text = str(c)
    return text if re.fullmatch(r"-?\d+(/\d+)?", text) else f"({text})"


def format_rat(f: LaurentRational) -> str:
    if f.is_zero():
        return "0"
    p, q, s = f.prefactor
    r = -min(0, min(i for i, _ in f.num))
    t = -min(0, min(j for _, j in f.num))
    terms = []
    for (i, j) in sorted(f.num):
        terms.append(f"{_format_coeff(f.num[(i, j)])}*x1^{i + r}*x2^{j + t}")
    return (f"x1^({p}) * x2^({q}) * (x1-x2)^({s}) * "
            f"[{' + '.join(terms)} / x1^{r} x2^{t} (x1-x2)^{f.u}]")


_RAT_RE = re.compile(
    r"^\s*x1\^\((?P<p>[^)]*)\)\s*\*\s*x2\^\((?P<q>[^)]*)\)\s*\*\s*\(x1-x2\)\^\((?P<s>[^)]*)\)"
    r"\s*\*\s*\[(?P<poly>.*)/\s*x1\^(?P<r>\d+)\s+x2\^(?P<t>\d+)\s+\(x1-x2\)\^(?P<u>\d+)\s*\]\s*$")
_TERM_RE = re.compile(r"^\s*(\(.*\)|-?\d+(?:/\d+)?)\*x1\^(\d+)\*x2\^(\d+)\s*$")


def parse_rat(text: str, order: int | None = None) -> LaurentRational:
    text = text.strip()
    if text == "0":
        return LaurentRational()
    m = _RAT_RE.match(text)
    if not m:
        raise RatParseError(f"malformed rational function: {text!r}")
    r, t, u = int(m["r"]), int(m["t"]), int(m["u"])
    num = {}
    depth = 0
    pieces, cur = [], ""
    for ch in m["poly"]:
        depth += ch == "("
        depth -= ch == ")"
        if ch == "+" and depth == 0 and cur.strip():
            pieces.append(cur)
            cur = ""
        else:
            cur += ch
    pieces.append(cur)
    for piece in pieces:
        tm = _TERM_RE.match(piece)
        if not tm:
            raise RatParseError(f"malformed term {piece!r}")
        coeff_text = tm.group(1)
        if coeff_text.startswith("("):
            coeff = parse_cyclo(coeff_text[1:-1], order)
        else:
            coeff = Fraction(coeff_text)
            if order is not None:
                coeff = CycloNumber.rational(coeff, order)
        key = (int(tm.group(2)) - r, int(tm.group(3)) - t)
        num[key] = num.get(key, 0) + coeff
    try:
        pre = (Fraction(m["p"]), Fraction(m["q"]), Fraction(m["s"]))
    except ValueError as exc:
        raise RatParseError(str(exc)) from exc
    return LaurentRational(num, u, pre)
