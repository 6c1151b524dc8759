"""Sparse multivariate formal series with rational exponents and certified windows.

A series stores finitely many terms.  Its *window* is the box of exponents on
which every coefficient is known exactly (stored or zero).  Its *support*
bounds are known facts about where the full, untruncated series can be
nonzero (lower truncation and the like); outside the support a coefficient is
zero even if it lies outside the window.  Operations emit the largest window
they can certify from their operands' windows and supports.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

from ioalg.exactnum import phase
from ioalg.exactnum import phase_order as phase_order_of
from ioalg.kernel import conv_pairs

INF = math.inf
_BIG = 1 << 62


class SeriesError(ValueError):
    pass


class VariableMismatchError(SeriesError):
    pass


class NonSummableError(SeriesError):
    """A coefficient of a product would be an infinite sum."""


class UncertifiedError(SeriesError):
    """A coefficient outside the certified window was requested."""


def frac(q) -> Fraction:
    """Fractional part in [0, 1)."""
    q = Fraction(q)
    return q - math.floor(q)


def _bound_str(b) -> str:
    if b == INF:
        return "inf"
    if b == -INF:
        return "-inf"
    return str(Fraction(b))


def binom(r, m: int) -> Fraction:
    """Generalized binomial coefficient C(r, m) for rational r, integer m >= 0."""
    r = Fraction(r)
    out = Fraction(1)
    for k in range(m):
        out = out * (r - k) / (k + 1)
    return out


def binom_row(r, count: int) -> list[Fraction]:
    """[C(r, 0), ..., C(r, count-1)]."""
    r = Fraction(r)
    row = []
    c = Fraction(1)
    for k in range(count):
        row.append(c)
        c = c * (r - k) / (k + 1)
    return row


class Window:
    """Per-variable closed exponent ranges; unspecified variables are unbounded."""

    __slots__ = ("bounds",)

    def __init__(self, bounds=None):
        clean = {}
        for var, (lo, hi) in (bounds or {}).items():
            lo = lo if lo in (INF, -INF) else Fraction(lo)
            hi = hi if hi in (INF, -INF) else Fraction(hi)
            if (lo, hi) != (-INF, INF):
                clean[var] = (lo, hi)
        self.bounds = clean

    @classmethod
    def box(cls, variables, low, high) -> "Window":
        return cls({v: (low, high) for v in variables})

    def get(self, var):
        return self.bounds.get(var, (-INF, INF))

    def intersect(self, other: "Window") -> "Window":
        out = dict(self.bounds)
        for var, (lo, hi) in other.bounds.items():
            a, b = out.get(var, (-INF, INF))
            out[var] = (max(a, lo), min(b, hi))
        return Window(out)

    def is_empty(self, variables=None) -> bool:
        vs = self.bounds if variables is None else variables
        return any(self.get(v)[0] > self.get(v)[1] for v in vs)

    def contains(self, variables, point) -> bool:
        for v, e in zip(variables, point):
            lo, hi = self.get(v)
            if e < lo or e > hi:
                return False
        return True

    def restrict(self, variables) -> "Window":
        return Window({v: self.get(v) for v in variables})

    def shift(self, var, delta) -> "Window":
        lo, hi = self.get(var)
        out = dict(self.bounds)
        out[var] = (lo + delta, hi + delta)
        return Window(out)

    def __eq__(self, other):
        return isinstance(other, Window) and self.bounds == other.bounds

    def __repr__(self):
        inner = ", ".join(f"{v}:[{_bound_str(lo)},{_bound_str(hi)}]"
                          for v, (lo, hi) in sorted(self.bounds.items()))
        return f"Window({inner})"


def _reps(values) -> frozenset:
    return frozenset(frac(v) for v in values)


class FormalSeries:
    """Immutable sparse series; see the module docstring for window semantics."""

    __slots__ = ("variables", "terms", "grid", "window", "support", "degrees", "zero")

    def __init__(self, variables, terms=None, grid=None, window=None, support=None,
                 degrees=None, zero=0, check=True):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise VariableMismatchError(f"repeated variable in {variables}")
        self.variables = variables
        self.window = (window or Window()).restrict(variables)
        clean = {}
        for exps, c in (terms or {}).items():
            if not c:
                continue
            exps = tuple(Fraction(e) for e in exps)
            if check and len(exps) != len(variables):
                raise SeriesError(f"exponent tuple {exps} does not match {variables}")
            clean[exps] = c
        self.terms = clean
        if grid is None:
            grid = {v: _reps(k[i] for k in clean) or frozenset({Fraction(0)})
                    for i, v in enumerate(variables)}
        self.grid = {v: frozenset(frac(q) for q in grid.get(v, {0})) for v in variables}
        sup = {}
        for v in variables:
            lo, hi = (support or {}).get(v, (-INF, INF))
            sup[v] = (lo if lo in (INF, -INF) else Fraction(lo),
                      hi if hi in (INF, -INF) else Fraction(hi))
        self.support = sup
        self.degrees = None if degrees is None else frozenset(Fraction(d) for d in degrees)
        self.zero = zero
        if check:
            for exps in clean:
                if not self.window.contains(variables, exps):
                    raise SeriesError(f"term {exps} lies outside the window {self.window}")
                for v, e in zip(variables, exps):
                    if frac(e) not in self.grid[v]:
                        raise SeriesError(f"term {exps} is off the exponent grid")

    # -- queries ---------------------------------------------------------------
    def on_grid(self, point) -> bool:
        return all(frac(e) in self.grid[v] for v, e in zip(self.variables, point))

    def known_zero(self, point) -> bool:
        """True when the coefficient at ``point`` is zero regardless of the window."""
        if not self.on_grid(point):
            return True
        for v, e in zip(self.variables, point):
            lo, hi = self.support[v]
            if e < lo or e > hi:
                return True
        if self.degrees is not None and sum(point, Fraction(0)) not in self.degrees:
            return True
        return False

    def certified(self, point) -> bool:
        return self.known_zero(point) or self.window.contains(self.variables, point)

    def coefficient(self, point):
        point = tuple(Fraction(e) for e in point)
        if len(point) != len(self.variables):
            raise VariableMismatchError("exponent tuple length mismatch")
        if point in self.terms:
            return self.terms[point]
        if self.certified(point):
            return self.zero
        raise UncertifiedError(
            f"coefficient at {tuple(str(e) for e in point)} is outside the certified window "
            f"{self.window}")

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return (f"FormalSeries({self.variables}, {len(self.terms)} terms, "
                f"window={self.window})")

    def with_window(self, window: Window) -> "FormalSeries":
        """Restrict to a smaller window (terms outside are dropped)."""
        win = self.window.intersect(window)
        terms = {k: c for k, c in self.terms.items() if win.contains(self.variables, k)}
        return FormalSeries(self.variables, terms, self.grid, win, self.support,
                            self.degrees, self.zero, check=False)

    def map_coefficients(self, fn) -> "FormalSeries":
        return FormalSeries(self.variables, {k: fn(c) for k, c in self.terms.items()},
                            self.grid, self.window, self.support, self.degrees,
                            fn(self.zero) if self.zero else self.zero, check=False)

    def reorder(self, variables) -> "FormalSeries":
        """Same series with variables listed in a different order (or extended)."""
        variables = tuple(variables)
        if set(self.variables) - set(variables):
            raise VariableMismatchError(f"cannot drop variables {self.variables} -> {variables}")
        idx = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {tuple(k[i] if i is not None else Fraction(0) for i in idx): c
                 for k, c in self.terms.items()}
        grid = {v: self.grid.get(v, frozenset({Fraction(0)})) for v in variables}
        support = {v: self.support.get(v, (Fraction(0), Fraction(0))) for v in variables}
        return FormalSeries(variables, terms, grid, self.window.restrict(variables), support,
                            self.degrees, self.zero, check=False)


# ---------------------------------------------------------------------------
# constructors


def monomial(variables, exponents, coeff=1, zero=0) -> FormalSeries:
    """A single exact term; certified everywhere."""
    exponents = tuple(Fraction(e) for e in exponents)
    return FormalSeries(variables, {exponents: coeff},
                        {v: {e} for v, e in zip(variables, exponents)}, Window(),
                        {v: (e, e) for v, e in zip(variables, exponents)},
                        {sum(exponents, Fraction(0))}, zero)


def from_terms(variables, terms, zero=0) -> FormalSeries:
    """A finite (polynomial-type) series, exact everywhere."""
    terms = {tuple(Fraction(e) for e in k): c for k, c in terms.items() if c}
    support = {}
    for i, v in enumerate(variables):
        vals = [k[i] for k in terms]
        support[v] = (min(vals), max(vals)) if vals else (Fraction(0), Fraction(0))
    grid = {v: _reps(k[i] for k in terms) or {0} for i, v in enumerate(variables)}
    degrees = {sum(k, Fraction(0)) for k in terms}
    return FormalSeries(variables, terms, grid, Window(), support, degrees, zero)


def zero_series(variables, window=None, zero=0) -> FormalSeries:
    return FormalSeries(variables, {}, None, window, None, None, zero)


def delta_series(var: str, window: Window) -> FormalSeries:
    """delta(x) = sum over integers n of x^n, on the integer points of the window."""
    lo, hi = window.get(var)
    if lo == -INF or hi == INF:
        raise SeriesError("delta_series needs a finite window")
    terms = {(Fraction(n),): 1 for n in range(math.ceil(lo), math.floor(hi) + 1)}
    return FormalSeries((var,), terms, {var: {0}}, window.restrict((var,)), None, None)


def binomial_expand(base, exponent, window: Window) -> FormalSeries:
    """(x_i + sign*x_j)^r expanded in nonnegative powers of x_j, inside the window."""
    vi, sign, vj = base
    r = Fraction(exponent)
    lo_i, hi_i = window.get(vi)
    lo_j, hi_j = window.get(vj)
    m_lo = max(0, math.ceil(lo_j))
    m_hi = min(hi_j, r - lo_i)
    if r.denominator == 1 and r >= 0:
        m_hi = min(m_hi, r)
    if m_hi == INF:
        raise SeriesError("binomial expansion window is unbounded")
    m_hi = math.floor(m_hi) if m_hi != -INF else -1
    terms = {}
    if m_hi >= m_lo:
        row = binom_row(r, m_hi + 1)
        for m in range(m_lo, m_hi + 1):
            e_i = r - m
            if e_i > hi_i or not row[m]:
                continue
            terms[(e_i, Fraction(m))] = row[m] * (sign ** m)
    hi_sup = r if (r.denominator == 1 and r >= 0) else INF
    return FormalSeries((vi, vj), terms, {vi: {r}, vj: {0}}, window.restrict((vi, vj)),
                        {vi: (r - hi_sup if hi_sup != INF else -INF, r), vj: (0, hi_sup)},
                        {r})


def delta_two_summand(num, denom_var: str, window: Window, denom_sign: int = 1,
                      variables=None) -> FormalSeries:
    """x0^{-1} delta((x_a + s x_b)/(d x0)) = sum_n d^n (x_a + s x_b)^n x0^{-n-1}.

    ``num`` is (x_a, s, x_b) and ``denom_sign`` is d; binomials are expanded in
    nonnegative powers of x_b.  The coefficient of x0^{-n-1} x_a^{n-m} x_b^m is
    d^n s^m C(n, m).
    """
    va, sign, vb = num
    if variables is None:
        variables = tuple(sorted((denom_var, va, vb)))
    variables = tuple(variables)
    pos = {v: i for i, v in enumerate(variables)}
    lo_d, hi_d = window.get(denom_var)
    lo_a, hi_a = window.get(va)
    lo_b, hi_b = window.get(vb)
    n_lo = -hi_d - 1 if hi_d != INF else -INF
    n_hi = -lo_d - 1 if lo_d != -INF else INF
    m_lo = max(0, math.ceil(lo_b))
    m_hi = hi_b

    def emit(n, m, terms):
        if m < 0:
            return
        c = binom(n, m)
        if not c:
            return
        c = c * (sign ** m) * (denom_sign ** (n % 2))
        key = [Fraction(0)] * len(variables)
        key[pos[denom_var]] = Fraction(-n - 1)
        key[pos[va]] = Fraction(n - m)
        key[pos[vb]] = Fraction(m)
        terms[tuple(key)] = c

    terms = {}
    if n_lo != -INF and n_hi != INF:
        for n in range(math.ceil(n_lo), math.floor(n_hi) + 1):
            lo = max(m_lo, n - hi_a) if hi_a != INF else m_lo
            hi = min(m_hi, n - lo_a) if lo_a != -INF else m_hi
            if hi == INF:
                raise SeriesError("delta expansion window is unbounded")
            for m in range(math.ceil(lo), math.floor(hi) + 1):
                emit(n, m, terms)
    elif m_hi != INF and lo_a != -INF and hi_a != INF:
        for m in range(m_lo, math.floor(m_hi) + 1):
            for a in range(math.ceil(lo_a), math.floor(hi_a) + 1):
                n = a + m
                if n_lo <= n <= n_hi:
                    emit(n, m, terms)
    else:
        raise SeriesError("delta expansion window is unbounded")
    support = {vb: (0, INF)}
    grid = {v: {0} for v in variables}
    return FormalSeries(variables, terms, grid, window.restrict(variables), support, {-1})


# ---------------------------------------------------------------------------
# arithmetic


def _check_vars(a: FormalSeries, b: FormalSeries):
    if a.variables != b.variables:
        raise VariableMismatchError(f"variables differ: {a.variables} vs {b.variables}")


def s_add(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    _check_vars(a, b)
    win = a.window.intersect(b.window)
    terms = {k: c for k, c in a.terms.items() if win.contains(a.variables, k)}
    for k, c in b.terms.items():
        if not win.contains(a.variables, k):
            continue
        if k in terms:
            s = terms[k] + c
            if s:
                terms[k] = s
            else:
                del terms[k]
        else:
            terms[k] = c
    grid = {v: a.grid[v] | b.grid[v] for v in a.variables}
    support = {v: (min(a.support[v][0], b.support[v][0]), max(a.support[v][1], b.support[v][1]))
               for v in a.variables}
    degrees = None if a.degrees is None or b.degrees is None else a.degrees | b.degrees
    return FormalSeries(a.variables, terms, grid, win, support, degrees, a.zero, check=False)


def s_scale(a: FormalSeries, c) -> FormalSeries:
    if not c:
        return FormalSeries(a.variables, {}, a.grid, a.window, a.support, a.degrees, a.zero,
                            check=False)
    return FormalSeries(a.variables, {k: v * c for k, v in a.terms.items()}, a.grid, a.window,
                        a.support, a.degrees, a.zero, check=False)


def s_neg(a: FormalSeries) -> FormalSeries:
    return FormalSeries(a.variables, {k: -v for k, v in a.terms.items()}, a.grid, a.window,
                        a.support, a.degrees, a.zero, check=False)


def s_sub(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    return s_add(a, s_neg(b))


def _certified_range(wa, sa, wb, sb):
    """Target exponents k certified for one variable (see s_mul)."""
    la, ha = wa
    lb, hb = wb
    sal, sah = sa
    sbl, sbh = sb
    k_lo, k_hi = -INF, INF
    if sal < la:
        k_lo = max(k_lo, la + sbh)
    if sah > ha:
        k_hi = min(k_hi, ha + sbl)
    if sbh > hb:
        k_hi = min(k_hi, hb + sal)
    if sbl < lb:
        k_lo = max(k_lo, lb + sah)
    return k_lo, k_hi


def s_mul(a: FormalSeries, b: FormalSeries, window: Window | None = None) -> FormalSeries:
    """Product of two series, exact on the certified window it reports.

    A target coefficient is certified when every decomposition k = e_a + e_b
    allowed by the operands' supports has e_a inside a's window and e_b inside
    b's window.  The convolution must be finite: at most one variable may have
    an unbounded range of decompositions, and then a finite degree set has to
    pin it.
    """
    variables = a.variables + tuple(v for v in b.variables if v not in a.variables)
    a2 = a.reorder(variables) if a.variables != variables else a
    b2 = b.reorder(variables) if b.variables != variables else b
    bounds = {}
    unbounded = []
    for v in variables:
        sa, sb = a2.support[v], b2.support[v]
        if (sa[0] == -INF and sb[1] == INF) or (sa[1] == INF and sb[0] == -INF):
            unbounded.append(v)
        bounds[v] = _certified_range(a2.window.get(v), sa, b2.window.get(v), sb)
    if len(unbounded) > 1 or (unbounded and a2.degrees is None and b2.degrees is None):
        raise NonSummableError(
            f"product coefficients are infinite sums (unbounded in {unbounded})")
    win = Window(bounds)
    if window is not None:
        win = win.intersect(window)
    grid = {v: frozenset(frac(p + q) for p in a2.grid[v] for q in b2.grid[v])
            for v in variables}
    support = {v: (a2.support[v][0] + b2.support[v][0], a2.support[v][1] + b2.support[v][1])
               for v in variables}
    degrees = None
    if a2.degrees is not None and b2.degrees is not None:
        degrees = {p + q for p in a2.degrees for q in b2.degrees}
    terms = _convolve(a2, b2, variables, win)
    zero = a.zero if not isinstance(a.zero, int) else b.zero
    return FormalSeries(variables, terms, grid, win, support, degrees, zero, check=False)


def _convolve(a: FormalSeries, b: FormalSeries, variables, win: Window):
    if not a.terms or not b.terms or win.is_empty(variables):
        return {}
    keys_a = list(a.terms)
    keys_b = list(b.terms)
    dens = [e.denominator for k in keys_a for e in k] + [e.denominator for k in keys_b for e in k]
    scale = reduce(math.lcm, dens, 1)
    nv = len(variables)
    ea = [int(e * scale) for k in keys_a for e in k]
    eb = [int(e * scale) for k in keys_b for e in k]
    lo, hi = [], []
    for v in variables:
        l, h = win.get(v)
        lo.append(-_BIG if l == -INF else math.ceil(l * scale))
        hi.append(_BIG if h == INF else math.floor(h * scale))
    idx_a, idx_b = conv_pairs(ea, eb, nv, lo, hi)
    acc = {}
    ca = [a.terms[k] for k in keys_a]
    cb = [b.terms[k] for k in keys_b]
    for i, j in zip(idx_a, idx_b):
        key = tuple(ea[i * nv + t] + eb[j * nv + t] for t in range(nv))
        prod = ca[i] * cb[j]
        if key in acc:
            acc[key] = acc[key] + prod
        else:
            acc[key] = prod
    return {tuple(Fraction(e, scale) for e in key): c for key, c in acc.items() if c}


def residue(a: FormalSeries, var: str) -> FormalSeries:
    """Coefficient of var^{-1}, as a series in the remaining variables."""
    if var not in a.variables:
        raise VariableMismatchError(f"{var} is not a variable of the series")
    i = a.variables.index(var)
    rest = tuple(v for v in a.variables if v != var)
    lo, hi = a.window.get(var)
    s_lo, s_hi = a.support[var]
    on_grid = Fraction(0) in a.grid[var]
    if on_grid and not (lo <= -1 <= hi) and s_lo <= -1 <= s_hi:
        raise UncertifiedError(f"x^-1 in {var} is outside the certified window")
    terms = {}
    if on_grid:
        for k, c in a.terms.items():
            if k[i] == -1:
                terms[k[:i] + k[i + 1:]] = c
    degrees = None if a.degrees is None else {d + 1 for d in a.degrees}
    return FormalSeries(rest, terms, {v: a.grid[v] for v in rest}, a.window.restrict(rest),
                        {v: a.support[v] for v in rest}, degrees, a.zero, check=False)


def derivative(a: FormalSeries, var: str) -> FormalSeries:
    """d/dvar, exponent-wise: n x^n -> n x^(n-1)."""
    i = a.variables.index(var)
    terms = {}
    for k, c in a.terms.items():
        n = k[i]
        if n:
            terms[k[:i] + (n - 1,) + k[i + 1:]] = c * n
    lo, hi = a.support[var]
    degrees = None if a.degrees is None else {d - 1 for d in a.degrees}
    support = dict(a.support)
    support[var] = (lo - 1, hi - 1)
    return FormalSeries(a.variables, terms, a.grid, a.window.shift(var, -1), support, degrees,
                        a.zero, check=False)


def multiply_monomial(a: FormalSeries, shifts: dict, coeff=1) -> FormalSeries:
    """coeff * prod x_v^{shift_v} * a (exact; windows and supports shift)."""
    idx = [Fraction(shifts.get(v, 0)) for v in a.variables]
    terms = {tuple(e + s for e, s in zip(k, idx)): c * coeff for k, c in a.terms.items()}
    win = a.window
    for v, s in zip(a.variables, idx):
        if s:
            win = win.shift(v, s)
    support = {v: (a.support[v][0] + s, a.support[v][1] + s) for v, s in zip(a.variables, idx)}
    grid = {v: frozenset(frac(q + s) for q in a.grid[v]) for v, s in zip(a.variables, idx)}
    degrees = None if a.degrees is None else {d + sum(idx, Fraction(0)) for d in a.degrees}
    return FormalSeries(a.variables, {k: c for k, c in terms.items() if c}, grid, win, support,
                        degrees, a.zero, check=False)


def substitute_phase(a: FormalSeries, var: str, half_turns: int, order: int | None = None
                     ) -> FormalSeries:
    """Multiply the coefficient at exponent n of ``var`` by e^{half_turns * pi i n}."""
    i = a.variables.index(var)
    if order is None:
        orders = {getattr(c, "order", None) for c in a.terms.values()} - {None}
        order = max(orders) if orders else 2
        for n in {k[i] for k in a.terms}:
            order = math.lcm(order, phase_order_of(half_turns * n))
    cache = {}
    terms = {}
    for k, c in a.terms.items():
        n = k[i]
        if n not in cache:
            cache[n] = phase(half_turns * n, order)
        terms[k] = c * cache[n]
    return FormalSeries(a.variables, terms, a.grid, a.window, a.support, a.degrees, a.zero,
                        check=False)


def extract_coefficient(a: FormalSeries, exponents):
    return a.coefficient(exponents)


def series_equal_on(a: FormalSeries, b: FormalSeries, window: Window | None = None):
    """First exponent (sorted) where a and b differ on their common certified window.

    Returns None when they agree.
    """
    _check_vars(a, b)
    win = a.window.intersect(b.window)
    if window is not None:
        win = win.intersect(window)
    keys = sorted(set(a.terms) | set(b.terms))
    for k in keys:
        if not win.contains(a.variables, k):
            continue
        ca = a.terms.get(k, a.zero)
        cb = b.terms.get(k, b.zero)
        if ca != cb:
            return k
    return None


def dump(a: FormalSeries) -> str:
    lines = []
    for k in sorted(a.terms):
        lines.append(f"({', '.join(str(e) for e in k)}) : {a.terms[k]}")
    return "\n".join(lines)
