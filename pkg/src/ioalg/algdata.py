"""Truncated algebra instances: colors, fusion rules, graded spaces, operator
tables, intertwiner bases, fusing/braiding scalars; parser, validator and
writer for the instance text format; matrix coefficients of products and
iterates of operators.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from pathlib import Path

from ioalg.exactnum import (CycloNumber, CycloParseError, as_cyclo, cyclo_orders, format_cyclo,
                            parse_cyclo, phase_order)
from ioalg.ratfun import GBasisElement
from ioalg.series import INF, FormalSeries, UncertifiedError, Window, frac


class InstanceError(ValueError):
    """Invalid instance data; ``location`` names the offending section/line."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class TruncationError(UncertifiedError):
    """A request needs data beyond a space's truncation level."""


# ---------------------------------------------------------------------------
# vectors


class Vec:
    """Vector in W^a: sparse map (level, index) -> coefficient."""

    __slots__ = ("color", "comps")

    def __init__(self, color, comps=None):
        self.color = color
        self.comps = {k: c for k, c in (comps or {}).items() if c}

    @classmethod
    def basis(cls, color, level: int, index: int, one=1) -> "Vec":
        return cls(color, {(level, index): one})

    def levels(self) -> set:
        return {l for l, _ in self.comps}

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if other.color != self.color:
            raise ValueError(f"adding vectors of colors {self.color} and {other.color}")
        out = dict(self.comps)
        for k, c in other.comps.items():
            out[k] = out[k] + c if k in out else c
        return Vec(self.color, out)

    __radd__ = __add__

    def __neg__(self):
        return Vec(self.color, {k: -c for k, c in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, Vec):
            return NotImplemented
        return Vec(self.color, {k: c * scalar for k, c in self.comps.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.comps)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.comps
        if not isinstance(other, Vec):
            return NotImplemented
        if not self.comps and not other.comps:
            return True
        return self.color == other.color and self.comps.keys() == other.comps.keys() and all(
            self.comps[k] == other.comps[k] for k in self.comps)

    def __hash__(self):
        return hash((self.color, frozenset(self.comps)))

    def __repr__(self):
        inner = ", ".join(f"{l}.{i}: {c}" for (l, i), c in sorted(self.comps.items()))
        return f"Vec({self.color}; {inner})"


@dataclass(frozen=True)
class DualVector:
    """Element of the graded dual: coefficients against the dual basis at one level."""

    color: str
    level: int
    coeffs: tuple

    @classmethod
    def basis(cls, color, level, index, dim, one=1) -> "DualVector":
        return cls(color, level, tuple(one if k == index else 0 for k in range(dim)))

    def pair(self, v) -> object:
        if not isinstance(v, Vec) or v.color != self.color:
            return 0
        total = 0
        for (l, i), c in v.comps.items():
            if l == self.level and i < len(self.coeffs) and self.coeffs[i]:
                total = total + self.coeffs[i] * c
        return total


# ---------------------------------------------------------------------------
# structural data


@dataclass
class ColorAlgebra:
    colors: tuple
    identity: str
    fusion: dict  # (a1, a2, a3) -> N

    def N(self, a1, a2, a3) -> int:
        return self.fusion.get((a1, a2, a3), 0)

    def validate(self):
        cs = self.colors
        if self.identity not in cs:
            raise InstanceError(f"identity {self.identity!r} is not a color", "[colors]")
        for (a1, a2, a3), n in self.fusion.items():
            for a in (a1, a2, a3):
                if a not in cs:
                    raise InstanceError(f"unknown color {a!r}", "[fusion]")
            if n < 0:
                raise InstanceError(f"negative fusion rule N({a1},{a2};{a3})", "[fusion]")
        for a1 in cs:
            for a2 in cs:
                for a3 in cs:
                    if self.N(a1, a2, a3) != self.N(a2, a1, a3):
                        raise InstanceError(
                            f"fusion asymmetry: N({a1},{a2};{a3}) = {self.N(a1, a2, a3)} but "
                            f"N({a2},{a1};{a3}) = {self.N(a2, a1, a3)}", "[fusion]")
        e = self.identity
        for a1 in cs:
            for a2 in cs:
                if self.N(e, a1, a2) != (1 if a1 == a2 else 0):
                    raise InstanceError(
                        f"identity column violated: N({e},{a1};{a2}) = {self.N(e, a1, a2)}",
                        "[fusion]")
        for a1 in cs:
            for a2 in cs:
                for a3 in cs:
                    for a4 in cs:
                        lhs = sum(self.N(a1, a2, a) * self.N(a, a3, a4) for a in cs)
                        rhs = sum(self.N(a1, a, a4) * self.N(a2, a3, a) for a in cs)
                        if lhs != rhs:
                            raise InstanceError(
                                f"fusion associativity fails at ({a1},{a2},{a3};{a4}): "
                                f"{lhs} != {rhs}", "[fusion]")


@dataclass
class GradedSpace:
    color: str
    weight: Fraction
    dims: tuple  # dims[l] for l = 0 .. len-1; zero beyond (up to truncation)
    truncation: object  # int or INF

    def certified(self, level) -> bool:
        return 0 <= level <= self.truncation or level < 0

    def dim(self, level: int) -> int:
        if level < 0:
            return 0
        if level > self.truncation:
            raise TruncationError(f"level {level} of W^{self.color} is beyond truncation "
                                  f"{self.truncation}")
        return self.dims[level] if level < len(self.dims) else 0

    def levels(self):
        """All certified levels with a nonzero space."""
        return [l for l, d in enumerate(self.dims) if d and l <= self.truncation]

    def basis(self, max_level=None):
        for l in self.levels():
            if max_level is not None and l > max_level:
                continue
            for i in range(self.dims[l]):
                yield l, i


@dataclass
class OperatorTable:
    """One intertwiner basis element of type (a1, a2; a3).

    ``entries[(l1, i1, l2, i2)][l3]`` is the output vector (dense tuple over
    the basis of level l3) of the mode that maps the inputs to level l3.
    Missing entries are zero.
    """

    a1: str
    a2: str
    a3: str
    index: int
    entries: dict = field(default_factory=dict)

    @property
    def ref(self):
        return (self.a1, self.a2, self.a3, self.index)

    def output(self, l1, i1, l2, i2, l3):
        return self.entries.get((l1, i1, l2, i2), {}).get(l3)

    def copy(self) -> "OperatorTable":
        return OperatorTable(self.a1, self.a2, self.a3, self.index,
                             {k: dict(v) for k, v in self.entries.items()})


@dataclass
class FBlock:
    """Fusing (or braiding) block for one color quadruple, rows/cols canonical."""

    rows: list
    cols: list
    matrix: list  # matrix[r][c]


@dataclass
class AlgebraInstance:
    name: str
    order: int
    colors: ColorAlgebra
    spaces: dict
    vacuum: Vec
    central_charge: CycloNumber
    omega: object  # Vec in W^e level 2, or None when outside the truncation
    intertwiners: dict  # (a1, a2, a3) -> list[OperatorTable]
    F: dict = field(default_factory=dict)  # (a1, a2, a3, a4) -> FBlock
    Omega: dict = field(default_factory=dict)  # (a1, a2, a3) -> matrix
    gbasis: dict = field(default_factory=dict)  # (a1, a2, a3, a4) -> list[GBasisElement]
    warnings: list = field(default_factory=list)

    # -- convenience -----------------------------------------------------------
    @property
    def e(self) -> str:
        return self.colors.identity

    def weight(self, color) -> Fraction:
        return self.spaces[color].weight

    def N(self, a1, a2, a3) -> int:
        return self.colors.N(a1, a2, a3)

    def table(self, ref) -> OperatorTable:
        a1, a2, a3, i = ref
        tabs = self.intertwiners.get((a1, a2, a3), [])
        if not 1 <= i <= len(tabs):
            raise KeyError(f"no intertwiner {a1} {a2} -> {a3} # {i}")
        return tabs[i - 1]

    def all_tables(self):
        for key in sorted(self.intertwiners, key=self._color_key):
            yield from self.intertwiners[key]

    def _color_key(self, key):
        pos = {c: i for i, c in enumerate(self.colors.colors)}
        return tuple(pos[c] for c in key)

    def scalar(self, value) -> CycloNumber:
        return as_cyclo(value, self.order)

    def zero(self) -> CycloNumber:
        return CycloNumber.zero(self.order)

    def one(self) -> CycloNumber:
        return CycloNumber.one(self.order)

    def module_operator(self, color) -> OperatorTable:
        return self.table((self.e, color, color, 1))

    def vertex_operator(self) -> OperatorTable:
        return self.module_operator(self.e)

    def dual_basis(self, color, max_level=None):
        sp = self.spaces[color]
        for l, i in sp.basis(max_level):
            yield DualVector.basis(color, l, i, sp.dims[l], self.one())

    def vec_basis(self, color, max_level=None):
        sp = self.spaces[color]
        for l, i in sp.basis(max_level):
            yield Vec.basis(color, l, i, self.one())

    def F_rows(self, a1, a2, a3, a4):
        cs = self.colors.colors
        return [(a5, i, j) for a5 in cs for i in range(1, self.N(a1, a5, a4) + 1)
                for j in range(1, self.N(a2, a3, a5) + 1)]

    def F_cols(self, a1, a2, a3, a4):
        cs = self.colors.colors
        return [(a, k, l) for a in cs for k in range(1, self.N(a1, a2, a) + 1)
                for l in range(1, self.N(a, a3, a4) + 1)]

    def __eq__(self, other):
        return isinstance(other, AlgebraInstance) and save_text(self) == save_text(other)


# ---------------------------------------------------------------------------
# weights, cosets, orders


def exponent_cosets(inst: AlgebraInstance, a1, a2) -> set:
    """P(a1, a2) = {h_a1 + h_a2 - h + Z : h in H} as representatives in [0, 1)."""
    h1, h2 = inst.weight(a1), inst.weight(a2)
    return {frac(h1 + h2 - sp.weight) for sp in inst.spaces.values()}


def minimal_order(weights: dict) -> int:
    """Smallest N such that every phase e^{pi i n}, n in any P(a1, a2), is in Q(zeta_N)."""
    hs = list(weights.values())
    orders = [phase_order(h1 + h2 - h) for h1 in hs for h2 in hs for h in hs]
    return reduce(math.lcm, orders, 1)


def output_level(inst, a1, l1, a2, l2, a3, n) -> Fraction:
    """Level of 𝒴_n(w1) w2 in W^a3 for inputs at levels l1, l2."""
    return inst.weight(a1) + l1 + inst.weight(a2) + l2 - n - 1 - inst.weight(a3)


def mode_for(inst, a1, l1, a2, l2, a3, l3) -> Fraction:
    return inst.weight(a1) + l1 + inst.weight(a2) + l2 - 1 - inst.weight(a3) - l3


# ---------------------------------------------------------------------------
# operator application and matrix coefficients


def _apply_table(inst, table: OperatorTable, w1: Vec, w2: Vec):
    """{x exponent: Vec in W^a3} over all certified output levels."""
    sp3 = inst.spaces[table.a3]
    h = inst.weight(table.a3)
    out = {}
    for (l1, i1), c1 in w1.comps.items():
        for (l2, i2), c2 in w2.comps.items():
            row = table.entries.get((l1, i1, l2, i2))
            if not row:
                continue
            base = inst.weight(table.a1) + l1 + inst.weight(table.a2) + l2
            for l3, vec in row.items():
                if l3 > sp3.truncation:
                    continue
                expo = h + l3 - base
                comps = {(l3, k): c * c1 * c2 for k, c in enumerate(vec) if c}
                if comps:
                    v = Vec(table.a3, comps)
                    out[expo] = out[expo] + v if expo in out else v
    return {k: v for k, v in out.items() if v}


def _input_weights(inst, color, v: Vec):
    return [inst.weight(color) + l for l in v.levels()]


def intertwiner_apply(inst: AlgebraInstance, ref, w1: Vec, w2: Vec, window: Window | None = None,
                      var: str = "x", strict: bool = False) -> FormalSeries:
    """Series sum_n 𝒴_n(w1) w2 x^{-n-1} valued in W^a3, on its certified window."""
    table = ref if isinstance(ref, OperatorTable) else inst.table(ref)
    if w1.color != table.a1 or w2.color != table.a2:
        if w1 or w2:
            raise ValueError(f"input colors ({w1.color},{w2.color}) do not match "
                             f"({table.a1},{table.a2})")
    sp3 = inst.spaces[table.a3]
    wts = [a + b for a in _input_weights(inst, table.a1, w1)
           for b in _input_weights(inst, table.a2, w2)]
    zero_vec = Vec(table.a3)
    if not wts:
        return FormalSeries((var,), {}, {var: {0}}, window, None, None, zero_vec)
    h3 = inst.weight(table.a3)
    hi = h3 + sp3.truncation - max(wts) if sp3.truncation != INF else INF
    certified = Window({var: (-INF, hi)})
    if window is not None:
        if strict and window.get(var)[1] > hi:
            raise TruncationError(f"window {window} exceeds the truncation-certified range")
        certified = certified.intersect(window)
    terms = {}
    for expo, v in _apply_table(inst, table, w1, w2).items():
        if certified.contains((var,), (expo,)):
            terms[(expo,)] = v
    grid = {var: {h3 - w for w in wts}}
    support = {var: (h3 - max(wts), INF)}
    return FormalSeries((var,), terms, grid, certified, support, None, zero_vec)


def dual_pair(dual: DualVector, series: FormalSeries) -> FormalSeries:
    terms = {k: dual.pair(v) for k, v in series.terms.items()}
    return FormalSeries(series.variables, terms, series.grid, series.window, series.support,
                        series.degrees, 0, check=False)


def _zero_pair(variables):
    return FormalSeries(variables, {}, None, Window(), {v: (0, 0) for v in variables},
                        None, 0, check=False)


def _span(inst, color):
    sp = inst.spaces[color]
    top = len(sp.dims) - 1 if sp.truncation == INF else sp.truncation
    return sp.truncation, top


def product_pairing(inst: AlgebraInstance, outer: OperatorTable, inner: OperatorTable,
                    b1, b2, b3, d4, variables=("x1", "x2")) -> FormalSeries:
    """<d4', outer(b1, x1) inner(b2, x2) b3> for basis vectors given as (level, index).

    The series is exact on its window; the window is limited by the truncation of
    the intermediate space.
    """
    v1, v2 = variables
    if outer.a2 != inner.a3:
        return _zero_pair(variables)
    (l1, i1), (l2, i2), (l3, i3), (l4, i4) = b1, b2, b3, d4
    if l4 > inst.spaces[outer.a3].truncation:
        raise TruncationError(f"dual level {l4} is beyond the truncation of W^{outer.a3}")
    wt1 = inst.weight(outer.a1) + l1
    wt2 = inst.weight(inner.a1) + l2
    wt3 = inst.weight(inner.a2) + l3
    wt4 = inst.weight(outer.a3) + l4
    deg = wt4 - wt1 - wt2 - wt3
    base2 = inst.weight(inner.a3) - wt2 - wt3
    trunc, top = _span(inst, inner.a3)
    terms = {}
    for lm, vec in inner.entries.get((l2, i2, l3, i3), {}).items():
        if lm > trunc:
            continue
        for im, c in enumerate(vec):
            if not c:
                continue
            out = outer.entries.get((l1, i1, lm, im), {}).get(l4)
            if out is None or not out[i4]:
                continue
            e2 = base2 + lm
            key = (deg - e2, e2)
            val = c * out[i4]
            terms[key] = terms[key] + val if key in terms else val
    window = Window() if trunc == INF else Window({v2: (-INF, base2 + trunc)})
    return FormalSeries((v1, v2), {k: v for k, v in terms.items() if v},
                        {v1: {deg - base2}, v2: {base2}}, window,
                        {v1: (deg - base2 - top, deg - base2), v2: (base2, base2 + top)}
                        if trunc == INF else
                        {v1: (-INF, deg - base2), v2: (base2, INF)}, {deg}, 0, check=False)


def iterate_pairing(inst: AlgebraInstance, outer: OperatorTable, inner: OperatorTable,
                    b1, b2, b3, d4, variables=("x0", "x2")) -> FormalSeries:
    """<d4', outer(inner(b1, x0) b2, x2) b3> for basis vectors given as (level, index)."""
    v0, v2 = variables
    if outer.a1 != inner.a3:
        return _zero_pair(variables)
    (l1, i1), (l2, i2), (l3, i3), (l4, i4) = b1, b2, b3, d4
    if l4 > inst.spaces[outer.a3].truncation:
        raise TruncationError(f"dual level {l4} is beyond the truncation of W^{outer.a3}")
    wt1 = inst.weight(inner.a1) + l1
    wt2 = inst.weight(inner.a2) + l2
    wt3 = inst.weight(outer.a2) + l3
    wt4 = inst.weight(outer.a3) + l4
    deg = wt4 - wt1 - wt2 - wt3
    base0 = inst.weight(inner.a3) - wt1 - wt2
    trunc, top = _span(inst, inner.a3)
    terms = {}
    for lm, vec in inner.entries.get((l1, i1, l2, i2), {}).items():
        if lm > trunc:
            continue
        for im, c in enumerate(vec):
            if not c:
                continue
            out = outer.entries.get((lm, im, l3, i3), {}).get(l4)
            if out is None or not out[i4]:
                continue
            e0 = base0 + lm
            key = (e0, deg - e0)
            val = c * out[i4]
            terms[key] = terms[key] + val if key in terms else val
    window = Window() if trunc == INF else Window({v0: (-INF, base0 + trunc)})
    return FormalSeries((v0, v2), {k: v for k, v in terms.items() if v},
                        {v0: {base0}, v2: {deg - base0}}, window,
                        {v0: (base0, base0 + top), v2: (deg - base0 - top, deg - base0)}
                        if trunc == INF else
                        {v0: (base0, INF), v2: (-INF, deg - base0)}, {deg}, 0, check=False)


# ---------------------------------------------------------------------------
# parsing

_SECTION = re.compile(r"^\[(.+)\]$")


def _frac(text: str, loc: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"bad rational {text!r}", loc) from exc


def _split_scalars(text: str) -> list:
    return [t.strip() for t in text.split(";") if t.strip()]


def _iter_sections(text: str):
    name, body, start = None, [], 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("[") else raw.strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            if name is not None:
                yield name, body, start
            name, body, start = m.group(1).strip(), [], lineno
        else:
            if name is None:
                raise InstanceError("content before the first section", f"line {lineno}")
            body.append((lineno, line))
    if name is not None:
        yield name, body, start


def parse_instance(text: str, name: str = "instance") -> AlgebraInstance:
    """Parse and validate the instance text format (see README)."""
    sections = list(_iter_sections(text))
    meta = {}
    colors = identity = None
    fusion = {}
    weights = {}
    dims = {}
    vacuum_raw = None
    virasoro = {}
    tables = {}
    f_raw = {}
    omega_raw = {}
    gbasis = {}
    declared_order = None
    for sec, body, start in sections:
        loc0 = f"[{sec}] (line {start})"
        head = sec.split()
        kind = head[0]
        if kind == "meta":
            for ln, line in body:
                k, _, v = line.partition("=")
                meta[k.strip()] = v.strip()
        elif kind == "field":
            for ln, line in body:
                k, _, v = line.partition("=")
                if k.strip() != "order":
                    raise InstanceError(f"unknown key {k.strip()!r}", f"line {ln}")
                try:
                    declared_order = int(v)
                except ValueError as exc:
                    raise InstanceError("order must be an integer", f"line {ln}") from exc
        elif kind == "colors":
            for ln, line in body:
                k, _, v = line.partition("=")
                if k.strip() == "identity":
                    identity = v.strip()
                elif k.strip() == "colors":
                    colors = tuple(v.split())
                else:
                    raise InstanceError(f"unknown key {k.strip()!r}", f"line {ln}")
        elif kind == "fusion":
            for ln, line in body:
                m = re.match(r"^(\S+)\s+(\S+)\s*->\s*(\S+)\s*:\s*(\d+)$", line)
                if not m:
                    raise InstanceError(f"bad fusion rule {line!r}", f"line {ln}")
                fusion[(m[1], m[2], m[3])] = int(m[4])
        elif kind == "weights":
            for ln, line in body:
                k, _, v = line.partition("=")
                weights[k.strip()] = _frac(v, f"line {ln}")
        elif kind == "dims":
            for ln, line in body:
                m = re.match(r"^(\S+)\s*:\s*levels\s*=\s*([\d,\s]+);\s*truncation\s*=\s*(\S+)$",
                             line)
                if not m:
                    raise InstanceError(f"bad dims line {line!r}", f"line {ln}")
                lv = tuple(int(x) for x in m[2].replace(" ", "").split(",") if x)
                tr = INF if m[3] == "inf" else int(m[3])
                if tr != INF and tr < 0:
                    raise InstanceError("negative truncation", f"line {ln}")
                dims[m[1]] = (lv, tr)
        elif kind == "vacuum":
            for ln, line in body:
                m = re.match(r"^level\s+(\d+)\s*:\s*(.*)$", line)
                if not m:
                    raise InstanceError(f"bad vacuum line {line!r}", f"line {ln}")
                vacuum_raw = (int(m[1]), _split_scalars(m[2]), f"line {ln}")
        elif kind == "virasoro":
            for ln, line in body:
                k, _, v = line.partition("=")
                virasoro[k.strip()] = (v.strip(), f"line {ln}")
        elif kind == "intertwiner":
            m = re.match(r"^intertwiner\s+(\S+)\s+(\S+)\s*->\s*(\S+)\s*#\s*(\d+)$", sec)
            if not m:
                raise InstanceError(f"bad intertwiner header {sec!r}", loc0)
            key = (m[1], m[2], m[3])
            idx = int(m[4])
            entries = []
            for ln, line in body:
                em = re.match(r"^n\s*=\s*(\S+)\s+w1\s*=\s*(\d+)\.(\d+)\s+w2\s*=\s*(\d+)\.(\d+)"
                              r"\s*:\s*(.*)$", line)
                if not em:
                    raise InstanceError(f"bad table entry {line!r}", f"line {ln}")
                entries.append((_frac(em[1], f"line {ln}"), int(em[2]), int(em[3]), int(em[4]),
                                int(em[5]), _split_scalars(em[6]), f"line {ln}"))
            if (key, idx) in tables:
                raise InstanceError("duplicate intertwiner section", loc0)
            tables[(key, idx)] = (entries, loc0)
        elif kind == "F":
            m = re.match(r"^F\s+(\S+)\s+(\S+)\s+(\S+)\s*;\s*(\S+)$", sec)
            if not m:
                raise InstanceError(f"bad F header {sec!r}", loc0)
            rows = []
            for ln, line in body:
                rm = re.match(r"^(\S+)\s+(\d+)\s+(\d+)\s*:\s*(.*)$", line)
                if not rm:
                    raise InstanceError(f"bad F row {line!r}", f"line {ln}")
                rows.append(((rm[1], int(rm[2]), int(rm[3])), _split_scalars(rm[4]),
                             f"line {ln}"))
            f_raw[(m[1], m[2], m[3], m[4])] = (rows, loc0)
        elif kind == "Omega":
            m = re.match(r"^Omega\s+(\S+)\s+(\S+)\s*;\s*(\S+)$", sec)
            if not m:
                raise InstanceError(f"bad Omega header {sec!r}", loc0)
            rows = []
            for ln, line in body:
                rm = re.match(r"^(\d+)\s*:\s*(.*)$", line)
                if not rm:
                    raise InstanceError(f"bad Omega row {line!r}", f"line {ln}")
                rows.append((int(rm[1]), _split_scalars(rm[2]), f"line {ln}"))
            omega_raw[(m[1], m[2], m[3])] = (rows, loc0)
        elif kind == "gbasis":
            if len(head) != 5:
                raise InstanceError(f"bad gbasis header {sec!r}", loc0)
            els = []
            for ln, line in body:
                gm = re.match(r"^(\S+)\s*:\s*(\S+)\s+(\S+)\s+(\S+)$", line)
                if not gm:
                    raise InstanceError(f"bad gbasis row {line!r}", f"line {ln}")
                els.append(GBasisElement(gm[1], _frac(gm[2], f"line {ln}"),
                                         _frac(gm[3], f"line {ln}"), _frac(gm[4], f"line {ln}")))
            gbasis[tuple(head[1:])] = els
        else:
            raise InstanceError(f"unknown section [{sec}]", loc0)

    if colors is None or identity is None:
        raise InstanceError("missing colors or identity", "[colors]")
    calg = ColorAlgebra(colors, identity, {k: v for k, v in fusion.items() if v})
    calg.validate()
    for c in colors:
        if c not in weights:
            raise InstanceError(f"missing weight for color {c!r}", "[weights]")
        if c not in dims:
            raise InstanceError(f"missing dims for color {c!r}", "[dims]")
    if weights[identity] != 0:
        raise InstanceError("the identity color must have weight 0", "[weights]")

    # cyclotomic order
    texts = []
    if vacuum_raw:
        texts += vacuum_raw[1]
    texts += [v for v, _ in virasoro.values()]
    for (entries, _) in tables.values():
        for ent in entries:
            texts += ent[5]
    for rows, _ in f_raw.values():
        for _, vals, _ in rows:
            texts += vals
    for rows, _ in omega_raw.values():
        for _, vals, _ in rows:
            texts += vals
    needed = minimal_order(weights)
    for t in texts:
        if t in ("none",) or t.startswith("level"):
            continue
        try:
            for m in cyclo_orders(t):
                needed = math.lcm(needed, m)
        except CycloParseError as exc:
            raise InstanceError(str(exc)) from exc
    if declared_order is not None:
        if declared_order % needed:
            raise InstanceError(
                f"cyclotomic order insufficiency: declared order {declared_order} is not a "
                f"multiple of the required order {needed}", "[field]")
        order = declared_order
    else:
        order = needed

    def scal(t, loc):
        try:
            return parse_cyclo(t, order)
        except (CycloParseError, ValueError) as exc:
            raise InstanceError(f"bad scalar {t!r}: {exc}", loc) from exc

    spaces = {c: GradedSpace(c, weights[c], dims[c][0], dims[c][1]) for c in colors}
    if spaces[identity].dim(0) != 1:
        raise InstanceError("W^e must have a one-dimensional level 0", "[dims]")

    if vacuum_raw is None:
        raise InstanceError("missing vacuum", "[vacuum]")
    lvl, vals, loc = vacuum_raw
    if lvl != 0 or len(vals) != spaces[identity].dim(0):
        raise InstanceError("vacuum must be given at level 0 with dim(0) coefficients", loc)
    vacuum = Vec(identity, {(0, k): scal(t, loc) for k, t in enumerate(vals)})
    if not vacuum:
        raise InstanceError("vacuum vector is zero", loc)

    c_text, c_loc = virasoro.get("c", ("0", "[virasoro]"))
    central = scal(c_text, c_loc)
    om_text, om_loc = virasoro.get("omega", ("none", "[virasoro]"))
    if om_text == "none":
        if spaces[identity].truncation >= 2:
            raise InstanceError("omega must be given when level 2 of W^e is certified", om_loc)
        omega = None
    else:
        if spaces[identity].truncation < 2:
            raise InstanceError("omega lies outside the truncation of W^e", om_loc)
        m = re.match(r"^level\s+2\s*:\s*(.*)$", om_text)
        if om_text == "0":
            vals = []
        elif m:
            vals = _split_scalars(m[1])
        else:
            raise InstanceError(f"bad omega {om_text!r}", om_loc)
        d2 = spaces[identity].dim(2)
        if vals and len(vals) != d2:
            raise InstanceError(f"omega needs {d2} coefficients", om_loc)
        omega = Vec(identity, {(2, k): scal(t, om_loc) for k, t in enumerate(vals)})

    inst = AlgebraInstance(meta.get("name", name), order, calg, spaces, vacuum, central, omega, {})
    # operator tables
    for (key, idx), (entries, loc0) in sorted(tables.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        a1, a2, a3 = key
        for a in key:
            if a not in colors:
                raise InstanceError(f"unknown color {a!r}", loc0)
        if idx < 1 or idx > calg.N(a1, a2, a3):
            raise InstanceError(f"intertwiner index {idx} exceeds N({a1},{a2};{a3}) = "
                                f"{calg.N(a1, a2, a3)}", loc0)
        tab = OperatorTable(a1, a2, a3, idx, {})
        for n, l1, i1, l2, i2, vals, loc in entries:
            for col, l, i in ((a1, l1, i1), (a2, l2, i2)):
                sp = spaces[col]
                if l > sp.truncation or i >= sp.dim(l):
                    raise InstanceError(f"input {l}.{i} is not a basis vector of W^{col}", loc)
            l3 = output_level(inst, a1, l1, a2, l2, a3, n)
            if l3.denominator != 1:
                raise InstanceError(
                    f"grading mismatch: mode {n} sends levels ({l1},{l2}) to non-integral "
                    f"level {l3} of W^{a3}", loc)
            l3 = int(l3)
            if l3 < 0:
                if any(scal(t, loc) for t in vals):
                    raise InstanceError(f"lower truncation violated: output level {l3}", loc)
                continue
            if l3 > spaces[a3].truncation:
                raise InstanceError(f"output level {l3} is beyond the truncation of W^{a3}", loc)
            d3 = spaces[a3].dim(l3)
            if len(vals) != d3:
                raise InstanceError(f"expected {d3} output coefficients, got {len(vals)}", loc)
            vec = tuple(scal(t, loc) for t in vals)
            if (l1, i1, l2, i2) in tab.entries and l3 in tab.entries[(l1, i1, l2, i2)]:
                raise InstanceError("duplicate table entry", loc)
            if any(vec):
                tab.entries.setdefault((l1, i1, l2, i2), {})[l3] = vec
        inst.intertwiners.setdefault(key, []).append(tab)
    for a1 in colors:
        for a2 in colors:
            for a3 in colors:
                n = calg.N(a1, a2, a3)
                have = len(inst.intertwiners.get((a1, a2, a3), []))
                if n != have:
                    raise InstanceError(
                        f"dim V({a1},{a2};{a3}) = {n} but {have} basis tables are declared",
                        f"[intertwiner {a1} {a2} -> {a3}]")
                inst.intertwiners.get((a1, a2, a3), []).sort(key=lambda t: t.index)
    # F blocks
    for (a1, a2, a3, a4), (rows, loc0) in f_raw.items():
        want_rows = inst.F_rows(a1, a2, a3, a4)
        want_cols = inst.F_cols(a1, a2, a3, a4)
        got_rows = [r for r, _, _ in rows]
        if got_rows != want_rows:
            raise InstanceError(f"F rows must be {want_rows} in this order", loc0)
        matrix = []
        for _, vals, loc in rows:
            if len(vals) != len(want_cols):
                raise InstanceError(f"expected {len(want_cols)} columns", loc)
            matrix.append([scal(t, loc) for t in vals])
        inst.F[(a1, a2, a3, a4)] = FBlock(want_rows, want_cols, matrix)
    for (a1, a2, a3, a4) in _quadruples(inst):
        if (a1, a2, a3, a4) not in inst.F and inst.F_rows(a1, a2, a3, a4):
            raise InstanceError(f"missing F block for ({a1},{a2},{a3};{a4})", "[F]")
    # Omega blocks
    for (a1, a2, a3), (rows, loc0) in omega_raw.items():
        n_in, n_out = calg.N(a1, a2, a3), calg.N(a2, a1, a3)
        if [r for r, _, _ in rows] != list(range(1, n_in + 1)):
            raise InstanceError(f"Omega rows must be 1..{n_in}", loc0)
        matrix = []
        for _, vals, loc in rows:
            if len(vals) != n_out:
                raise InstanceError(f"expected {n_out} columns", loc)
            matrix.append([scal(t, loc) for t in vals])
        inst.Omega[(a1, a2, a3)] = matrix
    for a1 in colors:
        for a2 in colors:
            for a3 in colors:
                if calg.N(a1, a2, a3) and (a1, a2, a3) not in inst.Omega:
                    raise InstanceError(f"missing Omega block for ({a1},{a2};{a3})", "[Omega]")
    # G basis
    for key, els in gbasis.items():
        if len({el.coset() for el in els}) != len(els):
            raise InstanceError(f"gbasis elements for {key} share a coset triple", "[gbasis]")
        inst.gbasis[key] = els
    _check_invertible(inst)
    from ioalg.checkers import omega_warnings

    inst.warnings.extend(omega_warnings(inst))
    return inst


def _quadruples(inst):
    cs = inst.colors.colors
    for a1 in cs:
        for a2 in cs:
            for a3 in cs:
                for a4 in cs:
                    yield a1, a2, a3, a4


def _check_invertible(inst: AlgebraInstance):
    from ioalg.linalg import Matrix

    for key, blk in inst.F.items():
        m = Matrix(blk.matrix, inst.order)
        if not m.is_square() or m.rank() != m.nrows:
            raise InstanceError(f"F block {key} is not invertible", "[F]")
    for key, mat in inst.Omega.items():
        m = Matrix(mat, inst.order)
        if not m.is_square() or m.rank() != m.nrows:
            raise InstanceError(f"Omega block {key} is not invertible", "[Omega]")


def load_instance(path) -> AlgebraInstance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text, path.stem)


# ---------------------------------------------------------------------------
# writing


def _fmt_frac(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def save_text(inst: AlgebraInstance) -> str:
    cs = inst.colors.colors
    out = ["[meta]", f"name = {inst.name}", "", "[field]", f"order = {inst.order}", "",
           "[colors]", f"identity = {inst.e}", f"colors = {' '.join(cs)}", "", "[fusion]"]
    for a1 in cs:
        for a2 in cs:
            for a3 in cs:
                n = inst.N(a1, a2, a3)
                if n:
                    out.append(f"{a1} {a2} -> {a3} : {n}")
    out += ["", "[weights]"]
    out += [f"{c} = {_fmt_frac(inst.weight(c))}" for c in cs]
    out += ["", "[dims]"]
    for c in cs:
        sp = inst.spaces[c]
        tr = "inf" if sp.truncation == INF else str(sp.truncation)
        out.append(f"{c} : levels = {','.join(str(d) for d in sp.dims)} ; truncation = {tr}")
    out += ["", "[vacuum]"]
    d0 = inst.spaces[inst.e].dim(0)
    out.append("level 0 : " + " ; ".join(format_cyclo(as_cyclo(inst.vacuum.comps.get((0, k), 0),
                                                                 inst.order)) for k in range(d0)))
    out += ["", "[virasoro]", f"c = {format_cyclo(inst.central_charge)}"]
    if inst.omega is None:
        out.append("omega = none")
    else:
        d2 = inst.spaces[inst.e].dim(2)
        if d2 == 0:
            out.append("omega = 0")
        else:
            out.append("omega = level 2 : " + " ; ".join(
                format_cyclo(as_cyclo(inst.omega.comps.get((2, k), 0), inst.order))
                for k in range(d2)))
    for tab in inst.all_tables():
        out += ["", f"[intertwiner {tab.a1} {tab.a2} -> {tab.a3} # {tab.index}]"]
        for (l1, i1, l2, i2) in sorted(tab.entries):
            for l3 in sorted(tab.entries[(l1, i1, l2, i2)]):
                vec = tab.entries[(l1, i1, l2, i2)][l3]
                n = mode_for(inst, tab.a1, l1, tab.a2, l2, tab.a3, l3)
                out.append(f"n={_fmt_frac(n)} w1={l1}.{i1} w2={l2}.{i2} : "
                           + " ; ".join(format_cyclo(c) for c in vec))
    for key in sorted(inst.F, key=inst._color_key):
        blk = inst.F[key]
        out += ["", f"[F {key[0]} {key[1]} {key[2]} ; {key[3]}]"]
        for (a5, i, j), row in zip(blk.rows, blk.matrix):
            out.append(f"{a5} {i} {j} : " + " ; ".join(format_cyclo(c) for c in row))
    for key in sorted(inst.Omega, key=inst._color_key):
        out += ["", f"[Omega {key[0]} {key[1]} ; {key[2]}]"]
        for i, row in enumerate(inst.Omega[key], 1):
            out.append(f"{i} : " + " ; ".join(format_cyclo(c) for c in row))
    for key in sorted(inst.gbasis, key=inst._color_key):
        out += ["", f"[gbasis {' '.join(key)}]"]
        for el in inst.gbasis[key]:
            out.append(f"{el.label} : {_fmt_frac(el.a)} {_fmt_frac(el.b)} {_fmt_frac(el.c)}")
    return "\n".join(out) + "\n"


def save_instance(inst: AlgebraInstance, path) -> None:
    Path(path).write_text(save_text(inst), encoding="utf-8")
