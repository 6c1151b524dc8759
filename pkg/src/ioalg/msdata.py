"""Fusing, skew-symmetry and braiding matrices as labeled linear maps on the
double and triple coproduct index spaces; pentagon and hexagon checks.
"""

from __future__ import annotations

import itertools

from ioalg.algdata import AlgebraInstance, FBlock
from ioalg.checkers import AxiomResult, CheckReport, Witness, fmt_scalar, _Tally
from ioalg.linalg import Matrix, SingularMatrixError

# Triple spaces: for each shape, the three factors V_{x y}^{z} as positions in
# (a1, ..., a7).
TRIPLE_SHAPES = {
    "A": ((0, 5, 4), (1, 6, 5), (2, 3, 6)),
    "B": ((0, 1, 5), (5, 6, 4), (2, 3, 6)),
    "C": ((0, 6, 5), (1, 2, 6), (5, 3, 4)),
    "D": ((0, 1, 5), (5, 2, 6), (6, 3, 4)),
    "E": ((0, 5, 4), (1, 2, 6), (6, 3, 5)),
}
# Double spaces: P = V_{a1 a5}^{a4} (x) V_{a2 a3}^{a5},  I = V_{a1 a2}^{a5} (x) V_{a5 a3}^{a4}.
DOUBLE_SHAPES = {
    "P": ((0, 4, 3), (1, 2, 4)),
    "I": ((0, 1, 4), (4, 2, 3)),
}
TRIPLE_KINDS = ("F12_1", "F12_2", "F13", "F23_1", "F23_2")
DOUBLE_KINDS = ("F", "Omega1", "Omega2", "Omega3", "Omega4")


class ShapeError(ValueError):
    pass


class LinearMap:
    """Sparse linear map between labeled bases: images[dom][cod] = coefficient.

    ``domain`` fixes the enumeration order of the source basis.
    """

    def __init__(self, domain, codomain, images, order: int):
        self.domain = list(domain)
        self.codomain = list(codomain)
        self.order = order
        self.images = {d: {c: v for c, v in images.get(d, {}).items() if v} for d in self.domain}

    def apply(self, vec: dict) -> dict:
        out = {}
        for d, c in vec.items():
            for t, v in self.images.get(d, {}).items():
                out[t] = out[t] + c * v if t in out else c * v
        return {k: v for k, v in out.items() if v}

    def compose(self, first: "LinearMap") -> "LinearMap":
        """self o first (apply ``first``, then self)."""
        images = {d: self.apply(img) for d, img in first.images.items()}
        return LinearMap(first.domain, self.codomain, images, self.order)

    def __matmul__(self, other):
        return self.compose(other)

    def entry(self, d, c):
        return self.images.get(d, {}).get(c, 0)

    def first_difference(self, other: "LinearMap"):
        """First (domain label, codomain label, self entry, other entry) that differs."""
        if set(self.domain) != set(other.domain):
            raise ShapeError("maps have different domains")
        cods = sorted(set(self.codomain) | set(other.codomain))
        for d in sorted(self.domain):
            a, b = self.images.get(d, {}), other.images.get(d, {})
            for c in cods:
                x, y = a.get(c, 0), b.get(c, 0)
                if x != y:
                    return d, c, x, y
        return None

    def __eq__(self, other):
        return isinstance(other, LinearMap) and self.first_difference(other) is None

    def inverse(self) -> "LinearMap":
        """Blockwise inverse (blocks = connected components of the incidence graph)."""
        parent = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for d in self.domain:
            find(("d", d))
            for c in self.images[d]:
                parent[find(("d", d))] = find(("c", c))
        for c in self.codomain:
            find(("c", c))
        blocks = {}
        for d in self.domain:
            blocks.setdefault(find(("d", d)), ([], []))[0].append(d)
        for c in self.codomain:
            blocks.setdefault(find(("c", c)), ([], []))[1].append(c)
        images = {}
        for ds, cs in blocks.values():
            if len(ds) != len(cs):
                raise SingularMatrixError(f"non-square block {ds} -> {cs}")
            if not ds:
                continue
            m = Matrix([[self.entry(d, c) for c in cs] for d in ds], self.order).inverse()
            for i, c in enumerate(cs):
                images[c] = {d: m.rows[i][j] for j, d in enumerate(ds)}
        return LinearMap(self.codomain, self.domain, images, self.order)

    @classmethod
    def identity(cls, labels, order: int) -> "LinearMap":
        return cls(labels, labels, {d: {d: 1} for d in labels}, order)


# ---------------------------------------------------------------------------
# index spaces


def _enumerate(inst: AlgebraInstance, factors, ncolors: int):
    cs = inst.colors.colors
    out = []
    for combo in itertools.product(cs, repeat=ncolors):
        dims = [inst.N(combo[x], combo[y], combo[z]) for x, y, z in factors]
        if not all(dims):
            continue
        for idx in itertools.product(*[range(1, n + 1) for n in dims]):
            out.append(combo + idx)
    return out


def triple_space(inst: AlgebraInstance, shape: str):
    """Labels (a1..a7, i, j, k) of a triple space, in lexicographic (declared color) order."""
    return _enumerate(inst, TRIPLE_SHAPES[shape], 7)


def double_space(inst: AlgebraInstance, shape: str):
    """Labels (a1..a5, i, j) of P or I."""
    return _enumerate(inst, DOUBLE_SHAPES[shape], 5)


# ---------------------------------------------------------------------------
# block access


def f_block(inst: AlgebraInstance, a1, a2, a3, a4, F=None) -> dict:
    """{(a5, i, j): {(a, k, l): entry}} of one fusing block."""
    F = inst.F if F is None else F
    blk = F.get((a1, a2, a3, a4))
    if blk is None:
        return {}
    return {r: {c: v for c, v in zip(blk.cols, row) if v} for r, row in zip(blk.rows,
                                                                           blk.matrix)}


def omega_block(inst: AlgebraInstance, a1, a2, a3, inverse=False, Omega=None):
    """Matrix of Omega^{+-1}: V_{a1 a2}^{a3} -> V_{a2 a1}^{a3} (rows = images)."""
    Omega = inst.Omega if Omega is None else Omega
    if not inverse:
        return Omega[(a1, a2, a3)]
    return Matrix(Omega[(a2, a1, a3)], inst.order).inverse().rows


# ---------------------------------------------------------------------------
# double-space maps


def double_map(inst: AlgebraInstance, kind: str, inverse: bool = False, F=None,
               Omega=None) -> LinearMap:
    """F: P -> I; Omega1: P -> I; Omega2: I -> I; Omega3: I -> P; Omega4: P -> P.

    ``inverse`` uses Omega^{-1} in place of Omega (for F it returns F^{-1}: I -> P).
    """
    P, I = double_space(inst, "P"), double_space(inst, "I")
    images = {}
    if kind == "F":
        for lab in P:
            a1, a2, a3, a4, a5, i, j = lab
            row = f_block(inst, a1, a2, a3, a4, F).get((a5, i, j), {})
            images[lab] = {(a1, a2, a3, a4, a, k, l): v for (a, k, l), v in row.items()}
        m = LinearMap(P, I, images, inst.order)
        return m.inverse() if inverse else m
    if kind == "Omega1":
        dom, cod = P, I
        for lab in P:
            a1, a2, a3, a4, a5, i, j = lab
            om = omega_block(inst, a1, a5, a4, inverse, Omega)
            images[lab] = {(a2, a3, a1, a4, a5, j, jp + 1): v
                           for jp, v in enumerate(om[i - 1]) if v}
    elif kind == "Omega2":
        dom, cod = I, I
        for lab in I:
            a1, a2, a3, a4, a5, i, j = lab
            om = omega_block(inst, a1, a2, a5, inverse, Omega)
            images[lab] = {(a2, a1, a3, a4, a5, ip + 1, j): v
                           for ip, v in enumerate(om[i - 1]) if v}
    elif kind == "Omega3":
        dom, cod = I, P
        for lab in I:
            a1, a2, a3, a4, a5, i, j = lab
            om = omega_block(inst, a5, a3, a4, inverse, Omega)
            images[lab] = {(a3, a1, a2, a4, a5, jp + 1, i): v
                           for jp, v in enumerate(om[j - 1]) if v}
    elif kind == "Omega4":
        dom, cod = P, P
        for lab in P:
            a1, a2, a3, a4, a5, i, j = lab
            om = omega_block(inst, a2, a3, a5, inverse, Omega)
            images[lab] = {(a1, a3, a2, a4, a5, i, jp + 1): v
                           for jp, v in enumerate(om[j - 1]) if v}
    else:
        raise ShapeError(f"unknown double-space map {kind!r}")
    return LinearMap(dom, cod, images, inst.order)


# ---------------------------------------------------------------------------
# triple-space maps

_TRIPLE_SPEC = {
    # kind: (source shape, target shape)
    "F12_1": ("A", "B"),
    "F23_1": ("A", "E"),
    "F13": ("E", "C"),
    "F12_2": ("C", "D"),
    "F23_2": ("B", "D"),
}


def lift_to_triple(inst: AlgebraInstance, kind: str, inverse: bool = False, F=None) -> LinearMap:
    """Induced map of a fusing block on a triple space (see TRIPLE_SHAPES)."""
    if kind not in _TRIPLE_SPEC:
        raise ShapeError(f"unknown triple-space map {kind!r}")
    src, dst = _TRIPLE_SPEC[kind]
    dom, cod = triple_space(inst, src), triple_space(inst, dst)
    images = {}
    for lab in dom:
        a1, a2, a3, a4, a5, a6, a7, i, j, k = lab
        if kind == "F12_1":
            row = f_block(inst, a1, a2, a7, a5, F).get((a6, i, j), {})
            img = {(a1, a2, a3, a4, a5, b, a7, kk, ll, k): v for (b, kk, ll), v in row.items()}
        elif kind == "F23_1":
            row = f_block(inst, a2, a3, a4, a6, F).get((a7, j, k), {})
            img = {(a1, a2, a3, a4, a5, a6, b, i, kk, ll): v for (b, kk, ll), v in row.items()}
        elif kind == "F13":
            row = f_block(inst, a1, a7, a4, a5, F).get((a6, i, k), {})
            img = {(a1, a2, a3, a4, a5, b, a7, kk, j, ll): v for (b, kk, ll), v in row.items()}
        elif kind == "F12_2":
            row = f_block(inst, a1, a2, a3, a6, F).get((a7, i, j), {})
            img = {(a1, a2, a3, a4, a5, b, a6, kk, ll, k): v for (b, kk, ll), v in row.items()}
        else:  # F23_2
            row = f_block(inst, a6, a3, a4, a5, F).get((a7, j, k), {})
            img = {(a1, a2, a3, a4, a5, a6, b, i, kk, ll): v for (b, kk, ll), v in row.items()}
        images[lab] = img
    m = LinearMap(dom, cod, images, inst.order)
    return m.inverse() if inverse else m


def lift(inst: AlgebraInstance, kind: str, inverse: bool = False) -> LinearMap:
    if kind in TRIPLE_KINDS:
        return lift_to_triple(inst, kind, inverse)
    if kind in DOUBLE_KINDS:
        return double_map(inst, kind, inverse)
    raise ShapeError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------
# checks


def _fmt_label(lab) -> str:
    return ",".join(str(x) for x in lab)


def _compare_grouped(lhs: LinearMap, rhs: LinearMap, axiom: str, group, subject_fmt):
    """One AxiomResult per group of domain labels; entries compared exactly."""
    tallies = {}
    for d in lhs.domain:
        g = group(d)
        t = tallies.setdefault(g, _Tally(axiom, subject_fmt(g)))
        a, b = lhs.images.get(d, {}), rhs.images.get(d, {})
        for c in sorted(set(a) | set(b)):
            x, y = a.get(c, 0), b.get(c, 0)
            if x != y:
                t.fail(Witness(tuple(str(v) for v in d) + tuple(str(v) for v in c),
                               fmt_scalar(y), fmt_scalar(x),
                               f"entry {_fmt_label(d)} -> {_fmt_label(c)}; expected = right "
                               f"side, actual = left side"))
            else:
                t.ok()
        if not set(a) | set(b):
            t.ok()
    return [tallies[g].result() for g in sorted(tallies, key=lambda g: [str(x) for x in g])]


def matrix_only_note(inst: AlgebraInstance, suite: str):
    """A skipped record when some intertwiner table is empty, so the declared
    matrices cannot be tied to operators and are checked as given."""
    empty = [t for t in inst.all_tables()
             if not any(any(vec) for row in t.entries.values() for vec in row.values())]
    if not empty:
        return None
    return AxiomResult(f"{suite}-provenance", "*", "skipped",
                       f"matrix-only: {len(empty)} intertwiner table(s) carry no coefficients; "
                       f"the matrices are checked as given, not derived from operators")


def check_pentagon(inst: AlgebraInstance, window: int = 8, F=None) -> CheckReport:
    """F23^(2) o F12^(1) == F12^(2) o F13 o F23^(1) on every triple space."""
    rep = CheckReport.new("pentagon", inst, window)
    lhs = lift_to_triple(inst, "F23_2", F=F) @ lift_to_triple(inst, "F12_1", F=F)
    rhs = (lift_to_triple(inst, "F12_2", F=F) @ lift_to_triple(inst, "F13", F=F)
           @ lift_to_triple(inst, "F23_1", F=F))
    for r in _compare_grouped(lhs, rhs, "pentagon", lambda d: d[:5],
                              lambda g: f"{','.join(g[:4])};{g[4]}"):
        rep.add(r)
    if not lhs.domain:
        rep.add(AxiomResult("pentagon", "*", "skipped", "no triple space is nonzero"))
    note = matrix_only_note(inst, "pentagon")
    if note:
        rep.add(note)
    return rep.finish()


def hexagon_maps(inst: AlgebraInstance, inverse: bool):
    F = double_map(inst, "F")
    lhs = F @ double_map(inst, "Omega3", inverse) @ F
    rhs = double_map(inst, "Omega2", inverse) @ F @ double_map(inst, "Omega4", inverse)
    return lhs, rhs


def check_hexagons(inst: AlgebraInstance, window: int = 8) -> CheckReport:
    """F o Omega3 o F == Omega2 o F o Omega4, and the same with Omega^{-1}."""
    rep = CheckReport.new("hexagon", inst, window)
    for name, inverse in (("hexagon-1", False), ("hexagon-2", True)):
        try:
            lhs, rhs = hexagon_maps(inst, inverse)
        except SingularMatrixError as exc:
            rep.add(AxiomResult(name, "*", "fail", "", Witness((), "invertible", "singular",
                                                               str(exc))))
            continue
        for r in _compare_grouped(lhs, rhs, name, lambda d: d[:4],
                                  lambda g: f"{','.join(g[:3])};{g[3]}"):
            rep.add(r)
    note = matrix_only_note(inst, "hexagon")
    if note:
        rep.add(note)
    return rep.finish()


def derive_braiding(inst: AlgebraInstance, inverse: bool = False):
    """B = F^{-1} o Omega2 o F : P -> P, returned as {(a1,a2,a3,a4): FBlock}.

    Block (a1, a2, a3; a4) has rows (a5, i, j) of P(a1, a2, a3; a4) and columns
    (a, k, l) of P(a2, a1, a3; a4).
    """
    F = double_map(inst, "F")
    B = F.inverse() @ double_map(inst, "Omega2", inverse) @ F
    blocks = {}
    for lab in B.domain:
        a1, a2, a3, a4 = lab[:4]
        key = (a1, a2, a3, a4)
        if key not in blocks:
            rows = inst.F_rows(a1, a2, a3, a4)
            cols = inst.F_rows(a2, a1, a3, a4)
            blocks[key] = FBlock(rows, cols, [[inst.zero()] * len(cols) for _ in rows])
        blk = blocks[key]
        r = blk.rows.index(lab[4:])
        for c, v in B.images[lab].items():
            if tuple(c[:4]) != (a2, a1, a3, a4):
                raise ShapeError(f"braiding maps {lab} outside P({a2},{a1},{a3};{a4})")
            blk.matrix[r][blk.cols.index(c[4:])] = v
    return blocks


def braiding_map(inst: AlgebraInstance, inverse: bool = False) -> LinearMap:
    F = double_map(inst, "F")
    return F.inverse() @ double_map(inst, "Omega2", inverse) @ F


def format_blocks(blocks: dict, title: str = "B") -> str:
    out = []
    for key in sorted(blocks):
        blk = blocks[key]
        out.append(f"[{title} {key[0]} {key[1]} {key[2]} ; {key[3]}]")
        out.append("# columns: " + " ; ".join(f"{a} {k} {l}" for a, k, l in blk.cols))
        for (a5, i, j), row in zip(blk.rows, blk.matrix):
            out.append(f"{a5} {i} {j} : " + " ; ".join(fmt_scalar(c) for c in row))
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# abelian (all blocks 1x1) scalar forms


def scalar_F(inst, a1, a2, a3):
    """The 1x1 fusing scalar for (a1, a2, a3; a1+a2+a3) in a pointed instance."""
    a4 = _fuse(inst, _fuse(inst, a1, a2), a3)
    blk = inst.F[(a1, a2, a3, a4)]
    return blk.matrix[0][0]


def scalar_Omega(inst, a1, a2):
    return inst.Omega[(a1, a2, _fuse(inst, a1, a2))][0][0]


def _fuse(inst, a, b):
    out = [c for c in inst.colors.colors if inst.N(a, b, c)]
    if len(out) != 1 or inst.N(a, b, out[0]) != 1:
        raise ShapeError("not a pointed (group-like) fusion rule")
    return out[0]


def abelian_pentagon_defects(inst: AlgebraInstance):
    """(a1, a2, a3, a4) where the scalar form of the pentagon fails:
    F(a1,a2,a3+a4) F(a1+a2,a3,a4) = F(a2,a3,a4) F(a1,a2+a3,a4) F(a1,a2,a3).
    """
    cs = inst.colors.colors
    bad = []
    for a1, a2, a3, a4 in itertools.product(cs, repeat=4):
        a34 = _fuse(inst, a3, a4)
        a23 = _fuse(inst, a2, a3)
        a12 = _fuse(inst, a1, a2)
        lhs = scalar_F(inst, a1, a2, a34) * scalar_F(inst, a12, a3, a4)
        rhs = scalar_F(inst, a2, a3, a4) * scalar_F(inst, a1, a23, a4) * scalar_F(inst, a1, a2, a3)
        if lhs != rhs:
            bad.append((a1, a2, a3, a4))
    return bad


def abelian_hexagon_defects(inst: AlgebraInstance, inverse: bool = False):
    """(a1, a2, a3) where F(a1,a2,a3) W(a1+a2,a3) F(a3,a1,a2) != W(a2,a3) F(a1,a3,a2) W(a1,a3),
    with W = Omega (or Omega^{-1} read from the transposed channel)."""
    cs = inst.colors.colors

    def W(a, b):
        if not inverse:
            return scalar_Omega(inst, a, b)
        return scalar_Omega(inst, b, a).inverse()

    bad = []
    for a1, a2, a3 in itertools.product(cs, repeat=3):
        a12 = _fuse(inst, a1, a2)
        lhs = scalar_F(inst, a1, a2, a3) * W(a12, a3) * scalar_F(inst, a3, a1, a2)
        rhs = W(a2, a3) * scalar_F(inst, a1, a3, a2) * W(a1, a3)
        if lhs != rhs:
            bad.append((a1, a2, a3))
    return bad
