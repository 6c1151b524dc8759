"""Desk-scale instance generators (trivial VOA, abelian monomial instances) and
single-scalar fault injection.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from ioalg.algdata import AlgebraInstance, Vec, minimal_order, parse_instance, save_text
from ioalg.exactnum import CycloNumber, as_cyclo, format_cyclo, phase, root_of_unity


class ExampleError(ValueError):
    pass


def make_trivial_voa(name: str = "trivial") -> AlgebraInstance:
    """W = C 1, omega = 0, c = 0, Y(1, x) = id."""
    text = "\n".join([
        "[meta]", f"name = {name}",
        "[colors]", "identity = e", "colors = e",
        "[fusion]", "e e -> e : 1",
        "[weights]", "e = 0",
        "[dims]", "e : levels = 1 ; truncation = inf",
        "[vacuum]", "level 0 : 1",
        "[virasoro]", "c = 0", "omega = 0",
        "[intertwiner e e -> e # 1]", "n=-1 w1=0.0 w2=0.0 : 1",
        "[F e e e ; e]", "e 1 1 : 1",
        "[Omega e e ; e]", "1 : 1",
    ]) + "\n"
    return parse_instance(text, name)


# ---------------------------------------------------------------------------
# abelian monomial instances


@dataclass(frozen=True)
class AbelianSpec:
    """G = Z/n1 x ... x Z/nk, weights q(g), optional 2-cochain lam(g1, g2)."""

    invariants: tuple
    q: dict
    lam: dict | None = None
    truncation: object = 0
    order: int | None = None
    name: str | None = None

    def elements(self):
        return list(itertools.product(*[range(n) for n in self.invariants]))

    def add(self, g, h):
        return tuple((a + b) % n for a, b, n in zip(g, h, self.invariants))

    def label(self, g) -> str:
        return "_".join(str(x) for x in g)


def quadratic_weights(invariants, coeffs) -> dict:
    """q(g) = sum_k coeffs[k] * g_k^2 on the representatives 0 <= g_k < n_k."""
    coeffs = [Fraction(c) for c in coeffs]
    els = itertools.product(*[range(n) for n in invariants])
    return {g: sum((c * x * x for c, x in zip(coeffs, g)), Fraction(0)) for g in els}


def _delta(spec: AbelianSpec, g1, g2) -> Fraction:
    return spec.q[spec.add(g1, g2)] - spec.q[g1] - spec.q[g2]


def _carry(b, c, n) -> int:
    return (b + c - (b + c) % n) // n


def _cocycle(spec: AbelianSpec, s, order):
    """F_s(a, b, c) = prod_k zeta_{n_k}^{s_k a_k carry_k(b, c)}."""
    out = {}
    els = spec.elements()
    for a, b, c in itertools.product(els, repeat=3):
        e = CycloNumber.one(order)
        for k, n in enumerate(spec.invariants):
            p = s[k] * a[k] * _carry(b[k], c[k], n)
            if p % n:
                e = e * root_of_unity(p % n, n, order)
        out[(a, b, c)] = e
    return out


def _lam_gauge(spec: AbelianSpec, lam, order, sign):
    """(lam(a, b+c) lam(b, c) / (lam(a, b) lam(a+b, c)))^sign."""
    out = {}
    els = spec.elements()
    for a, b, c in itertools.product(els, repeat=3):
        v = (lam[(a, spec.add(b, c))] * lam[(b, c)]) / (lam[(a, b)] * lam[(spec.add(a, b), c)])
        out[(a, b, c)] = v if sign > 0 else v.inverse()
    return out


def _abelian_ok(spec: AbelianSpec, F, Om) -> bool:
    els = spec.elements()
    add = spec.add
    for a1, a2, a3, a4 in itertools.product(els, repeat=4):
        lhs = F[(a1, a2, add(a3, a4))] * F[(add(a1, a2), a3, a4)]
        rhs = F[(a2, a3, a4)] * F[(a1, add(a2, a3), a4)] * F[(a1, a2, a3)]
        if lhs != rhs:
            return False
    for inverse in (False, True):
        def W(a, b):
            return Om[(a, b)] if not inverse else Om[(b, a)].inverse()
        for a1, a2, a3 in itertools.product(els, repeat=3):
            lhs = F[(a1, a2, a3)] * W(add(a1, a2), a3) * F[(a3, a1, a2)]
            rhs = W(a2, a3) * F[(a1, a3, a2)] * W(a1, a3)
            if lhs != rhs:
                return False
    return True


def search_fusing(spec: AbelianSpec, Om: dict, lam: dict, order: int):
    """First F = F_s * (lambda gauge)^sigma satisfying pentagon and both hexagons.

    Returns (F, description) or (trivial-gauge F, None) when no candidate works.
    """
    svecs = list(itertools.product(*[range(n) for n in spec.invariants]))
    gauges = {0: None, 1: _lam_gauge(spec, lam, order, 1), -1: _lam_gauge(spec, lam, order, -1)}
    for sigma in (0, 1, -1):
        for s in svecs:
            F = _cocycle(spec, s, order)
            if gauges[sigma] is not None:
                F = {k: v * gauges[sigma][k] for k, v in F.items()}
            if _abelian_ok(spec, F, Om):
                return F, f"cocycle s={s} gauge={sigma}"
    F = solve_fusing(spec, Om, order)
    if F is not None:
        return F, "exact solve over Z/order"
    return _cocycle(spec, (0,) * len(spec.invariants), order), None


def _discrete_log(x: CycloNumber, order: int):
    for k in range(order):
        if root_of_unity(k, order, order) == x:
            return k
    return None


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _solve_prime_power(rows, rhs, n, p, k):
    """Smith reduction over the chain ring Z/p^k; one solution or None."""
    mod = p ** k
    A = [[x % mod for x in r] for r in rows]
    b = [x % mod for x in rhs]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    m = len(A)
    diag = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j]:
                    v = _valuation(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        b[t], b[i] = b[i], b[t]
        for r in A:
            r[t], r[j] = r[j], r[t]
        for r in V:
            r[t], r[j] = r[j], r[t]
        d = A[t][t]
        v = _valuation(d, p)
        unit_inv = pow(d // p ** v, -1, mod)
        # normalise pivot to p^v
        A[t] = [x * unit_inv % mod for x in A[t]]
        b[t] = b[t] * unit_inv % mod
        pv = p ** v
        for i2 in range(m):
            if i2 != t and A[i2][t]:
                f = A[i2][t] // pv
                A[i2] = [(x - f * y) % mod for x, y in zip(A[i2], A[t])]
                b[i2] = (b[i2] - f * b[t]) % mod
        for j2 in range(t + 1, n):
            if A[t][j2]:
                f = A[t][j2] // pv
                for r in A:
                    r[j2] = (r[j2] - f * r[t]) % mod
                for r in V:
                    r[j2] = (r[j2] - f * r[t]) % mod
        diag.append(pv)
    y = [0] * n
    for t, pv in enumerate(diag):
        if b[t] % pv:
            return None
        y[t] = b[t] // pv
    if any(b[t] for t in range(len(diag), m)):
        return None
    return [sum(V[i][j] * y[j] for j in range(n)) % mod for i in range(n)]


def _solve_mod(rows, rhs, n_unknowns, modulus):
    """One solution e of rows . e == rhs (mod modulus), or None (CRT over prime powers)."""
    from sympy import factorint
    from sympy.ntheory.modular import crt

    uniq = {}
    for row, b in zip(rows, rhs):
        key = tuple(x % modulus for x in row)
        if key in uniq and (uniq[key] - b) % modulus:
            return None
        uniq[key] = b % modulus
    rows, rhs = list(uniq), list(uniq.values())
    parts, mods = [], []
    for p, k in factorint(modulus).items():
        sol = _solve_prime_power(rows, rhs, n_unknowns, p, k)
        if sol is None:
            return None
        parts.append(sol)
        mods.append(p ** k)
    if not parts:
        return [0] * n_unknowns
    return [int(crt(mods, [s[i] for s in parts])[0]) for i in range(n_unknowns)]


def solve_fusing(spec: AbelianSpec, Om: dict, order: int):
    """Root-of-unity F solving pentagon and both hexagons exactly, or None.

    Writes F = zeta_order^e and solves the (linear) exponent equations modulo
    ``order``; requires every braiding scalar to be a root of unity.
    """
    logs = {k: _discrete_log(v, order) for k, v in Om.items()}
    if any(v is None for v in logs.values()):
        return None
    els = spec.elements()
    add = spec.add
    index = {t: i for i, t in enumerate(itertools.product(els, repeat=3))}
    n = len(index)
    rows, rhs = [], []

    def eq(plus, minus, b):
        row = [0] * n
        for t in plus:
            row[index[t]] += 1
        for t in minus:
            row[index[t]] -= 1
        rows.append(row)
        rhs.append(b)

    for a1, a2, a3, a4 in itertools.product(els, repeat=4):
        eq([(a1, a2, add(a3, a4)), (add(a1, a2), a3, a4)],
           [(a2, a3, a4), (a1, add(a2, a3), a4), (a1, a2, a3)], 0)
    for a1, a2, a3 in itertools.product(els, repeat=3):
        for inverse in (False, True):
            def w(a, b):
                return logs[(a, b)] if not inverse else -logs[(b, a)]
            eq([(a1, a2, a3), (a3, a1, a2)], [(a1, a3, a2)],
               w(a2, a3) + w(a1, a3) - w(add(a1, a2), a3))
    sol = _solve_mod(rows, rhs, n, order)
    if sol is None:
        return None
    F = {t: root_of_unity(sol[i], order, order) for t, i in index.items()}
    return F if _abelian_ok(spec, F, Om) else None


def abelian_text(spec: AbelianSpec) -> str:
    els = spec.elements()
    if spec.q.get(els[0], 0) != 0:
        raise ExampleError("q(0) must be 0")
    for g in els:
        if g not in spec.q:
            raise ExampleError(f"missing weight for {g}")
    lam_in = spec.lam or {}
    order = minimal_order({spec.label(g): Fraction(spec.q[g]) for g in els})
    for n in spec.invariants:
        order = math.lcm(order, n)
    for v in lam_in.values():
        if isinstance(v, CycloNumber):
            order = math.lcm(order, v.order)
    if spec.order is not None:
        if spec.order % order:
            raise ExampleError(f"order {spec.order} is not a multiple of the required {order}")
        order = spec.order
    lam = {(g1, g2): as_cyclo(lam_in.get((g1, g2), 1), order)
           for g1 in els for g2 in els}
    if any(not v for v in lam.values()):
        raise ExampleError("lambda values must be nonzero")
    Om = {}
    for g1 in els:
        for g2 in els:
            Om[(g1, g2)] = phase(-_delta(spec, g1, g2), order) * lam[(g1, g2)] / lam[(g2, g1)]
    F, how = search_fusing(spec, Om, lam, order)
    L = spec.label
    trunc = spec.truncation
    tr = "inf" if trunc == math.inf else str(trunc)
    name = spec.name or ("Z" + "xZ".join(str(n) for n in spec.invariants))
    out = ["[meta]", f"name = {name}",
           "# abelian monomial instance; F " + (how or "search failed: trivial F used"),
           "[field]", f"order = {order}",
           "[colors]", f"identity = {L(els[0])}", "colors = " + " ".join(L(g) for g in els),
           "[fusion]"]
    out += [f"{L(g1)} {L(g2)} -> {L(spec.add(g1, g2))} : 1" for g1 in els for g2 in els]
    out += ["[weights]"] + [f"{L(g)} = {Fraction(spec.q[g])}" for g in els]
    out += ["[dims]"] + [f"{L(g)} : levels = 1 ; truncation = {tr}" for g in els]
    out += ["[vacuum]", "level 0 : 1", "[virasoro]", "c = 0",
            "omega = " + ("none" if trunc != math.inf and trunc < 2 else "0")]
    for g1 in els:
        for g2 in els:
            g3 = spec.add(g1, g2)
            n = -_delta(spec, g1, g2) - 1
            out += [f"[intertwiner {L(g1)} {L(g2)} -> {L(g3)} # 1]",
                    f"n={n} w1=0.0 w2=0.0 : {format_cyclo(lam[(g1, g2)])}"]
    for a1, a2, a3 in itertools.product(els, repeat=3):
        a4 = spec.add(spec.add(a1, a2), a3)
        out += [f"[F {L(a1)} {L(a2)} {L(a3)} ; {L(a4)}]",
                f"{L(spec.add(a2, a3))} 1 1 : {format_cyclo(F[(a1, a2, a3)])}"]
    for g1 in els:
        for g2 in els:
            out += [f"[Omega {L(g1)} {L(g2)} ; {L(spec.add(g1, g2))}]",
                    f"1 : {format_cyclo(Om[(g1, g2)])}"]
    return "\n".join(out) + "\n"


def make_abelian_monomial(spec: AbelianSpec | None = None, *, invariants=None, q=None,
                          lam=None, truncation=0, order=None, name=None) -> AlgebraInstance:
    """Monomial intertwiners Y(v_g1, x) v_g2 = lam(g1, g2) x^{q(g1+g2)-q(g1)-q(g2)} v_{g1+g2}.

    ``q`` may be a dict g -> weight or a sequence of per-factor coefficients for
    the quadratic weights sum_k c_k g_k^2.
    """
    if spec is None:
        invariants = tuple(invariants)
        if not isinstance(q, dict):
            q = quadratic_weights(invariants, q)
        spec = AbelianSpec(invariants, q, lam, truncation, order, name)
    text = abelian_text(spec)
    return parse_instance(text, spec.name or "abelian")


def make_cyclic(n: int, q1, **kw) -> AlgebraInstance:
    """Z/n with q(g) = q1 * g^2 (representatives 0..n-1)."""
    return make_abelian_monomial(invariants=(n,), q=(Fraction(q1),), **kw)


def corpus():
    """The standard example corpus: name -> instance."""
    return {
        "trivial": make_trivial_voa(),
        "Z2": make_cyclic(2, Fraction(1, 4), name="Z2"),
        "Z3": make_cyclic(3, Fraction(1, 3), name="Z3"),
        "Z4": make_cyclic(4, Fraction(1, 8), name="Z4"),
    }


# ---------------------------------------------------------------------------
# fault injection


@dataclass(frozen=True)
class Fault:
    """Address of one scalar plus the perturbation.

    kind: "F" key (a1, a2, a3, a4, row, col); "Omega" key (a1, a2, a3, row, col);
    "table" key (a1, a2, a3, index, l1, i1, l2, i2, l3, k); "vacuum" key (k,);
    "weight" key (color,) with ``value`` the new weight; "central" key () with
    ``value`` the new central charge.  ``factor`` multiplies the scalar
    ("0" zeroes it); factors are given in exactnum syntax.
    """

    kind: str
    key: tuple
    factor: str = "-1"
    value: str | None = None

    def describe(self) -> str:
        what = self.value if self.value is not None else f"*({self.factor})"
        return f"{self.kind}{list(self.key)} {what}"


def copy_instance(inst: AlgebraInstance) -> AlgebraInstance:
    return parse_instance(save_text(inst), inst.name)


def inject_fault(inst: AlgebraInstance, fault: Fault) -> AlgebraInstance:
    """A copy of ``inst`` with one scalar perturbed in memory (no re-validation)."""
    from ioalg.exactnum import parse_cyclo

    out = copy_instance(inst)
    factor = parse_cyclo(fault.factor, out.order) if fault.value is None else None
    k = fault.key
    try:
        if fault.kind == "F":
            blk = out.F[tuple(k[:4])]
            blk.matrix[k[4]][k[5]] = blk.matrix[k[4]][k[5]] * factor
        elif fault.kind == "Omega":
            m = out.Omega[tuple(k[:3])]
            m[k[3]][k[4]] = m[k[3]][k[4]] * factor
        elif fault.kind == "table":
            t = out.table(tuple(k[:4]))
            l1, i1, l2, i2, l3, idx = k[4:]
            vec = list(t.entries[(l1, i1, l2, i2)][l3])
            vec[idx] = vec[idx] * factor
            t.entries[(l1, i1, l2, i2)][l3] = tuple(vec)
        elif fault.kind == "vacuum":
            c = out.vacuum.comps[(0, k[0])]
            out.vacuum = Vec(out.e, {**out.vacuum.comps, (0, k[0]): c * factor})
        elif fault.kind == "weight":
            out.spaces[k[0]].weight = Fraction(fault.value)
        elif fault.kind == "central":
            out.central_charge = parse_cyclo(fault.value, out.order)
        else:
            raise ExampleError(f"unknown fault kind {fault.kind!r}")
    except (KeyError, IndexError) as exc:
        raise ExampleError(f"bad fault address {fault.describe()}") from exc
    out.name = f"{inst.name}+fault"
    return out


def scalar_addresses(inst: AlgebraInstance):
    """All perturbable scalars, grouped by kind, in deterministic order."""
    out = {"F": [], "Omega": [], "table": [], "vacuum": []}
    for key in sorted(inst.F, key=inst._color_key):
        blk = inst.F[key]
        for r, row in enumerate(blk.matrix):
            for c, v in enumerate(row):
                if v:
                    out["F"].append(key + (r, c))
    for key in sorted(inst.Omega, key=inst._color_key):
        for r, row in enumerate(inst.Omega[key]):
            for c, v in enumerate(row):
                if v:
                    out["Omega"].append(key + (r, c))
    for t in inst.all_tables():
        for (l1, i1, l2, i2) in sorted(t.entries):
            for l3 in sorted(t.entries[(l1, i1, l2, i2)]):
                for idx, v in enumerate(t.entries[(l1, i1, l2, i2)][l3]):
                    if v:
                        out["table"].append(t.ref + (l1, i1, l2, i2, l3, idx))
    for (l, k) in sorted(inst.vacuum.comps):
        out["vacuum"].append((k,))
    return out


def fault_corpus(inst: AlgebraInstance, size: int = 24) -> list:
    """At least ``size`` distinct single-scalar faults (when the instance has enough
    scalars), spread round-robin over F, Omega, operator-table and vacuum scalars.

    Perturbations are, in order of preference: a primitive root of unity of the
    instance field, -1, zeroing (table and vacuum scalars only), then the
    non-unit factors 2, 1/2, -2, 3.
    """
    z = format_cyclo(root_of_unity(1, inst.order)) if inst.order > 2 else None
    extra = ["2", "1/2", "-2", "3"]
    base = [f for f in (z, "-1") if f]
    factors = {"F": base + extra, "Omega": base + extra,
               "table": base + ["0"] + extra, "vacuum": base + ["0"] + extra}
    addrs = scalar_addresses(inst)
    pools = {k: [Fault(k, a, f) for f in factors[k] for a in addrs[k]] for k in addrs}
    out = []
    kinds = [k for k in ("F", "Omega", "table", "vacuum") if pools[k]]
    idx = {k: 0 for k in kinds}
    while len(out) < size and any(idx[k] < len(pools[k]) for k in kinds):
        for k in kinds:
            if idx[k] < len(pools[k]) and len(out) < size:
                out.append(pools[k][idx[k]])
                idx[k] += 1
    return out


ALL_SUITES = ("voa", "module", "intertwiner", "ioa", "pentagon", "hexagon", "jacobi",
              "duality-formal")


def suite_outcomes(inst: AlgebraInstance, window: int = 8, suites=ALL_SUITES) -> dict:
    """(suite, axiom, subject) -> (status, witness dict or None)."""
    from ioalg.cli import run_suites

    agg = run_suites(inst, suites, window)
    out = {}
    for rep in agg.reports:
        for r in rep.results:
            out[(rep.suite, r.axiom, r.subject)] = (
                r.status, r.witness.to_dict() if r.witness else None)
    return out


def detections(baseline: dict, faulted: dict) -> list:
    """Checks that fail on the faulted instance and did not fail the same way before.

    Returns (suite, axiom, subject, witness) for each new failure or changed witness.
    """
    out = []
    for key, (status, wit) in sorted(faulted.items()):
        if status != "fail":
            continue
        before = baseline.get(key)
        if before is None or before[0] != "fail" or before[1] != wit:
            out.append(key + (wit,))
    return out
