"""Axiom checks for vertex operator algebras, modules and intertwining operators at
finite truncation; skew-symmetry and the Omega_r operation; check reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from ioalg.algdata import (AlgebraInstance, OperatorTable, TruncationError, Vec,
                           intertwiner_apply, iterate_pairing, output_level, product_pairing)
from ioalg.exactnum import CycloNumber, OrderInsufficientError, format_cyclo, phase
from ioalg.linalg import SingularMatrixError, solve_combination
from ioalg.series import (INF, FormalSeries, NonSummableError, Window, delta_two_summand,
                          derivative, frac, s_mul, s_sub, series_equal_on)

STATUSES = ("pass", "fail", "skipped")
ANALYTIC_REASON = ("out of scope: absolute convergence of products and iterates is an "
                   "analytic property; only formal identities are checked")
DEFAULT_WINDOW = 8
VIRASORO_BOUND = 3


# ---------------------------------------------------------------------------
# reports


def fmt_scalar(c) -> str:
    if isinstance(c, CycloNumber):
        return format_cyclo(c)
    return str(c)


def fmt_value(v) -> str:
    if isinstance(v, Vec):
        if not v:
            return "0"
        return "{" + ", ".join(f"{l}.{i}: {fmt_scalar(c)}"
                               for (l, i), c in sorted(v.comps.items())) + "}"
    return fmt_scalar(v)


@dataclass
class Witness:
    exponents: tuple
    expected: str
    actual: str
    context: str = ""

    def to_dict(self):
        return {"exponents": [str(e) for e in self.exponents], "expected": self.expected,
                "actual": self.actual, "context": self.context}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["exponents"]), d["expected"], d["actual"], d.get("context", ""))


@dataclass
class AxiomResult:
    axiom: str
    subject: str
    status: str
    reason: str = ""
    witness: Witness | None = None
    checked: int = 0
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fail" and self.witness is None:
            raise ValueError("a failing result needs a witness")

    def to_dict(self):
        return {"axiom": self.axiom, "subject": self.subject, "status": self.status,
                "reason": self.reason, "checked": self.checked,
                "data": {k: str(v) for k, v in self.data.items()},
                "witness": self.witness.to_dict() if self.witness else None}

    @classmethod
    def from_dict(cls, d):
        w = d.get("witness")
        return cls(d["axiom"], d["subject"], d["status"], d.get("reason", ""),
                   Witness.from_dict(w) if w else None, d.get("checked", 0),
                   dict(d.get("data", {})))

    def line(self) -> str:
        head = f"  {self.status.upper():8s} {self.axiom} [{self.subject}]"
        if self.status == "fail":
            w = self.witness
            ctx = f" ({w.context})" if w.context else ""
            return (f"{head} at ({', '.join(str(e) for e in w.exponents)}): "
                    f"expected {w.expected}, actual {w.actual}{ctx}")
        extra = "".join(f" {k}={v}" for k, v in sorted(self.data.items()))
        if self.status == "skipped":
            return f"{head}: {self.reason}"
        note = f"; {self.reason}" if self.reason else ""
        return f"{head} (checked {self.checked}{extra}{note})"


@dataclass
class CheckReport:
    suite: str
    instance: str
    window: int
    results: list = field(default_factory=list)

    @classmethod
    def new(cls, suite, instance, window) -> "CheckReport":
        name = instance.name if isinstance(instance, AlgebraInstance) else str(instance)
        return cls(suite, name, window, [])

    @property
    def ok(self) -> bool:
        return all(r.status != "fail" for r in self.results)

    def failures(self):
        return [r for r in self.results if r.status == "fail"]

    def add(self, result: AxiomResult) -> None:
        self.results.append(result)

    def extend(self, other: "CheckReport") -> None:
        for r in other.results:
            if r.axiom == "analytic-convergence":
                continue
            self.results.append(r)

    def finish(self) -> "CheckReport":
        """Append the out-of-scope record (once) and return self."""
        if not any(r.axiom == "analytic-convergence" for r in self.results):
            self.results.append(AxiomResult("analytic-convergence", "*", "skipped",
                                            ANALYTIC_REASON))
        return self

    def to_dict(self):
        return {"suite": self.suite, "instance": self.instance, "window": self.window,
                "status": "pass" if self.ok else "fail",
                "results": [r.to_dict() for r in self.results]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["suite"], d["instance"], d["window"],
                   [AxiomResult.from_dict(r) for r in d["results"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        head = (f"suite {self.suite}  instance {self.instance}  window {self.window}  "
                f"{'PASS' if self.ok else 'FAIL'}")
        return "\n".join([head] + [r.line() for r in self.results])


class _Tally:
    """Accumulates one axiom's outcome over many cases."""

    def __init__(self, axiom, subject):
        self.axiom = axiom
        self.subject = subject
        self.checked = 0
        self.witness = None
        self.skips = 0
        self.skip_reason = ""
        self.data = {}

    def ok(self, n=1):
        self.checked += n

    def fail(self, witness: Witness):
        self.checked += 1
        if self.witness is None:
            self.witness = witness

    def skip(self, reason: str):
        self.skips += 1
        self.skip_reason = self.skip_reason or reason

    def result(self) -> AxiomResult:
        if self.witness is not None:
            return AxiomResult(self.axiom, self.subject, "fail", "", self.witness,
                               self.checked, self.data)
        if self.checked:
            reason = (f"{self.skips} case(s) beyond the truncation skipped: {self.skip_reason}"
                      if self.skips else "")
            return AxiomResult(self.axiom, self.subject, "pass", reason, None, self.checked,
                               self.data)
        return AxiomResult(self.axiom, self.subject, "skipped",
                           self.skip_reason or "no certified cases", None, 0, self.data)


def table_subject(t: OperatorTable) -> str:
    return f"Y[{t.a1},{t.a2};{t.a3}]#{t.index}"


# ---------------------------------------------------------------------------
# operator helpers


def basis_upto(inst: AlgebraInstance, color, window: int):
    sp = inst.spaces[color]
    return list(sp.basis(window))


def scale_table(t: OperatorTable, c) -> OperatorTable:
    return OperatorTable(t.a1, t.a2, t.a3, t.index,
                         {k: {l: tuple(x * c for x in v) for l, v in row.items()}
                          for k, row in t.entries.items()})


def identity_scalar(inst: AlgebraInstance, table: OperatorTable):
    """lambda with Y(1, x) w = lambda w read off the first basis vector (or None)."""
    for l, i in inst.spaces[table.a2].basis():
        out = _apply_basis(inst, table, inst.vacuum, Vec.basis(table.a2, l, i, inst.one()))
        v = out.get(Fraction(0))
        return v.comps.get((l, i)) if v is not None else None
    return None


def _apply_basis(inst, table, v1: Vec, v2: Vec):
    s = intertwiner_apply(inst, table, v1, v2)
    return {k[0]: v for k, v in s.terms.items()}


def module_action(inst: AlgebraInstance, color) -> OperatorTable:
    """The action of W^e on W^color, normalized so that Y(1, x) = id."""
    t = inst.module_operator(color)
    lam = identity_scalar(inst, t)
    if lam and lam != inst.one():
        return scale_table(t, lam.inverse())
    return t


def apply_mode(inst: AlgebraInstance, table: OperatorTable, v1: Vec, v2: Vec, n) -> Vec:
    """The mode 𝒴_n(v1) v2; raises TruncationError when the output level is uncertified."""
    sp3 = inst.spaces[table.a3]
    out = Vec(table.a3)
    for (l1, i1), c1 in v1.comps.items():
        for (l2, i2), c2 in v2.comps.items():
            l3 = output_level(inst, table.a1, l1, table.a2, l2, table.a3, n)
            if l3.denominator != 1 or l3 < 0:
                continue
            l3 = int(l3)
            if l3 > sp3.truncation:
                raise TruncationError(f"level {l3} of W^{table.a3} is beyond truncation")
            vec = table.output(l1, i1, l2, i2, l3)
            if vec is None:
                continue
            out = out + Vec(table.a3, {(l3, k): c * c1 * c2 for k, c in enumerate(vec) if c})
    return out


def virasoro_L(inst: AlgebraInstance, color, n: int, v: Vec, action=None) -> Vec:
    """L(n) v = Y_{n+1}(omega) v on W^color."""
    if inst.omega is None:
        raise TruncationError("the conformal vector lies outside the truncation")
    action = action or module_action(inst, color)
    return apply_mode(inst, action, inst.omega, v, n + 1)


def l_minus_one(inst: AlgebraInstance, color, v: Vec, action=None) -> Vec:
    return virasoro_L(inst, color, -1, v, action)


def omega_r(inst: AlgebraInstance, ref, r: int) -> OperatorTable:
    """Omega_r(𝒴)(w2, x) w1 = e^{x L(-1)} 𝒴(w1, e^{(2r+1) pi i} x) w2 as a table of type
    (a2, a1; a3).  The exponential is the finite per-level sum; a level whose
    L(-1) image lies beyond the truncation is simply not produced.
    """
    tab = ref if isinstance(ref, OperatorTable) else inst.table(ref)
    a1, a2, a3 = tab.a1, tab.a2, tab.a3
    sp3 = inst.spaces[a3]
    action = None
    out: dict = {}
    for (l1, i1, l2, i2), row in tab.entries.items():
        wt = inst.weight(a1) + l1 + inst.weight(a2) + l2
        target = out.setdefault((l2, i2, l1, i1), {})
        for l3, vec in row.items():
            if l3 > sp3.truncation:
                continue
            e = inst.weight(a3) + l3 - wt
            ph = phase((2 * r + 1) * e, inst.order)
            term = Vec(a3, {(l3, k): c * ph for k, c in enumerate(vec) if c})
            k = 0
            while term:
                lev = l3 + k
                if lev > sp3.truncation:
                    break
                dim = sp3.dim(lev)
                acc = list(target.get(lev, (inst.zero(),) * dim))
                for (l, idx), c in term.comps.items():
                    acc[idx] = acc[idx] + c
                target[lev] = tuple(acc)
                if lev + 1 > sp3.truncation:
                    break
                if action is None:
                    if inst.omega is None:
                        raise TruncationError("L(-1) on W^%s lies outside the truncation" % a3)
                    action = module_action(inst, a3)
                k += 1
                term = l_minus_one(inst, a3, term, action) * Fraction(1, k)
    clean = {}
    for key, row in out.items():
        row = {l: v for l, v in row.items() if any(v)}
        if row:
            clean[key] = row
    return OperatorTable(a2, a1, a3, tab.index, clean)


def table_coords(t: OperatorTable) -> dict:
    out = {}
    for (l1, i1, l2, i2), row in t.entries.items():
        for l3, vec in row.items():
            for k, c in enumerate(vec):
                if c:
                    out[(l1, i1, l2, i2, l3, k)] = c
    return out


def first_table_difference(inst, t1: OperatorTable, t2: OperatorTable):
    """First (sorted) entry where two tables of the same type differ, or None."""
    c1, c2 = table_coords(t1), table_coords(t2)
    for key in sorted(set(c1) | set(c2)):
        a, b = c1.get(key, inst.zero()), c2.get(key, inst.zero())
        if a != b:
            return key, a, b
    return None


def _table_witness(inst, t: OperatorTable, diff, expected_first=True) -> Witness:
    (l1, i1, l2, i2, l3, k), a, b = diff
    n = output_level(inst, t.a1, l1, t.a2, l2, t.a3, 0) - l3 - 1
    return Witness((str(n),), fmt_scalar(a if expected_first else b),
                   fmt_scalar(b if expected_first else a),
                   f"mode n={n} on inputs {l1}.{i1}, {l2}.{i2} -> component {l3}.{k}")


def express_in_basis(inst: AlgebraInstance, table: OperatorTable, a1, a2, a3):
    """Coordinates of ``table`` in the declared basis of V_{a1 a2}^{a3}, or None."""
    basis = inst.intertwiners.get((a1, a2, a3), [])
    return solve_combination([table_coords(b) for b in basis], table_coords(table), inst.order)


def omega_matrix(inst: AlgebraInstance, a1, a2, a3):
    """Rows: Omega_{-1} of each basis element of V_{a1 a2}^{a3} in the basis of V_{a2 a1}^{a3}."""
    rows = []
    for t in inst.intertwiners.get((a1, a2, a3), []):
        coords = express_in_basis(inst, omega_r(inst, t, -1), a2, a1, a3)
        if coords is None:
            return None
        rows.append(coords)
    return rows


# ---------------------------------------------------------------------------
# the three-term (Jacobi) engine


def _low(s: FormalSeries, var: str):
    lo = s.support[var][0]
    if lo == -INF:
        i = s.variables.index(var)
        lo = min((k[i] for k in s.terms), default=Fraction(0))
    return lo


def three_term(t1: FormalSeries, t2: FormalSeries, t3: FormalSeries, W: int):
    """Compare  x0^-1 d((x1-x2)/x0) t1 - x0^-1 d((x2-x1)/-x0) t2  with
    x2^-1 d((x1-x0)/x2) t3  coefficient-wise on the certified part of [-W, W]^3.

    t1, t2 are series in (x1, x2), t3 in (x0, x2).  Returns
    (witness key or None, expected, actual, number of coefficients compared).
    """
    hi2 = math.floor(W - _low(t1, "x2"))
    hi1 = math.floor(W - _low(t2, "x1"))
    hi0 = math.floor(W - _low(t3, "x0"))
    d1 = delta_two_summand(("x1", -1, "x2"), "x0",
                           Window({"x0": (-W, W), "x2": (0, hi2)}), 1)
    d2 = delta_two_summand(("x2", -1, "x1"), "x0",
                           Window({"x0": (-W, W), "x1": (0, hi1)}), -1)
    d3 = delta_two_summand(("x1", -1, "x0"), "x2",
                           Window({"x1": (-W, W), "x0": (0, hi0)}), 1)
    r1, r2, r3 = s_mul(d1, t1), s_mul(d2, t2), s_mul(d3, t3)
    box = Window.box(("x0", "x1", "x2"), -W, W)
    box = box.intersect(r1.window).intersect(r2.window).intersect(r3.window)
    lhs = s_sub(r1, r2)
    key = series_equal_on(lhs, r3, box)
    degrees = set(r1.degrees or ()) | set(r2.degrees or ()) | set(r3.degrees or ())
    grid2 = r1.grid["x2"] | r2.grid["x2"] | r3.grid["x2"]
    count = 0
    if not box.is_empty(("x0", "x1", "x2")):
        (p0, p1), (q0, q1), (s0, s1) = (box.get("x0"), box.get("x1"), box.get("x2"))
        for p in range(math.ceil(p0), math.floor(p1) + 1):
            for q in range(math.ceil(q0), math.floor(q1) + 1):
                for d in degrees:
                    rr = d - p - q
                    if s0 <= rr <= s1 and frac(rr) in grid2:
                        count += 1
    if key is None:
        return None, None, None, count
    return key, r3.terms.get(key, 0), lhs.terms.get(key, 0), count


def jacobi_for(inst: AlgebraInstance, table: OperatorTable, tally: _Tally, window: int,
               actions: dict | None = None) -> None:
    """Classical Jacobi identity for an intertwiner with the module actions of W^e."""
    actions = actions if actions is not None else {}

    def act(c):
        if c not in actions:
            actions[c] = module_action(inst, c)
        return actions[c]

    y1, y2, y3 = act(table.a1), act(table.a2), act(table.a3)
    e = inst.e
    for u in basis_upto(inst, e, window):
        for b1 in basis_upto(inst, table.a1, window):
            for b2 in basis_upto(inst, table.a2, window):
                for d in basis_upto(inst, table.a3, window):
                    t1 = product_pairing(inst, y3, table, u, b1, b2, d)
                    t2 = product_pairing(inst, table, y2, b1, u, b2, d,
                                         variables=("x2", "x1")).reorder(("x1", "x2"))
                    t3 = iterate_pairing(inst, table, y1, u, b1, b2, d)
                    try:
                        key, exp, act_, n = three_term(t1, t2, t3, window)
                    except NonSummableError as exc:  # pragma: no cover - defensive
                        tally.skip(str(exc))
                        continue
                    if key is None:
                        if n:
                            tally.ok(n)
                        else:
                            tally.skip("no certified coefficients in the window")
                        continue
                    tally.fail(Witness(
                        tuple(str(x) for x in key), fmt_scalar(exp), fmt_scalar(act_),
                        f"x0^p x1^q x2^r with u={u[0]}.{u[1]}, w1={b1[0]}.{b1[1]}, "
                        f"w2={b2[0]}.{b2[1]}, dual={d[0]}.{d[1]}"))


# ---------------------------------------------------------------------------
# individual axioms


def _grading(inst, tables, subject) -> AxiomResult:
    tally = _Tally("grading", subject)
    for t in tables:
        sp3 = inst.spaces[t.a3]
        for (l1, i1, l2, i2), row in sorted(t.entries.items()):
            for l3, vec in row.items():
                bad = l3 < 0 or (l3 <= sp3.truncation and len(vec) != sp3.dim(l3))
                if bad:
                    tally.fail(Witness((str(l3),), f"dim {sp3.dim(l3) if l3 >= 0 else 0}",
                                       f"{len(vec)} components",
                                       f"{table_subject(t)} inputs {l1}.{i1}, {l2}.{i2}"))
                else:
                    tally.ok()
    if not tally.checked:
        tally.skip("no table entries")
    return tally.result()


def _lower_truncation(inst, table: OperatorTable, window) -> AxiomResult:
    """Each 𝒴(w1, x) w2 has exponents bounded below by h3 - wt1 - wt2."""
    tally = _Tally("lower-truncation", table_subject(table))
    for b1 in basis_upto(inst, table.a1, window):
        for b2 in basis_upto(inst, table.a2, window):
            s = intertwiner_apply(inst, table, Vec.basis(table.a1, *b1, inst.one()),
                                  Vec.basis(table.a2, *b2, inst.one()))
            low = inst.weight(table.a3) - inst.weight(table.a1) - b1[0] - \
                inst.weight(table.a2) - b2[0]
            bad = [k for k in sorted(s.terms) if k[0] < low]
            if bad:
                tally.fail(Witness((str(bad[0][0]),), "0", fmt_value(s.terms[bad[0]]),
                                   f"inputs {b1[0]}.{b1[1]}, {b2[0]}.{b2[1]}"))
            else:
                tally.ok()
    return tally.result()


def _identity(inst, table: OperatorTable, window, exact: bool) -> AxiomResult:
    """Y(1, x) w = lambda w (lambda = 1 when ``exact``)."""
    tally = _Tally("identity", f"W^{table.a2}")
    lam = inst.one() if exact else None
    for b in basis_upto(inst, table.a2, window):
        w = Vec.basis(table.a2, *b, inst.one())
        s = intertwiner_apply(inst, table, inst.vacuum, w)
        for k in sorted(s.terms):
            v = s.terms[k]
            if k[0] != 0:
                tally.fail(Witness((str(k[0]),), "0", fmt_value(v), f"Y(1,x) on {b[0]}.{b[1]}"))
                break
        else:
            v = s.terms.get((Fraction(0),), Vec(table.a2))
            if lam is None:
                lam = v.comps.get(b, inst.zero())
                if not lam:
                    tally.fail(Witness(("0",), "nonzero multiple of w", fmt_value(v),
                                       f"Y(1,x) on {b[0]}.{b[1]}"))
                    continue
            expect = w * lam
            if v != expect:
                tally.fail(Witness(("0",), fmt_value(expect), fmt_value(v),
                                   f"Y(1,x) on {b[0]}.{b[1]}"))
            else:
                tally.ok()
    if lam is not None and not exact:
        tally.data["lambda"] = fmt_scalar(lam)
    return tally.result()


def _creation(inst, table: OperatorTable, window, exact: bool) -> AxiomResult:
    """𝒴(w, x) 1 has no negative powers and constant term mu w (mu = 1 when ``exact``)."""
    tally = _Tally("creation", f"W^{table.a1}")
    mu = inst.one() if exact else None
    for b in basis_upto(inst, table.a1, window):
        w = Vec.basis(table.a1, *b, inst.one())
        s = intertwiner_apply(inst, table, w, inst.vacuum)
        neg = [k for k in sorted(s.terms) if k[0] < 0]
        if neg:
            tally.fail(Witness((str(neg[0][0]),), "0", fmt_value(s.terms[neg[0]]),
                               f"Y(w,x)1 for w={b[0]}.{b[1]}"))
            continue
        v = s.terms.get((Fraction(0),), Vec(table.a1))
        if mu is None:
            mu = v.comps.get(b, inst.zero())
            if not mu:
                tally.fail(Witness(("0",), "nonzero multiple of w", fmt_value(v),
                                   f"Y(w,x)1 for w={b[0]}.{b[1]}"))
                continue
        expect = w * mu
        if v != expect:
            tally.fail(Witness(("0",), fmt_value(expect), fmt_value(v),
                               f"Y(w,x)1 for w={b[0]}.{b[1]}"))
        else:
            tally.ok()
    if mu is not None and not exact:
        tally.data["mu"] = fmt_scalar(mu)
    return tally.result()


def _virasoro(inst, color, window) -> AxiomResult:
    tally = _Tally("virasoro", f"W^{color}")
    if inst.omega is None:
        tally.skip("the conformal vector lies outside the truncation")
        return tally.result()
    action = module_action(inst, color)
    c = inst.central_charge
    B = min(VIRASORO_BOUND, window)
    for b in basis_upto(inst, color, window):
        w = Vec.basis(color, *b, inst.one())
        for m in range(-B, B + 1):
            for n in range(m + 1, B + 1):
                try:
                    lhs = (virasoro_L(inst, color, m, virasoro_L(inst, color, n, w, action),
                                      action)
                           - virasoro_L(inst, color, n, virasoro_L(inst, color, m, w, action),
                                        action))
                    rhs = virasoro_L(inst, color, m + n, w, action) * (m - n)
                except TruncationError as exc:
                    tally.skip(str(exc))
                    continue
                if m + n == 0:
                    rhs = rhs + w * (c * Fraction(m ** 3 - m, 12))
                if lhs != rhs:
                    tally.fail(Witness((str(m), str(n)), fmt_value(rhs), fmt_value(lhs),
                                       f"[L({m}),L({n})] on {b[0]}.{b[1]}"))
                else:
                    tally.ok()
    return tally.result()


def _l0_grading(inst, color, window) -> AxiomResult:
    tally = _Tally("L0-grading", f"W^{color}")
    if inst.omega is None:
        tally.skip("the conformal vector lies outside the truncation")
        return tally.result()
    action = module_action(inst, color)
    for b in basis_upto(inst, color, window):
        w = Vec.basis(color, *b, inst.one())
        try:
            got = virasoro_L(inst, color, 0, w, action)
        except TruncationError as exc:
            tally.skip(str(exc))
            continue
        expect = w * (inst.weight(color) + b[0])
        if got != expect:
            tally.fail(Witness(("0",), fmt_value(expect), fmt_value(got),
                               f"L(0) on {b[0]}.{b[1]}"))
        else:
            tally.ok()
    return tally.result()


def _l_minus_one_derivative(inst, table: OperatorTable, window) -> AxiomResult:
    tally = _Tally("L-1-derivative", table_subject(table))
    if inst.omega is None:
        tally.skip("the conformal vector lies outside the truncation")
        return tally.result()
    action = module_action(inst, table.a1)
    for b1 in basis_upto(inst, table.a1, window):
        w1 = Vec.basis(table.a1, *b1, inst.one())
        try:
            lw = l_minus_one(inst, table.a1, w1, action)
        except TruncationError as exc:
            tally.skip(str(exc))
            continue
        for b2 in basis_upto(inst, table.a2, window):
            w2 = Vec.basis(table.a2, *b2, inst.one())
            rhs = derivative(intertwiner_apply(inst, table, w1, w2), "x")
            if lw:
                lhs = intertwiner_apply(inst, table, lw, w2)
            else:
                lhs = FormalSeries(("x",), {}, rhs.grid, Window(), None, None, rhs.zero)
            key = series_equal_on(lhs, rhs)
            if key is None:
                tally.ok()
            else:
                tally.fail(Witness((str(key[0]),), fmt_value(rhs.terms.get(key, 0)),
                                   fmt_value(lhs.terms.get(key, 0)),
                                   f"inputs {b1[0]}.{b1[1]}, {b2[0]}.{b2[1]}"))
    return tally.result()


def _jacobi(inst, table, window, actions=None) -> AxiomResult:
    tally = _Tally("jacobi", table_subject(table))
    jacobi_for(inst, table, tally, window, actions)
    return tally.result()


def _single_valuedness(inst, table: OperatorTable) -> AxiomResult:
    tally = _Tally("single-valuedness", table_subject(table))
    for (l1, i1, l2, i2), row in sorted(table.entries.items()):
        wt = inst.weight(table.a1) + l1 + inst.weight(table.a2) + l2
        for l3 in sorted(row):
            e = inst.weight(table.a3) + l3 - wt
            if e.denominator != 1:
                tally.fail(Witness((str(e),), "integral exponent", str(e),
                                   f"inputs {l1}.{i1}, {l2}.{i2} -> level {l3}"))
            else:
                tally.ok()
    if not tally.checked:
        tally.skip("no table entries")
    return tally.result()


# ---------------------------------------------------------------------------
# suites


def check_voa(inst: AlgebraInstance, cutoff: int = DEFAULT_WINDOW) -> CheckReport:
    rep = CheckReport.new("voa", inst, cutoff)
    Y = inst.vertex_operator()
    rep.add(_grading(inst, [Y], "V"))
    rep.add(_lower_truncation(inst, Y, cutoff))
    rep.add(_identity(inst, Y, cutoff, exact=True))
    rep.add(_creation(inst, Y, cutoff, exact=True))
    rep.add(_jacobi(inst, Y, cutoff, {inst.e: Y}))
    rep.add(_virasoro(inst, inst.e, cutoff))
    rep.add(_l0_grading(inst, inst.e, cutoff))
    rep.add(_l_minus_one_derivative(inst, Y, cutoff))
    return rep.finish()


def check_module(inst: AlgebraInstance, color, cutoff: int = DEFAULT_WINDOW) -> CheckReport:
    rep = CheckReport.new("module", inst, cutoff)
    t = inst.module_operator(color)
    rep.add(_grading(inst, [t], f"W^{color}"))
    rep.add(_identity(inst, t, cutoff, exact=False))
    r = _jacobi(inst, module_action(inst, color), cutoff)
    r.subject = f"W^{color}"
    rep.add(r)
    rep.add(_virasoro(inst, color, cutoff))
    rep.add(_l0_grading(inst, color, cutoff))
    r = _l_minus_one_derivative(inst, module_action(inst, color), cutoff)
    r.subject = f"W^{color}"
    rep.add(r)
    return rep.finish()


def check_intertwiner(inst: AlgebraInstance, ref, cutoff: int = DEFAULT_WINDOW) -> CheckReport:
    t = ref if isinstance(ref, OperatorTable) else inst.table(ref)
    rep = CheckReport.new("intertwiner", inst, cutoff)
    rep.add(_lower_truncation(inst, t, cutoff))
    rep.add(_jacobi(inst, t, cutoff))
    rep.add(_l_minus_one_derivative(inst, t, cutoff))
    return rep.finish()


def check_skew_symmetry_voa(inst: AlgebraInstance, cutoff: int = DEFAULT_WINDOW) -> CheckReport:
    """Y(u, x) v = e^{x L(-1)} Y(v, -x) u, entry by entry on the certified range."""
    rep = CheckReport.new("voa", inst, cutoff)
    Y = inst.vertex_operator()
    tally = _Tally("skew-symmetry", "V")
    try:
        other = omega_r(inst, Y, 0)
    except TruncationError as exc:
        tally.skip(str(exc))
    else:
        diff = first_table_difference(inst, Y, other)
        if diff is None:
            tally.ok(max(1, len(table_coords(Y))))
        else:
            tally.fail(_table_witness(inst, Y, diff))
    rep.add(tally.result())
    return rep.finish()


def omega_consistency(inst: AlgebraInstance, a1, a2, a3) -> AxiomResult:
    """Declared Omega matrix versus the one recomputed from Omega_{-1} on tables."""
    tally = _Tally("omega-consistency", f"{a1},{a2};{a3}")
    declared = inst.Omega.get((a1, a2, a3))
    try:
        rows = omega_matrix(inst, a1, a2, a3)
    except TruncationError as exc:
        tally.skip(str(exc))
        return tally.result()
    except (SingularMatrixError, OrderInsufficientError) as exc:
        tally.fail(Witness((), "a basis expansion", "none", str(exc)))
        return tally.result()
    if rows is None:
        tally.fail(Witness((), "element of the intertwiner space", "not in span",
                           f"Omega_-1 of V_{a1}{a2}^{a3}"))
        return tally.result()
    for i, row in enumerate(rows):
        for j, c in enumerate(row):
            d = declared[i][j] if declared is not None else inst.zero()
            if d != c:
                tally.fail(Witness((str(i + 1), str(j + 1)), fmt_scalar(c), fmt_scalar(d),
                                   f"Omega({a1},{a2};{a3}) entry; expected = recomputed"))
            else:
                tally.ok()
    return tally.result()


def omega_roundtrip(inst: AlgebraInstance, table: OperatorTable,
                    rs=(-2, -1, 0, 1)) -> AxiomResult:
    tally = _Tally("omega-roundtrip", table_subject(table))
    for r in rs:
        try:
            back = omega_r(inst, omega_r(inst, table, r), -r - 1)
        except TruncationError as exc:
            tally.skip(str(exc))
            continue
        diff = first_table_difference(inst, table, back)
        if diff is None:
            tally.ok()
        else:
            w = _table_witness(inst, table, diff)
            w.context = f"r={r}: {w.context}"
            tally.fail(w)
    return tally.result()


def check_ioa_axioms(inst: AlgebraInstance, cutoff: int = DEFAULT_WINDOW) -> CheckReport:
    rep = CheckReport.new("ioa", inst, cutoff)
    colors = inst.colors.colors
    tables = list(inst.all_tables())
    e = inst.e
    rep.add(_grading(inst, tables, "all"))
    for t in tables:
        if e in (t.a1, t.a2):
            rep.add(_single_valuedness(inst, t))
    for t in tables:
        rep.add(_lower_truncation(inst, t, cutoff))
    for a in colors:
        for t in inst.intertwiners.get((e, a, a), []):
            r = _identity(inst, t, cutoff, exact=False)
            r.subject = table_subject(t)
            rep.add(r)
        for t in inst.intertwiners.get((a, e, a), []):
            r = _creation(inst, t, cutoff, exact=False)
            r.subject = table_subject(t)
            rep.add(r)
    for a in colors:
        rep.add(_virasoro(inst, a, cutoff))
        rep.add(_l0_grading(inst, a, cutoff))
    for t in tables:
        rep.add(_l_minus_one_derivative(inst, t, cutoff))
    for key in sorted(inst.intertwiners, key=inst._color_key):
        rep.add(omega_consistency(inst, *key))
    for t in tables:
        rep.add(omega_roundtrip(inst, t))
    rep.add(AxiomResult("moore-seiberg", "*", "skipped",
                        "checked by the pentagon and hexagon suites"))
    rep.add(AxiomResult("generalized-jacobi", "*", "skipped",
                        "checked by the jacobi and duality-formal suites"))
    return rep.finish()


def omega_warnings(inst: AlgebraInstance) -> list:
    """Load-time cross-check of declared Omega matrices (messages, not errors)."""
    out = []
    for key in sorted(inst.intertwiners, key=inst._color_key):
        r = omega_consistency(inst, *key)
        if r.status == "fail":
            w = r.witness
            out.append(f"Omega {key}: declared matrix differs from the recomputed one at "
                       f"({', '.join(w.exponents)}): recomputed {w.expected}, "
                       f"declared {w.actual}")
    return out
