"""Command-line front end: ``ioalg validate | check | derive-braiding | gen-example``."""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import click

from ioalg.algdata import InstanceError, load_instance, parse_instance, save_text
from ioalg.checkers import (DEFAULT_WINDOW, CheckReport, check_intertwiner, check_ioa_axioms,
                            check_module, check_skew_symmetry_voa, check_voa)

SUITES = ("voa", "module", "intertwiner", "ioa", "pentagon", "hexagon", "jacobi",
          "duality-formal")
EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3
WINDOW_ENV = "IOALG_WINDOW"


# ---------------------------------------------------------------------------
# aggregate report


@dataclass
class AggregateReport:
    instance: str
    window: int
    reports: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    def to_dict(self):
        return {"instance": self.instance, "window": self.window,
                "status": "pass" if self.ok else "fail",
                "suites": [r.to_dict() for r in self.reports]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["instance"], d["window"], [CheckReport.from_dict(r) for r in d["suites"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AggregateReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        parts = [r.to_text() for r in self.reports]
        parts.append(f"overall {'PASS' if self.ok else 'FAIL'}")
        return "\n\n".join(parts)


# ---------------------------------------------------------------------------
# suite tasks: each suite splits into a fixed list of units; units run anywhere
# and are merged back in list order, so the report does not depend on --jobs.

_CACHE = {}


def _instance(text: str, name: str):
    key = (name, text)
    if key not in _CACHE:
        _CACHE.clear()
        _CACHE[key] = parse_instance(text, name)
    return _CACHE[key]


def suite_units(inst, suite: str) -> list:
    if suite == "module":
        return list(inst.colors.colors)
    if suite == "intertwiner":
        return [t.ref for t in inst.all_tables()]
    if suite in ("jacobi", "duality-formal"):
        from ioalg.jacobi import quadruples

        return quadruples(inst)
    return [None]


def run_unit(inst, suite: str, unit, window: int) -> list:
    """AxiomResults of one unit (without the per-suite analytic-convergence record)."""
    if suite == "voa":
        rep = check_voa(inst, window)
        rep.extend(check_skew_symmetry_voa(inst, window))
    elif suite == "module":
        rep = check_module(inst, unit, window)
    elif suite == "intertwiner":
        rep = check_intertwiner(inst, unit, window)
    elif suite == "ioa":
        rep = check_ioa_axioms(inst, window)
    elif suite == "pentagon":
        from ioalg.msdata import check_pentagon

        rep = check_pentagon(inst, window)
    elif suite == "hexagon":
        from ioalg.msdata import check_hexagons

        rep = check_hexagons(inst, window)
    elif suite == "jacobi":
        from ioalg.jacobi import jacobi_quadruple

        return jacobi_quadruple(inst, unit, window)
    elif suite == "duality-formal":
        from ioalg.jacobi import duality_quadruple

        return duality_quadruple(inst, unit, window)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return [r for r in rep.results if r.axiom != "analytic-convergence"]


def _worker(args):
    text, name, suite, unit, window = args
    return [r.to_dict() for r in run_unit(_instance(text, name), suite, unit, window)]


def run_suites(inst, suites, window: int, jobs: int = 1, fail_fast: bool = False
               ) -> AggregateReport:
    from ioalg.checkers import AxiomResult

    text = save_text(inst)
    agg = AggregateReport(inst.name, window)
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for suite in suites:
            units = suite_units(inst, suite)
            rep = CheckReport.new(suite, inst.name, window)
            if pool is None:
                for u in units:
                    rep.results.extend(run_unit(inst, suite, u, window))
            else:
                tasks = [(text, inst.name, suite, u, window) for u in units]
                for chunk in pool.map(_worker, tasks):
                    rep.results.extend(AxiomResult.from_dict(d) for d in chunk)
            agg.reports.append(rep.finish())
            if fail_fast and not rep.ok:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return agg


# ---------------------------------------------------------------------------
# commands


def _default_window() -> int:
    raw = os.environ.get(WINDOW_ENV)
    if raw is None:
        return DEFAULT_WINDOW
    try:
        w = int(raw)
    except ValueError:
        raise click.UsageError(f"{WINDOW_ENV} must be an integer, got {raw!r}")
    return w


def _load(path):
    try:
        return load_instance(path)
    except InstanceError as exc:
        click.echo(f"invalid instance: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_INVALID)


@click.group()
def main():
    """Exact truncated verification of intertwining operator algebra axioms."""


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
def validate(path):
    """Load PATH and run the structural validation only."""
    inst = _load(path)
    for w in inst.warnings:
        click.echo(f"warning: {w}")
    click.echo(f"{inst.name}: valid ({len(inst.colors.colors)} colors, order {inst.order})")
    sys.exit(EXIT_PASS)


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--window", "-w", type=click.IntRange(min=1), default=None,
              help=f"Window bound W (default ${WINDOW_ENV} or {DEFAULT_WINDOW}).")
@click.option("--suite", "-s", "suites", multiple=True, type=click.Choice(SUITES),
              help="Suite to run (repeatable; default all).")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--fail-fast", is_flag=True, help="Stop after the first failing suite.")
@click.option("--jobs", "-j", type=click.IntRange(min=1), default=1)
def check(path, window, suites, fmt, fail_fast, jobs):
    """Run verification suites on the instance at PATH."""
    if window is None:
        window = _default_window()
        if window < 1:
            raise click.UsageError("window must be >= 1")
    inst = _load(path)
    selected = [s for s in SUITES if s in suites] if suites else list(SUITES)
    try:
        agg = run_suites(inst, selected, window, jobs, fail_fast)
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    click.echo(agg.to_json() if fmt == "json" else agg.to_text())
    sys.exit(EXIT_PASS if agg.ok else EXIT_FAIL)


@main.command("derive-braiding")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None,
              help="Write a copy of the instance with the B blocks appended as comments.")
@click.option("--inverse", is_flag=True, help="Use Omega^{-1} in place of Omega.")
def derive_braiding_cmd(path, out, inverse):
    """Print the braiding matrices B = F^-1 (Omega (x) 1) F."""
    from ioalg.linalg import SingularMatrixError
    from ioalg.msdata import derive_braiding, format_blocks

    inst = _load(path)
    try:
        blocks = derive_braiding(inst, inverse)
    except SingularMatrixError as exc:
        click.echo(f"cannot derive braiding: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    text = format_blocks(blocks)
    click.echo(text)
    if out:
        body = save_text(inst) + "\n# derived braiding matrices\n" + "".join(
            f"# {line}\n" for line in text.splitlines())
        with open(out, "w") as fh:
            fh.write(body)
    sys.exit(EXIT_PASS)


def _parse_params(params):
    out = {}
    for p in params:
        k, sep, v = p.partition("=")
        if not sep:
            if "group" in out:
                raise click.UsageError(f"unexpected parameter {p!r}")
            out["group"] = p
        else:
            out[k.strip()] = v.strip()
    return out


def _parse_group(text: str):
    parts = text.upper().replace(" ", "").split("X")
    inv = []
    for p in parts:
        p = p[1:] if p.startswith("Z") else p
        if not p.isdigit() or int(p) < 1:
            raise click.UsageError(f"bad group {text!r}; use e.g. Z2, Z2xZ4")
        inv.append(int(p))
    return tuple(inv)


@main.command("gen-example")
@click.argument("kind", type=click.Choice(["trivial", "abelian"]))
@click.argument("params", nargs=-1)
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None)
def gen_example(kind, params, out):
    """Write a generated instance: ``trivial`` or ``abelian Z4 q=1/8 [truncation=N] [order=N]``.

    For the abelian kind, q gives per-factor coefficients (comma separated) of
    the weights q(g) = sum_k q_k g_k^2.
    """
    from ioalg.examples import ExampleError, make_abelian_monomial, make_trivial_voa

    opts = _parse_params(params)
    try:
        if kind == "trivial":
            if opts:
                raise click.UsageError("trivial takes no parameters")
            inst = make_trivial_voa()
        else:
            if "group" not in opts or "q" not in opts:
                raise click.UsageError("abelian needs a group and q=..., e.g. abelian Z2 q=1/4")
            inv = _parse_group(opts.pop("group"))
            try:
                q = [Fraction(x) for x in opts.pop("q").split(",")]
            except (ValueError, ZeroDivisionError):
                raise click.UsageError("q must be a comma separated list of rationals")
            if len(q) != len(inv):
                raise click.UsageError(f"q needs {len(inv)} coefficient(s)")
            kw = {}
            if "truncation" in opts:
                t = opts.pop("truncation")
                kw["truncation"] = float("inf") if t == "inf" else int(t)
            if "order" in opts:
                kw["order"] = int(opts.pop("order"))
            name = opts.pop("name", "Z" + "xZ".join(map(str, inv)))
            if opts:
                raise click.UsageError(f"unknown parameters {sorted(opts)}")
            inst = make_abelian_monomial(invariants=inv, q=q, name=name, **kw)
    except (ExampleError, InstanceError, ValueError) as exc:
        if isinstance(exc, click.UsageError):
            raise
        raise click.UsageError(str(exc))
    text = save_text(inst)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":  # pragma: no cover
    main()
