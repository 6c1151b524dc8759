import json

import pytest
from click.testing import CliRunner

from ioalg import cli
from ioalg.algdata import save_text
from ioalg.cli import AggregateReport, main


@pytest.fixture
def files(tmp_path, instances):
    out = {}
    for name, inst in instances.items():
        p = tmp_path / f"{name}.ioa"
        p.write_text(save_text(inst))
        out[name] = p
    return out


def run(*args, env=None):
    return CliRunner().invoke(main, [str(a) for a in args], env=env)


def test_validate(files, tmp_path):
    assert run("validate", files["Z2"]).exit_code == 0
    text = files["Z2"].read_text().replace("0 1 -> 1 : 1\n", "0 1 -> 1 : 1\n0 1 -> 0 : 1\n")
    bad = tmp_path / "asym.ioa"
    bad.write_text(text)
    res = run("validate", bad)
    assert res.exit_code == 2 and "[fusion]" in res.output
    bad.write_text("junk\n" + files["Z2"].read_text())
    res = run("validate", bad)
    assert res.exit_code == 2 and "line 1" in res.output
    assert run("validate", tmp_path / "missing.ioa").exit_code == 2


def test_check_exit_codes(files, tmp_path, instances):
    assert run("check", files["trivial"]).exit_code == 0
    # Z2 fails one generalized-Jacobi channel (see the decisions ledger)
    res = run("check", files["Z2"], "-s", "ioa", "-s", "pentagon", "-s", "hexagon")
    assert res.exit_code == 0
    text = files["trivial"].read_text().replace("e 1 1 : 1", "e 1 1 : -1")
    bad = tmp_path / "bad.ioa"
    bad.write_text(text)
    res = run("check", bad, "--format", "json")
    assert res.exit_code == 1
    agg = json.loads(res.output)
    fails = [r for s in agg["suites"] for r in s["results"] if r["status"] == "fail"]
    assert fails and all(r["witness"] for r in fails)


def test_internal_error_exit_code(files, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "run_suites", boom)
    res = run("check", files["trivial"])
    assert res.exit_code == 3 and "internal error" in res.output


def test_fail_fast_stops_early(files):
    res = run("check", files["Z3"], "--fail-fast", "--format", "json", "-s", "hexagon",
              "-s", "pentagon")
    assert res.exit_code == 1
    assert [s["suite"] for s in json.loads(res.output)["suites"]] == ["pentagon", "hexagon"]
    res = run("check", files["Z3"], "--fail-fast", "--format", "json")
    assert json.loads(res.output)["suites"][-1]["suite"] == "hexagon"


def test_window_option_and_env(files):
    res = run("check", files["trivial"], "--format", "json", "-s", "voa",
              env={cli.WINDOW_ENV: "3"})
    assert json.loads(res.output)["window"] == 3
    res = run("check", files["trivial"], "-w", "5", "--format", "json", "-s", "voa")
    assert json.loads(res.output)["window"] == 5
    assert run("check", files["trivial"], "-w", "0").exit_code == 2
    assert run("check", files["trivial"], env={cli.WINDOW_ENV: "x"}).exit_code == 2
    assert run("check", files["trivial"], "-s", "nope").exit_code == 2


def test_json_round_trip(files):
    res = run("check", files["Z2"], "--format", "json", "-w", "4")
    agg = AggregateReport.from_json(res.output)
    assert agg.to_json() == res.output.rstrip("\n")
    assert not agg.ok


def test_jobs_do_not_change_the_report(files):
    one = run("check", files["Z3"], "--format", "json", "-w", "4", "-j", "1").output
    many = run("check", files["Z3"], "--format", "json", "-w", "4", "-j", "3").output
    assert one == many


def test_derive_braiding(files, tmp_path):
    res = run("derive-braiding", files["trivial"])
    assert res.exit_code == 0 and "e 1 1 : 1" in res.output
    out = tmp_path / "z2b.ioa"
    res = run("derive-braiding", files["Z2"], "--out", out)
    assert res.exit_code == 0
    assert "[B 1 1 0 ; 0]" in res.output and "1 1 1 : z(2,8)" in res.output
    assert run("validate", out).exit_code == 0
    assert "# [B 1 1 0 ; 0]" in out.read_text()
    sing = tmp_path / "sing.ioa"
    sing.write_text(files["Z2"].read_text().replace("0 1 1 : -1", "0 1 1 : 0"))
    assert run("derive-braiding", sing).exit_code == 2


def test_gen_example(tmp_path):
    out = tmp_path / "t.ioa"
    assert run("gen-example", "trivial", "--out", out).exit_code == 0
    assert run("validate", out).exit_code == 0
    res = run("gen-example", "abelian", "Z2", "q=1/4")
    assert res.exit_code == 0 and "1 = 1/4" in res.output
    res = run("gen-example", "abelian", "Z2xZ2", "q=1/4,1/4", "truncation=0", "name=K")
    assert res.exit_code == 0 and "name = K" in res.output
    for bad in (["abelian", "Z2"], ["abelian", "Q2", "q=1"], ["abelian", "Z2", "q=x"],
                ["abelian", "Z2", "q=1/4", "order=4"], ["abelian", "Z2", "q=1/4", "foo=1"],
                ["trivial", "x=1"]):
        assert run("gen-example", *bad).exit_code == 2, bad
