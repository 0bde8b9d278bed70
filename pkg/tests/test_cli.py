import json

import pytest

from onsk.cli import ConfigError, build_parser, main, resolve
from onsk.field import format_scalar, make_params, parse_scalar, sample_params
from onsk.kmatrix import build_kkk, build_ktr
from onsk.onsager import CoidealSpec, hamiltonian
from onsk.report import Report
from onsk.spinrep import make_family


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_verify_all_bounded_family(capsys):
    rc, out, err = run(capsys, "verify", "--suite", "all", "--family", "D2",
                       "--n", "2", "--k", "1", "--kp", "1", "--seed", "7")
    assert rc == 0
    assert err == ""
    assert "checks passed" in out
    assert "fail" not in out.splitlines()[-1]


def test_verify_spectra_defaults_to_csv(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "spectra", "--family", "A",
                     "--n", "4")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,family,l,j,value,observed,expected,status"
    # middle sector multiplicities 1, 3 and 2 across j = 0, 1, 2
    middle = {}
    for line in lines[1:]:
        n, fam, l, j, value, obs, exp, status = line.split(",")
        assert status == "pass"
        if fam == "tr" and l == "2":
            middle[int(j)] = int(exp)
    assert middle == {0: 1, 1: 3, 2: 2}


def test_verify_sp4_suite(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "sp4", "--trunc", "10")
    assert rc == 0
    assert "annihilates Xi(1,1)" in out
    assert "annihilates Xi(2,2)" in out


def test_verify_json_schema(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "kmatrix", "--family", "B1",
                     "--n", "3", "--format", "json", "--seed", "2")
    assert rc == 0
    doc = json.loads(out)
    assert list(doc) == ["suite", "family", "n", "params", "checks",
                         "elapsed_ms"]
    assert doc["family"] == "B1"
    assert set(doc["params"]) == {"t", "z", "eps", "mu"}
    assert doc["checks"]
    for check in doc["checks"]:
        assert set(check) == {"name", "status", "detail"}
        assert check["status"] == "pass"


def test_verify_csv_check_table(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "defining-relations",
                     "--family", "D2", "--n", "2", "--format", "csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "name,status,detail"
    assert all(",pass," in line or line.endswith(",pass") or ",pass," in line
               for line in lines[1:])


def test_seed_determinism_and_env_override(capsys, monkeypatch):
    args = ("verify", "--suite", "defining-relations", "--family", "D2",
            "--n", "2")
    _, first, _ = run(capsys, *args, "--seed", "3")
    _, second, _ = run(capsys, *args, "--seed", "3")
    assert first == second
    monkeypatch.setenv("ONSK_SEED", "3")
    _, via_env, _ = run(capsys, *args, "--seed", "7")
    assert via_env == first
    monkeypatch.delenv("ONSK_SEED")
    _, plain7, _ = run(capsys, *args, "--seed", "7")
    assert plain7 != first


def test_json_deterministic_apart_from_timing(capsys):
    args = ("verify", "--suite", "onsager", "--family", "BT1", "--n", "3",
            "--format", "json", "--seed", "5")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    d1, d2 = json.loads(out1), json.loads(out2)
    d1.pop("elapsed_ms")
    d2.pop("elapsed_ms")
    assert d1 == d2


def test_dump_kmatrix_matches_library(capsys):
    rc, out, _ = run(capsys, "dump", "kmatrix", "--family", "A", "--n", "3",
                     "--z", "5/7", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["family"] == "A1" and doc["shape"] == [8, 8]
    base = sample_params(0)
    params = make_params(base.t, parse_scalar("5/7"), base.eps, base.mu)
    expected = build_ktr(3, params.z, params).operator
    got = {(r, c): v for r, c, v in doc["entries"]}
    assert got == {(r, c): format_scalar(v) for r, c, v in expected.entries()}
    coords = [(r, c) for r, c, _ in doc["entries"]]
    assert coords == sorted(coords)


def test_dump_kmatrix_boundary_labels_default(capsys):
    rc, out, _ = run(capsys, "dump", "kmatrix", "--family", "B1", "--n", "3",
                     "--seed", "4", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert (doc["k"], doc["kp"]) == (2, 1)
    params = sample_params(4)
    expected = build_kkk(2, 1, 3, params.z, params).operator
    assert len(doc["entries"]) == sum(1 for _ in expected.entries())


def test_dump_hamiltonian_matches_library(capsys):
    rc, out, _ = run(capsys, "dump", "hamiltonian", "--family", "D1",
                     "--n", "3", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    params = sample_params(0)
    expected = hamiltonian(CoidealSpec(make_family("D1", 3), 2, 2), params)
    got = {(r, c): v for r, c, v in doc["entries"]}
    assert got == {(r, c): format_scalar(v) for r, c, v in expected.entries()}


def test_dump_generators(capsys):
    rc, out, _ = run(capsys, "dump", "generators", "--family", "B1", "--n", "3",
                     "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    names = [g["name"] for g in doc["generators"]]
    assert names[:4] == ["e0", "f0", "kplus0", "kminus0"]
    assert len(names) == 16
    for g in doc["generators"]:
        assert g["entries"], f"{g['name']} dumped empty"


def test_spectrum_subcommand(capsys):
    rc, out, _ = run(capsys, "spectrum", "--n", "3", "--family", "D1",
                     "--seed", "1")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,family,l,j,value,observed,expected,status"
    fams = {line.split(",")[1] for line in lines[1:]}
    assert fams == {"k12", "k22"}


def test_config_errors_exit_2(capsys):
    assert run(capsys, "verify", "--suite", "onsager")[0] == 2
    assert run(capsys, "verify", "--suite", "kmatrix", "--family", "Q",
               "--n", "3")[0] == 2
    assert run(capsys, "verify", "--suite", "onsager", "--family", "A",
               "--n", "3", "--k", "1")[0] == 2
    assert run(capsys, "verify", "--suite", "sp4", "--trunc", "8")[0] == 2
    assert run(capsys, "verify", "--suite", "onsager", "--family", "D2",
               "--n", "2", "--t", "1/1")[0] == 2
    assert run(capsys, "verify", "--suite", "onsager", "--family", "D2",
               "--n", "2", "--k", "3", "--kp", "1")[0] == 2
    rc, _, err = run(capsys, "verify", "--suite", "onsager", "--family", "D2",
                     "--n", "1")
    assert rc == 2 and "error:" in err


def test_bad_env_seed_exits_2(capsys, monkeypatch):
    monkeypatch.setenv("ONSK_SEED", "abc")
    rc, _, err = run(capsys, "verify", "--suite", "sp4")
    assert rc == 2
    assert "ONSK_SEED" in err


def test_bad_dump_target_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["dump", "badtarget", "--family", "A", "--n", "3"])
    assert exc.value.code == 2


def test_bad_literal_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["dump", "kmatrix", "--family", "A", "--n", "3", "--z", "bogus"])
    assert exc.value.code == 2


def test_failing_check_exits_1_and_names_it(capsys, monkeypatch):
    import onsk.cli as cli

    def broken(n, z, params):
        rep = Report("inversion relation")
        rep.add("K(z) K(1/z) = id", False, "forced failure")
        return rep

    monkeypatch.setattr(cli, "check_unitarity", broken)
    rc, out, err = run(capsys, "verify", "--suite", "kmatrix", "--family", "A",
                       "--n", "3")
    assert rc == 1
    assert "FAIL: K(z) K(1/z) = id" in err
    assert "fail" in out


def test_output_flag_writes_file(capsys, tmp_path):
    path = tmp_path / "report.txt"
    rc, out, _ = run(capsys, "verify", "--suite", "defining-relations",
                     "--family", "D2", "--n", "2", "--output", str(path))
    assert rc == 0
    assert out == ""
    assert "checks passed" in path.read_text()


def test_resolve_canonicalizes_family():
    parser = build_parser()
    cfg = resolve(parser.parse_args(
        ["verify", "--suite", "onsager", "--family", "a", "--n", "4"]))
    assert cfg.family == "A1"
    assert cfg.format == "text"
    cfg = resolve(parser.parse_args(
        ["verify", "--suite", "spectra", "--family", "A", "--n", "4"]))
    assert cfg.format == "csv"
    with pytest.raises(ConfigError):
        resolve(parser.parse_args(
            ["verify", "--suite", "all", "--jobs", "0"]))
