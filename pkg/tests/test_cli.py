import json

import pytest

from ucslab.cli import (
    EXIT_COUNTEREXAMPLE,
    EXIT_EMPTY_CLASS,
    EXIT_ENVIRONMENT,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_range,
)
from ucslab.config import ConfigError, load_config


def run(capsys, *argv):
    code = main(["--quiet", *argv])
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines()]


# ------------------------------------------------------------------ enumerate

def test_enumerate_n2(capsys):
    code, out, err = run(capsys, "enumerate", "--n", "2")
    assert code == EXIT_OK
    assert out.splitlines() == ["0,3", "0,1,3", "0,2,3", "0,1,2,3"]
    assert "labeled=4" in err


def test_enumerate_n1(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "1")
    assert out == "0,1\n"


def test_enumerate_canonical_n3(capsys):
    code, out, err = run(capsys, "enumerate", "--n", "3", "--canonical")
    assert code == EXIT_OK
    orbits = [int(line.split("\t")[1]) for line in out.splitlines()]
    assert len(orbits) == 14 and sum(orbits) == 45
    assert "orbit_sum=45" in err


def test_enumerate_filter_matches(capsys):
    _, rec, _ = run(capsys, "enumerate", "--n", "3")
    _, fil, _ = run(capsys, "enumerate", "--n", "3", "--strategy", "filter")
    assert rec == fil


def test_enumerate_to_file(tmp_path, capsys):
    out = tmp_path / "dump.txt"
    code, stdout, _ = run(capsys, "enumerate", "--n", "3", "--out", str(out))
    assert code == EXIT_OK
    assert len(out.read_text().splitlines()) == 45
    assert "labeled=45" in stdout
    manifest = json.loads((tmp_path / "dump.txt.manifest.json").read_text())
    assert manifest["command"] == "enumerate" and manifest["totals"]["labeled"] == 45


def test_enumerate_bad_n(capsys):
    assert run(capsys, "enumerate", "--n", "6")[0] == EXIT_USAGE
    assert run(capsys, "enumerate", "--n", "5", "--strategy", "filter")[0] == EXIT_USAGE


def test_unwritable_output(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(capsys, "enumerate", "--n", "2", "--out", str(blocker / "sub" / "x.txt"))
    assert code == EXIT_ENVIRONMENT


# ------------------------------------------------------------------- constant

@pytest.mark.parametrize(
    "args,value",
    [
        (["--n", "2", "--k", "1", "--l", "1", "--class", "all"], (1, 2)),
        (["--n", "2", "--k", "2", "--l", "1", "--class", "separated"], (3, 4)),
        (["--n", "3", "--k", "3", "--l", "3", "--class", "all"], (1, 8)),
    ],
)
def test_constant_values(capsys, args, value):
    code, out, _ = run(capsys, "constant", *args)
    assert code == EXIT_OK
    (rec,) = records(out)
    assert (rec["value_num"], rec["value_den"]) == value
    assert set(rec) >= {"n", "k", "l", "class", "value_num", "value_den", "witness", "witness_s",
                        "families_scanned", "verdict", "manifest"}


def test_constant_witness_powerset(capsys):
    (rec,) = records(run(capsys, "constant", "--n", "3", "--k", "3", "--l", "3", "--class", "all")[1])
    assert rec["witness"] == "0,1,2,3,4,5,6,7"


def test_constant_weak_flag(capsys):
    (a,) = records(run(capsys, "constant", "--n", "3", "--k", "3", "--l", "2", "--weak")[1])
    (b,) = records(run(capsys, "constant", "--n", "3", "--k", "3", "--l", "2", "--class", "weakly_separated")[1])
    assert a == b
    assert a["class"] == "weakly_separated" and a["verdict"] == "below_bound"


def test_constant_empty_class(capsys):
    assert run(capsys, "constant", "--n", "2", "--k", "3", "--l", "1")[0] == EXIT_EMPTY_CLASS


def test_constant_bad_params(capsys):
    assert run(capsys, "constant", "--n", "3", "--k", "1", "--l", "2")[0] == EXIT_USAGE


# --------------------------------------------------------------------- verify

def test_verify_strong_21(capsys):
    code, out, _ = run(capsys, "verify", "--n", "2", "--k", "2", "--l", "1", "--variant", "strong")
    assert code == EXIT_OK
    assert records(out)[0]["verdict"] == "pass"


def test_verify_standard_22(capsys):
    code, out, _ = run(capsys, "verify", "--n", "3", "--k", "2", "--l", "2", "--variant", "standard")
    assert code == EXIT_OK
    assert records(out)[0]["families_scanned"] == 45


def test_verify_counterexample_exit(capsys):
    code, out, err = main(["verify", "--n", "3", "--k", "3", "--l", "2", "--variant", "strong"]), *capsys.readouterr()
    assert code == EXIT_COUNTEREXAMPLE
    (rec,) = records(out)
    assert rec["counterexample"] == "0,1,2,3,7"
    assert "counterexample" in err


def test_verify_usage(capsys):
    assert run(capsys, "verify", "--n", "3")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--n", "3", "--all-orders", "--k", "1")[0] == EXIT_USAGE
    assert run(capsys, "verify", "--n", "3", "--k", "1")[0] == EXIT_USAGE


def test_verify_corrupt_checkpoint(capsys, tmp_path):
    ck = tmp_path / "bad.ck"
    ck.write_text("not a checkpoint\n")
    code, _, err = run(capsys, "verify", "--n", "3", "--all-orders", "--checkpoint", str(ck))
    assert code == EXIT_ENVIRONMENT
    ck.write_text("ucslab-checkpoint format=7 n=3 strategy=recursive\n{}\nsha256=0\n")
    assert run(capsys, "verify", "--n", "3", "--all-orders", "--checkpoint", str(ck))[0] == EXIT_ENVIRONMENT


def test_verify_interrupt_and_resume(capsys, tmp_path):
    ck = tmp_path / "v.ck"
    base = ["verify", "--n", "4", "--all-orders", "--variant", "standard"]
    ref = run(capsys, *base)
    code, _, _ = run(capsys, *base, "--checkpoint", str(ck), "--stop-after", "3")
    assert code == EXIT_ENVIRONMENT and ck.exists()
    resumed = run(capsys, *base, "--checkpoint", str(ck))
    assert resumed[:2] == ref[:2]


# ---------------------------------------------------------------------- audit

def test_audit_max_k_1(capsys):
    code, out, _ = run(capsys, "audit", "--max-k", "1")
    assert code == EXIT_OK
    recs = {r["inequality"]: r for r in records(out)}
    assert recs["superadditivity"]["equalities"] == [[1, 1, 1]]
    assert all(r["failures"] == [] for r in recs.values())


def test_audit_max_k_10(capsys):
    code, out, _ = run(capsys, "audit", "--max-k", "10")
    assert code == EXIT_OK and all(r["verdict"] == "pass" for r in records(out))


def test_audit_range(capsys):
    assert run(capsys, "audit", "--max-k", "31")[0] == EXIT_USAGE


# ---------------------------------------------------------------------- table

def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--n", "1..3")
    assert code == EXIT_OK
    rows = records(out)
    keys = [(r["n"], r["k"], r["l"], r["class"]) for r in rows]
    assert len(keys) == len(set(keys)) == 3 * (1 + 3 + 6)
    row = next(r for r in rows if (r["n"], r["k"], r["l"], r["class"]) == (2, 1, 1, "all"))
    assert (row["value_num"], row["value_den"]) == (1, 2)


def test_table_csv(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, "table", "--n", "2..2", "--format", "csv", "--out", str(out))
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("schema,n,k,l,class,value_num,value_den,witness,witness_s,families_scanned")
    assert any(line.startswith("ucslab.v1,2,2,1,separated,3,4,") for line in lines)
    manifest = json.loads((tmp_path / "t.csv.manifest.json").read_text())
    assert lines[1].endswith(manifest["hash"])


def test_table_empty_range(capsys):
    assert run(capsys, "table", "--n", "3..1")[0] == EXIT_USAGE
    assert run(capsys, "table", "--n", "0..2")[0] == EXIT_USAGE
    with pytest.raises(Exception):
        parse_range("a..b")


def test_table_out_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("UCSLAB_OUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "table", "--n", "1")
    assert code == EXIT_OK and out == ""
    produced = sorted(p.name for p in tmp_path.iterdir())
    assert len(produced) == 2 and produced[0].startswith("table-")


# ---------------------------------------------------------------- determinism

@pytest.mark.parametrize("argv", [
    ["verify", "--n", "4", "--all-orders"],
    ["constant", "--n", "4", "--k", "3", "--l", "2", "--class", "weakly_separated"],
    ["table", "--n", "3"],
])
def test_worker_count_does_not_change_output(capsys, argv):
    one = run(capsys, *argv, "--workers", "1")
    many = run(capsys, *argv, "--workers", "3")
    assert one[0] == many[0]
    assert one[1] == many[1]


# --------------------------------------------------------------------- config

def test_config_precedence(tmp_path):
    cfg_file = tmp_path / "c.json"
    cfg_file.write_text(json.dumps({"workers": 2, "out_dir": "/from/file", "max_n": 4}))
    env = {"UCSLAB_WORKERS": "3"}
    cfg = load_config({}, env, str(cfg_file))
    assert (cfg.workers, cfg.out_dir, cfg.max_n) == (3, "/from/file", 4)
    cfg = load_config({"workers": 5}, env, str(cfg_file))
    assert cfg.workers == 5
    assert load_config({}, {}).max_n == 5
    env = {"UCSLAB_CONFIG": str(cfg_file)}
    assert load_config({}, env).workers == 2


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config({}, {"UCSLAB_WORKERS": "zero"})
    with pytest.raises(ConfigError):
        load_config({}, {"UCSLAB_MAX_N": "6"})
    bad = tmp_path / "bad.json"
    bad.write_text('{"colour": 1}')
    with pytest.raises(ConfigError):
        load_config({}, {}, str(bad))
    with pytest.raises(ConfigError):
        load_config({}, {}, str(tmp_path / "missing.json"))


def test_max_n_limits_commands(capsys, monkeypatch):
    monkeypatch.setenv("UCSLAB_MAX_N", "3")
    assert run(capsys, "enumerate", "--n", "4")[0] == EXIT_USAGE
    assert run(capsys, "enumerate", "--n", "3")[0] == EXIT_OK


def test_bad_config_exit(capsys, monkeypatch):
    monkeypatch.setenv("UCSLAB_WORKERS", "-2")
    assert run(capsys, "audit", "--max-k", "2")[0] == EXIT_USAGE


def test_argparse_usage_exit(capsys):
    assert run(capsys, "constant", "--n", "2")[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
