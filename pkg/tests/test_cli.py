import json
import subprocess
import sys

import pytest

from triest.cli import main, read_trace


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return [line for line in text.splitlines() if line and not line.startswith("#")]


def test_run_triangle(capsys):
    code, out, _ = run(capsys, "run", "--gen", "clique:3", "--algo", "base", "--memory", "6")
    assert code == 0
    assert rows(out)[-1] == "3,1.0"
    assert out.startswith("# config_hash=")
    assert "version=triest" in out.splitlines()[0]


def test_run_byte_identical(capsys):
    args = ("run", "--gen", "er:30:0.3:4", "--algo", "impr", "-M", "20", "--seed", "9", "--locals", "--timing")
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b


def test_run_locals_long_format(capsys):
    _, out, _ = run(capsys, "run", "--gen", "clique:4", "--algo", "exact", "--locals")
    r = rows(out)
    assert r[0] == "t,estimate_global,vertex,estimate_local"
    assert r[-4:] == ["6,4.0,0,3.0", "6,4.0,1,3.0", "6,4.0,2,3.0", "6,4.0,3,3.0"]


def test_run_json(capsys):
    _, out, _ = run(capsys, "run", "--gen", "clique:4", "--algo", "fd", "-M", "6", "--format", "json")
    payload = json.loads(out)
    assert payload["meta"]["version"].startswith("triest")
    assert payload["trace"][-1] == {"t": 6, "estimate_global": 4.0}


def test_window_cadence_contract(capsys):
    _, out, _ = run(
        capsys, "run", "--gen", "er:20:0.4:1", "--window", "15", "--algo", "fd", "-M", "8", "--cadence", "10"
    )
    _, stream, _ = run(capsys, "transform", "--gen", "er:20:0.4:1", "--window", "15")
    n = len(stream.splitlines())
    assert len(rows(out)) - 1 == -(-n // 10)


def test_stream_violation_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("+ 1 2\n+ 2 3\n+ 2 1\n")
    code, _, err = run(capsys, "run", str(p), "--algo", "base", "-M", "6")
    assert code == 2 and "event 2" in err
    code, out, _ = run(capsys, "run", str(p), "--algo", "base", "-M", "6", "--policy", "skip-invalid")
    assert code == 0 and len(rows(out)) == 3


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--gen", "clique:4"])
    assert info.value.code == 1
    assert main(["run", "--gen", "clique:4", "--algo", "base"]) == 1
    assert main(["run", "--gen", "clique:4", "--algo", "base", "-M", "3"]) == 1
    assert main(["theory", "xi", "a=3"]) == 1
    capsys.readouterr()


def test_eval_exact_is_zero(capsys, tmp_path):
    code, out, _ = run(capsys, "eval", "--gen", "er:25:0.4:2", "--algo", "exact", "--cadence", "10", "--locals")
    rep = json.loads(out)["metrics"]
    assert code == 0 and rep["mape"] == 0 and rep["local_eps_error"] == 0


def test_eval_joins_traces(capsys, tmp_path):
    est, truth, other = tmp_path / "e.csv", tmp_path / "t.csv", tmp_path / "o.csv"
    base = ["--gen", "er:25:0.4:2", "--cadence", "5", "--locals"]
    main(["run", *base, "--algo", "base", "-M", "30", "--out", str(est)])
    main(["run", *base, "--algo", "exact", "--out", str(truth)])
    main(["run", "--gen", "er:25:0.4:2", "--cadence", "7", "--algo", "exact", "--out", str(other)])
    code, out, _ = run(capsys, "eval", "--estimate", str(est), "--truth", str(truth))
    assert code == 0
    rep = json.loads(out)["metrics"]
    assert rep["mape"] > 0 and rep["local_pearson"] > 0
    t, g, loc = read_trace(truth)
    assert loc is not None and len(t) == len(g)
    assert main(["eval", "--estimate", str(est), "--truth", str(other)]) == 1
    capsys.readouterr()


def test_mc_exact_zero_variance(capsys):
    _, out, _ = run(capsys, "mc", "--gen", "clique:5", "--algo", "exact", "--trials", "3", "--cadence", "5")
    r = rows(out)
    assert r[0] == "t,mean,var,se,min,max"
    assert all(line.split(",")[2] == "0.0" for line in r[1:])


def test_mc_same_across_workers(capsys):
    args = ["mc", "--gen", "clique:6", "--algo", "base", "-M", "6", "--trials", "40", "--seed", "2"]
    a = run(capsys, *args, "--workers", "1")[1]
    b = run(capsys, *args, "--workers", "4")[1]
    strip = lambda s: [line for line in s.splitlines() if not line.startswith("#")]
    assert strip(a) == strip(b)


def test_mc_seed_collision_warning(capsys):
    _, _, err = run(capsys, "mc", "--gen", "clique:4", "--algo", "base", "-M", "6", "--trials", "2")
    assert "seed collision" in err


def test_matched_columns(capsys):
    _, out, _ = run(capsys, "matched", "--gen", "clique:6", "--prob", "1.0", "--trials", "2")
    r = rows(out)
    assert r[0].split(",")[:3] == ["trial", "M_prime", "M_used"]
    assert r[1].split(",")[1] == "15"
    assert all(float(x) == 0 for x in r[1].split(",")[3:])


def test_oracle_json(capsys):
    _, out, _ = run(capsys, "oracle", "--gen", "clique:5", "--z-memory", "6")
    st = json.loads(out)
    assert (st["total"], st["r"], st["w"], st["h"], st["z"]) == (10, 30, 15, 3, 6)


def test_theory_json(capsys):
    _, out, _ = run(capsys, "theory", "xi", "a=3", "b=10", "M=6")
    assert json.loads(out)["value"] == pytest.approx(6.0)
    _, out, _ = run(capsys, "theory", "kappa", "s=3", "d_i=3", "d_o=0", "M=3")
    assert json.loads(out)["value"] == pytest.approx(0.05)


def test_transform_roundtrip(capsys, tmp_path):
    p = tmp_path / "s.txt"
    main(["transform", "--gen", "er:15:0.5:3", "--order", "bfs", "--order-seed", "2", "--mass-q", "0.2", "--mass-d", "0.5", "--out", str(p)])
    code, out, _ = run(capsys, "run", str(p), "--algo", "fd", "-M", "10")
    assert code == 0


def test_console_script_entry():
    out = subprocess.run(
        [sys.executable, "-m", "triest.cli", "theory", "eta", "t=10", "M=6"], capture_output=True, text=True, check=True
    )
    assert json.loads(out.stdout)["value"] == pytest.approx(2.4)
