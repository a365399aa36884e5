import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from xnet.channel import random_extension
from xnet.cli import load_config, main
from xnet.exceptions import ConfigError
from xnet.records import (config_hash, format_csv, format_record, parse_record, plan_record,
                          read_csv, read_plan_matrices)
from xnet.schemes import build_mx2, compute_zero_forcing


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_outerbound_record(capsys):
    code, out, _ = run(["outerbound", "--m", "2", "--n", "2", "--format", "record"], capsys)
    rec = parse_record(out)
    assert code == 0 and Fraction(rec["value"]) == Fraction(4, 3)
    assert rec["config_hash"] and rec["seed"] == "0"


def test_outerbound_null_diagonal_csv(capsys):
    code, out, _ = run(["outerbound", "--m", "3", "--n", "3", "--null", "1-1,2-2,3-3"], capsys)
    header, rows, _ = read_csv(out)
    assert code == 0 and dict(zip(header, rows[0]))["value"] == "3/2"


def test_slope_command(capsys):
    code, out, _ = run(["slope", "--m", "3", "--n", "2", "--kind", "perfect",
                        "--rho-db", "40,60"], capsys)
    header, rows, summary = read_csv(out)
    assert code == 0
    assert header == ["rho_db", "sum_rate_bits", "stderr"] and len(rows) == 2
    assert abs(float(summary["slope"]) / 1.5 - 1) <= 0.03
    assert summary["achieved_dof"] == "3/2"
    assert {"config_hash", "seed"} <= set(summary)


def test_outputs_are_byte_identical(tmp_path):
    paths = []
    for k in range(2):
        p = tmp_path / f"out{k}.csv"
        assert main(["slope", "--m", "2", "--n", "2", "--trials", "20", "--seed", "3",
                     "--rho-db", "40,50,60", "--output", str(p)]) == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    p = tmp_path / "other.csv"
    main(["slope", "--m", "2", "--n", "2", "--trials", "20", "--seed", "4",
          "--rho-db", "40,50,60", "--output", str(p)])
    assert p.read_bytes() != paths[0].read_bytes()


def test_delay_command(capsys):
    code, out, _ = run(["delay", "--delays", "3,4,6,8"], capsys)
    header, rows, summary = read_csv(out)
    assert code == 0 and header == ["slot", "receiver", "arrivals", "role"]
    assert summary["throughput"] == "4/3" and summary["collisions"] == "0"
    interference = {(int(r[1]), int(r[0]) % 3) for r in rows if r[3] == "interference"}
    assert {res for j, res in interference if j == 1} == {1}
    assert {res for j, res in interference if j == 2} == {0}


def test_invalid_delays_exit_code(capsys):
    code, out, err = run(["delay", "--delays", "0,0,0,2"], capsys)
    assert code == 2 and parse_record(out)["field"] == "delays"


def test_relay_command(capsys):
    code, out, _ = run(["relay", "--m", "2", "--k", "2", "--order", "1", "--format", "record"],
                       capsys)
    rec = parse_record(out)
    assert code == 0
    assert rec["end_to_end_dof"] == "3/5" and rec["bound"] == "2/3"
    assert rec["hop1_dof"] == rec["hop2_dof"] == "6/5"


def test_build_and_verify(capsys):
    code, out, _ = run(["build", "--m", "2", "--n", "3", "--kind", "general"], capsys)
    header, rows, summary = read_csv(out)
    assert code == 0 and summary["achieved_dof"] == "15/13" and len(rows) == 6
    code, out, _ = run(["verify", "--m", "2", "--n", "2", "--kind", "general", "--order", "2",
                        "--format", "record"], capsys)
    assert code == 0 and parse_record(out)["passed"] == "true"


def test_verification_failure_exit_code(capsys):
    code, out, _ = run(["verify", "--m", "2", "--n", "2", "--kind", "general", "--order", "2",
                        "--perturb", "1e-3", "--format", "record"], capsys)
    rec = parse_record(out)
    assert code == 1 and rec["passed"] == "false" and "alignment residual" in rec["failures"]


def test_build_record_roundtrip(capsys):
    code, out, _ = run(["build", "--m", "3", "--n", "2", "--format", "record", "--seed", "5"],
                       capsys)
    V = read_plan_matrices(out, "V")
    assert code == 0 and set(V) == {(j, i) for j in (1, 2) for i in (1, 2, 3)}
    assert all(A.shape == (4, 1) for A in V.values())


@pytest.mark.parametrize("argv,field", [
    (["outerbound", "--m", "0"], "M"),
    (["build", "--m", "3", "--n", "3", "--kind", "perfect"], "kind"),
    (["slope", "--rho-db", "60,40"], "rho_db"),
    (["slope", "--trials", "0"], "trials"),
    (["delay", "--horizon", "10"], "horizon"),
    (["outerbound", "--m", "2", "--n", "2", "--at", "1"], "at"),
    (["suite", "--only", "9"], "only"),
    (["build", "--h-min", "0"], "h_min"),
])
def test_config_errors_name_the_field(argv, field, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert parse_record(out)["field"] == field and field in err


def test_config_file_and_override(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"M": 3, "N": 3, "null": [[1, 1], [2, 2], [3, 3]], "seed": 9}))
    cfg = load_config(["outerbound", "--config", str(p)])
    assert (cfg.M, cfg.N, cfg.seed, cfg.null) == (3, 3, 9, ((1, 1), (2, 2), (3, 3)))
    cfg = load_config(["outerbound", "--config", str(p), "--m", "4", "--seed", "1"])
    assert (cfg.M, cfg.N, cfg.seed) == (4, 3, 1)
    with pytest.raises(ConfigError) as err:
        load_config(["outerbound", "--config", str(p), "--m", "2"])
    assert err.value.field == "null"
    p.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ConfigError):
        load_config(["outerbound", "--config", str(p)])


def test_hash_ignores_output_path():
    a = load_config(["slope", "--seed", "1", "--output", "a.csv"])
    b = load_config(["slope", "--seed", "1", "--output", "b.csv"])
    c = load_config(["slope", "--seed", "2"])
    assert a.hash() == b.hash() != c.hash()


def test_default_kind():
    assert load_config(["build", "--m", "3", "--n", "2"]).kind == "perfect"
    assert load_config(["build", "--m", "3", "--n", "3"]).kind == "general"
    assert load_config(["relay", "--m", "2", "--k", "2"]).kind == "general"


def test_suite_subset(capsys):
    code, out, err = run(["suite", "--only", "1,7"], capsys)
    header, rows, summary = read_csv(out)
    assert code == 0 and [r[2] for r in rows] == ["pass", "pass"]
    assert "criterion 1 [PASS]" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "xnet", "outerbound", "--m", "5", "--n", "5",
                          "--format", "record"], capture_output=True, text=True, check=True)
    assert parse_record(res.stdout)["value"] == "25/9"


def test_record_format():
    text = format_record({"a": Fraction(1, 3), "b": 0.1, "c": [1, 2], "d": True, "e": None})
    assert text == "a=1/3\nb=0.1\nc=1,2\nd=true\ne=\n"
    with pytest.raises(ValueError):
        format_record({"x": "two\nlines"})


def test_csv_format():
    text = format_csv(["x", "y"], [(1, 0.5), (2, Fraction(1, 2))], {"k": 3})
    assert text == "x,y\n1,0.5\n2,1/2\n# k=3\n"
    assert read_csv(text) == (["x", "y"], [["1", "0.5"], ["2", "1/2"]], {"k": "3"})


def test_config_hash_is_order_free():
    assert config_hash({"a": 1, "b": (1, 2)}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_plan_record_matrices():
    ext = random_extension(2, 2, 3, 0)
    plan = compute_zero_forcing(build_mx2(ext, 0), ext)
    text = plan_record(plan)
    V = read_plan_matrices(text, "V")
    U = read_plan_matrices(text, "U")
    for key in plan.messages():
        assert np.array_equal(V[key], plan.Vmat[key])
        assert np.array_equal(U[key], plan.Umat[key])
    assert parse_record(text)["achieved_dof"] == "4/3"
