import io
import json

import jsonschema
import pytest

from probflux import cli
from probflux.schema import CONFIG_SCHEMA, OUTPUT_SCHEMAS

CONE = {"mode": "cone", "n": 5, "h": 0.2, "tau": 0.1}
RING = {"mode": "periodic", "m": 16, "h": 0.0625, "tau": 0.03125}

CONFIGS = {
    "solve": {"command": "solve", "scheme": {"name": "upwind", "a": 1}, "grid": CONE,
              "problem": {"u0": {"kind": "gauss", "center": 1.0, "width": 0.3}}},
    "check": {"command": "check", "scheme": {"name": "upwind", "a": 1}, "grid": CONE},
    "mc": {"command": "mc", "scheme": {"name": "upwind", "a": 1}, "grid": CONE,
           "problem": {"u0": {"kind": "gauss", "center": 1.0, "width": 0.3}},
           "mc": {"n_paths": 20000, "seed": 4, "workers": 2}},
    "limiters": {"command": "limiters", "limiters": {"v": 1.0, "lambda": 0.25}},
    "convergence": {"command": "convergence", "scheme": {"name": "lax-wendroff", "a": 1},
                    "convergence": {"levels": [20, 40], "horizon": 0.5, "lambda": 0.5}},
    "gds": {"command": "gds", "scheme": {"name": "upwind", "a": 1}, "grid": RING,
            "problem": {"u0": {"kind": "sine", "offset": 1.0}},
            "gds": {"v0": "mean-coupled", "h0": 1.0, "slow_step": 0.1, "substeps": 2, "n_slow": 3}},
    "fnn-approx": {"command": "fnn-approx",
                   "fnn": {"network": {"alpha0": 0.0, "nodes": [{"alpha": 1.0, "y": [2.0], "beta": 0.0}]},
                           "target": {"kind": "constant", "value": 0.5}, "box": [[-1, 1]],
                           "n_samples": 5000, "seed": 3}},
}


def run(tmp_path, cfg, *extra, name="cfg.json", text=None):
    path = tmp_path / name
    path.write_text(text if text is not None else json.dumps(cfg, indent=1))
    out = tmp_path / (name + ".out")
    code = cli.main([cfg["command"] if cfg else extra[0], str(path), "--output", str(out), *extra[bool(not cfg):]])
    return code, (out.read_text() if out.exists() else None)


@pytest.mark.parametrize("command", sorted(CONFIGS))
def test_every_command_runs(tmp_path, command):
    code, text = run(tmp_path, CONFIGS[command])
    assert code == 0 and text


@pytest.mark.parametrize("command", sorted(CONFIGS))
def test_json_round_trip(tmp_path, command):
    cfg = dict(CONFIGS[command], output={"format": "json"})
    jsonschema.validate(cfg, CONFIG_SCHEMA)
    code, text = run(tmp_path, cfg)
    assert code == 0
    jsonschema.validate(json.loads(text), OUTPUT_SCHEMAS[command])
    assert "lambda" in json.loads(text)


def test_check_upwind(tmp_path):
    code, text = run(tmp_path, CONFIGS["check"])
    out = json.loads(text)
    assert code == 0 and out["probabilistic"] and out["cfl_bound"] == 1 and out["lambda"] == 0.5


def test_check_lax_wendroff(tmp_path):
    cfg = dict(CONFIGS["check"], scheme={"name": "lax-wendroff", "a": 1})
    code, text = run(tmp_path, cfg)
    out = json.loads(text)
    assert code == 0 and not out["probabilistic"] and out["violated_entries"] == [[1, -0.125]]
    code, text = run(tmp_path, cfg, "--strict")
    assert code == 3 and json.loads(text)["violated_entries"] == [[1, -0.125]]


def test_solve_constant(tmp_path):
    cfg = dict(CONFIGS["solve"], problem={"u0": {"kind": "constant", "value": 2.5}})
    code, text = run(tmp_path, cfg)
    lines = text.splitlines()
    assert lines[0] == "layer,i,x,t,u,lambda"
    assert len(lines) == 1 + 11 + 9 + 7 + 5 + 3 + 1
    assert {line.split(",")[4] for line in lines[1:]} == {"2.5"}


def test_solve_strict_exit_code(tmp_path, capsys):
    cfg = dict(CONFIGS["solve"], scheme={"name": "lax-wendroff", "a": 1})
    code, _ = run(tmp_path, cfg, "--strict")
    assert code == 3
    err = capsys.readouterr().err
    assert '"probabilistic": false' in err


def test_schema_error_has_line_number(tmp_path, capsys):
    text = '{"command": "check",\n "scheme": {"name": "upwind",\n   "a": "x"},\n "grid": {}}'
    code, _ = run(tmp_path, None, "check", text=text)
    assert code == 2
    assert "cfg.json:3:" in capsys.readouterr().err


def test_invalid_json_has_line_number(tmp_path, capsys):
    code, _ = run(tmp_path, None, "check", text='{"command": "check",\n "scheme": }')
    assert code == 2
    assert "cfg.json:2:" in capsys.readouterr().err


def test_command_mismatch(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(CONFIGS["check"]))
    assert cli.main(["solve", str(path)]) == 2


def test_seed_required_and_override(tmp_path):
    cfg = json.loads(json.dumps(CONFIGS["mc"]))
    del cfg["mc"]["seed"]
    code, _ = run(tmp_path, cfg)
    assert code == 2
    code, text = run(tmp_path, cfg, "--seed", "4")
    assert code == 0
    _, ref = run(tmp_path, CONFIGS["mc"], name="ref.json")
    assert text == ref


def test_csv_not_offered_for_reports(tmp_path):
    code, _ = run(tmp_path, dict(CONFIGS["check"], output={"format": "csv"}))
    assert code == 2


def test_unsupported_exact_solution(tmp_path):
    cfg = dict(CONFIGS["convergence"], problem={"law": "burgers"})
    code, _ = run(tmp_path, cfg)
    assert code == 2


def test_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(CONFIGS["limiters"])))
    assert cli.main(["limiters"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["gamma1"] == -3 and out["gamma4"] == 3 and out["cfl_bound"] == 0.25


def test_missing_file():
    assert cli.main(["check", "/nonexistent/cfg.json"]) == 2


def test_csv_format_digits():
    assert cli.to_csv([{"a": 0.1, "b": 3}]) == "a,b\n0.10000000000000001,3\n"
    assert cli.to_json({"x": float("inf")}) == '{\n  "x": null\n}\n'
