import json
from importlib import resources

import numpy as np
import pytest
from conftest import random_momdp

from pimomdp import PiMdpModel, PiMomdpModel, PiPomdpModel, load_model, save_model
from pimomdp.cli import EXIT_OK, EXIT_SOLVER, EXIT_USAGE, EXIT_VALIDATION, main
from pimomdp.errors import ModelValidationError
from pimomdp.io import ModelParseError, model_from_dict, model_to_dict

STAY_TRAP = str(resources.files("pimomdp") / "data" / "stay_trap.json")


def stay_trap_doc():
    return json.loads(open(STAY_TRAP, encoding="utf-8").read())


def test_bundled_fixture_loads():
    m = load_model(STAY_TRAP)
    assert isinstance(m, PiMdpModel) and m.num_states == 2
    assert m.state_names == ("s1", "s2") and m.action_names[m.stay_action] == "stay"


def test_zero_row_is_a_normalization_error():
    doc = stay_trap_doc()
    doc["transition"][1][1] = [0, 0]
    with pytest.raises(ModelValidationError, match=r"transition row \(s=1, a=1\) not normalized"):
        model_from_dict(doc)


def test_unknown_label():
    doc = stay_trap_doc()
    doc["preference"] = [0.3, 1]
    with pytest.raises(ModelValidationError, match="0.3 is not a member"):
        model_from_dict(doc)


def test_labels_match_exactly():
    doc = stay_trap_doc()
    doc["scale"] = [0, 0.1, 1]
    doc["preference"] = [0.1 + 1e-12, 1]
    with pytest.raises(ModelValidationError):
        model_from_dict(doc)


def test_parse_error_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "kind": "pi-mdp",\n  "scale": [0, 1,\n}\n')
    with pytest.raises(ModelParseError) as err:
        load_model(bad)
    assert err.value.line == 4 and err.value.column is not None


def _same_model(a, b):
    assert type(a) is type(b)
    assert a.scale == b.scale
    for name in ("transition", "preference", "observation", "hidden_observation", "initial_belief"):
        if hasattr(a, name):
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    assert a.stay_action == b.stay_action
    if isinstance(a, PiMomdpModel):
        assert a.initial == b.initial and a.stay_observation == b.stay_observation


def test_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    mm = random_momdp(rng, 2, 2, 3, 2, 4)
    s = mm.scale
    T = np.zeros((2, 2, 2), dtype=np.int64)
    T[:, 0] = np.eye(2, dtype=np.int64) * s.top
    T[:, 1] = [[1, s.top], [s.top, 2]]
    pomdp = PiPomdpModel(s, T, np.full((2, 2, 1), s.top), [0, 3], [s.top, 1], 0, 0)
    for model in (load_model(STAY_TRAP), pomdp, mm):
        path = tmp_path / "m.json"
        save_model(model, path)
        _same_model(model, load_model(path))
        assert model_to_dict(load_model(path)) == model_to_dict(model)


def test_cli_solve_stay_trap(capsys, tmp_path):
    dump = tmp_path / "out.json"
    assert main(["solve", STAY_TRAP, "--infinite", "--json", str(dump)]) == EXIT_OK
    out = capsys.readouterr().out
    row = [ln for ln in out.splitlines() if ln.startswith("s1")][0]
    assert row.split()[-1] == "b"
    data = json.loads(dump.read_text())
    assert data["rows"][0] == {"state": "s1", "value": 1.0, "action": "b"}


def test_cli_solve_horizon_zero_prints_preference(capsys):
    assert main(["solve", STAY_TRAP, "--horizon", "0"]) == EXIT_OK
    rows = [ln.split() for ln in capsys.readouterr().out.splitlines() if ln.startswith("s")]
    assert [(r[0], r[1]) for r in rows if r[0] in ("s1", "s2")] == [("s1", "0"), ("s2", "1")]


def test_cli_grid_generate_solve_enumerate(capsys, tmp_path):
    grid = tmp_path / "grid3.json"
    assert main(["gen-grid", "--g", "3", "--out", str(grid)]) == EXIT_OK
    assert isinstance(load_model(grid), PiMomdpModel)
    capsys.readouterr()
    assert main(["solve", str(grid), "--infinite"]) == EXIT_OK
    assert "converged after" in capsys.readouterr().out
    assert main(["enumerate", str(grid), "--levels", "5"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "mixed belief states: 81" in out
    assert f"flat belief states: {5**18 - 4**18}" in out


def test_cli_enumerate_mdp(capsys):
    assert main(["enumerate", STAY_TRAP]) == EXIT_OK
    assert "fully observable; belief space = state space" in capsys.readouterr().out


def test_cli_enumerate_three_levels(capsys, tmp_path):
    mm = random_momdp(np.random.default_rng(0), 1, 2, 2, 2, 3)
    path = tmp_path / "m.json"
    save_model(mm, path)
    assert main(["enumerate", str(path)]) == EXIT_OK
    assert "(per visible state: 5)" in capsys.readouterr().out


BENCH = ["bench", "--g", "3", "--pbad-list", "0.5,0.8", "--wrongness-list", "0.9", "--seed", "4"]


def test_cli_bench_zero_runs_writes_header(tmp_path):
    assert main(BENCH + ["--runs", "0", "--out", str(tmp_path)]) == EXIT_OK
    for name in ("pbad_sweep.csv", "initial_belief_sweep.csv"):
        lines = (tmp_path / name).read_text().splitlines()
        assert len(lines) == 1 and lines[0].startswith("sweep_parameter,")


def test_cli_bench_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(BENCH + ["--runs", "30", "--resolution", "51", "--out", str(out)]) == EXIT_OK
    for name in ("pbad_sweep.csv", "initial_belief_sweep.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
        assert len((a / name).read_text().splitlines()) > 1


def test_cli_simulate(capsys):
    args = ["simulate", "--g", "3", "--runs", "5", "--resolution", "51"]
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out
    assert main(args) == EXIT_OK
    assert capsys.readouterr().out == first
    assert first.startswith("possibilistic: runs=5")


def test_exit_codes(tmp_path):
    doc = stay_trap_doc()
    doc["transition"][0][0] = [0, 0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["solve", str(bad), "--infinite"]) == EXIT_VALIDATION
    assert main(["solve", str(tmp_path / "missing.json"), "--infinite"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        main(["solve", STAY_TRAP])
    assert err.value.code == EXIT_USAGE
    doc = stay_trap_doc()
    doc["stay_action"] = None
    nostay = tmp_path / "nostay.json"
    nostay.write_text(json.dumps(doc))
    assert main(["solve", str(nostay), "--infinite"]) == EXIT_SOLVER
    assert main(["solve", str(nostay), "--horizon", "2"]) == EXIT_OK
