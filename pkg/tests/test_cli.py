import json

import numpy as np
import pytest

from chordwalk.main import load_config_file, main


def _table(text):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return {name: np.array(col) for name, col in zip(header, zip(*rows))}


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_spectrum_csv(capsys):
    code, out = _run(capsys, "spectrum", "--n", "12", "--m", "5")
    assert code == 0
    assert out.startswith("index,eigenvalue\n")
    table = _table(out)
    assert len(table["index"]) == 12
    assert np.all(np.diff(table["eigenvalue"]) >= 0.0)


def test_spectrum_both_solvers_agree(capsys):
    code, out = _run(capsys, "spectrum", "--n", "20", "--m", "7", "--solver", "both")
    assert code == 0
    assert np.max(_table(out)["delta"]) < 1e-6


def test_output_is_deterministic(capsys):
    _, first = _run(capsys, "spectrum", "--n", "15", "--m", "6")
    _, second = _run(capsys, "spectrum", "--n", "15", "--m", "6")
    assert first == second


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--n", "4", "--m", "2"],
        ["spectrum", "--n", "10", "--m", "none", "--solver", "chebyshev"],
        ["eigenstate", "--n", "10", "--m", "none"],
        ["evolve", "--n", "10", "--m", "4", "--start", "11"],
        ["trap", "--n", "10", "--m", "4", "--gamma", "-1"],
        ["spectrum", "--n", "10"],
        ["spectrum", "--n", "10", "--m-list", "3,4"],
    ],
)
def test_invalid_requests_exit_2(capsys, argv):
    assert main(argv) == 2


def test_centre_node_matches_cycle(capsys):
    _, chord = _run(capsys, "evolve", "--n", "100", "--m", "21", "--start", "11", "--t-max", "50", "--solver", "dense")
    _, cycle = _run(capsys, "evolve", "--n", "100", "--m", "none", "--start", "11", "--t-max", "50")
    a, b = _table(chord), _table(cycle)
    assert np.max(np.abs(a["pi_11_11"] - b["pi_11_11"])) < 1e-8
    assert np.allclose(a["norm_11"], 1.0, atol=1e-9)


def test_eigenstate_columns(capsys):
    code, out = _run(capsys, "eigenstate", "--n", "100", "--m", "50")
    table = _table(out)
    assert code == 0
    assert table["magnitude"][0] == pytest.approx(2.0 ** -0.75, abs=2e-3)
    near = table["distance"] <= 5
    assert np.allclose(table["magnitude"][near], table["prediction"][near], rtol=0.05)


def test_limiting_peaks_at_chord_ends(capsys):
    code, out = _run(capsys, "limiting", "--n", "100", "--m", "21", "--start", "1", "--solver", "dense")
    table = _table(out)
    assert code == 0
    top_two = set(table["k"][np.argsort(table["chi_1"])[-2:]].astype(int))
    assert top_two == {1, 21}
    assert np.max(np.abs(table["chi_1"] - table["approx_1"])) < 0.02


def test_trap_json(capsys):
    code, out = _run(capsys, "trap", "--n", "20", "--m", "6", "--t-max", "500", "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["meta"]["command"] == "trap"
    assert payload["meta"]["sign_convention"] == "H_eff = H0 - i*Gamma*P_trap"
    assert payload["meta"]["extra"]["predicted_plateau"] == pytest.approx(4 / 19)
    assert set(payload["data"]) == {"t", "survival", "approximation"}
    assert payload["data"]["survival"][0] == pytest.approx(1.0)


def test_m_list_writes_one_file_per_m(tmp_path):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--n", "12", "--m-list", "3,5,6", "--out", str(out)]) == 0
    for m in (3, 5, 6):
        path = tmp_path / f"spec_m{m}.csv"
        assert path.exists()
        assert len(path.read_text().strip().split("\n")) == 13
    assert not out.exists()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("# sweep defaults\nn = 12\nm = 5\nformat = json\nt-max = 3\n")
    assert load_config_file(config) == {"n": "12", "m": "5", "format": "json", "t_max": "3"}

    code, out = _run(capsys, "evolve", "--config", str(config), "--points", "4")
    payload = json.loads(out)
    assert code == 0
    assert payload["data"]["t"] == pytest.approx([0.0, 1.0, 2.0, 3.0])

    code, out = _run(capsys, "evolve", "--config", str(config), "--format", "csv", "--points", "3")
    assert out.startswith("t,pi_1_1,norm_1\n")


def test_missing_config_file(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_verify_quick(capsys):
    code, out = _run(capsys, "verify", "--quick")
    assert code == 0
    assert "[FAIL]" not in out
    assert out.strip().endswith("checks passed")


def test_ragged_table_rejected():
    from chordwalk.commands.output import render_csv, emit
    from chordwalk.schemas.run import OutputMeta, RunRequest

    assert render_csv({"a": [1, 2], "b": [0.5, True]}) == "a,b\n1,0.5\n2,1\n"
    req = RunRequest(command="spectrum", n=10, m=4)
    with pytest.raises(ValueError):
        emit(req, {"a": [1, 2], "b": [1.0]}, OutputMeta(command="spectrum", request={}))


def test_request_for_m_renames_output():
    from chordwalk.schemas.run import RunRequest

    req = RunRequest(command="trap", n=100, m_list="6,11", out="runs/trap.json", format="json")
    single = req.for_m(11)
    assert single.m == 11 and single.m_list == []
    assert str(single.out).endswith("trap_m11.json")
    assert RunRequest(command="evolve", n=10, m="none").cycle
