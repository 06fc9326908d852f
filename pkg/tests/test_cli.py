import json
import subprocess
import sys

import numpy as np
import pytest

from polychaos import __version__
from polychaos.cli import EXIT_COMPOSE, EXIT_FIT, EXIT_OK, EXIT_SCHEMA, EXIT_USAGE, main
from polychaos.export import read_moments, read_table

from oracles import beta4_raw_moments

DECAY = {
    "states": [{"name": "x", "pdf": "dirac", "data": [2], "rhs": "-a*x"}],
    "parameters": [{"name": "a", "pdf": "beta", "data": [2, 2]}],
}


def write_doc(tmp_path, doc, name="system.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def decay_doc(tmp_path):
    return write_doc(tmp_path, DECAY)


class TestCompose:
    def test_dump_and_verify(self, tmp_path, decay_doc):
        out = tmp_path / "c"
        assert main(["compose", decay_doc, "--order", "3", "--out", str(out), "--verify"]) == EXIT_OK
        dump = json.loads((out / "system_expanded.json").read_text())
        assert dump["basis_size"] == 4
        assert (out / "tensor_p1.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] is not None

    def test_non_polynomial_is_collocation_only(self, tmp_path):
        doc = {**DECAY, "states": [{"name": "x", "pdf": "dirac", "data": [2], "rhs": "-exp(a)*x"}]}
        code = main(["compose", write_doc(tmp_path, doc), "--out", str(tmp_path / "c")])
        assert code == EXIT_COMPOSE

    def test_schema_error_names_field(self, tmp_path, capsys):
        doc = {"states": [{"name": "x", "data": [2], "rhs": "-x"}]}
        assert main(["compose", write_doc(tmp_path, doc), "--out", str(tmp_path / "c")]) == EXIT_SCHEMA
        assert "states[0].pdf" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["compose", str(tmp_path / "nope.json"), "--out", str(tmp_path / "c")]) in (EXIT_USAGE, EXIT_SCHEMA)


class TestSimulate:
    def test_galerkin_with_moments(self, tmp_path, decay_doc):
        out = tmp_path / "g"
        args = ["simulate", decay_doc, "--method", "galerkin", "--dt", "0.01", "--moments", "4", "--out", str(out)]
        assert main(args) == EXIT_OK
        cols, data = read_table(out / "x.csv")
        assert cols == ["t", "x_0", "x_1", "x_2", "x_3"]
        assert data.shape == (101, 5)
        times, rows = read_moments(out / "moments_x.csv")
        assert rows["raw_1"][-1] == pytest.approx(data[-1, 1], rel=1e-15)
        assert set(rows) == {f"{k}_{m}" for k in ("raw", "central") for m in range(1, 5)}

    def test_collocation_needs_enough_samples(self, tmp_path, decay_doc):
        args = ["simulate", decay_doc, "--method", "collocation", "--samples", "3", "--out", str(tmp_path / "c")]
        assert main(args) == EXIT_USAGE

    def test_collocation_close_to_galerkin(self, tmp_path, decay_doc):
        for method in ("galerkin", "collocation"):
            main(["simulate", decay_doc, "--method", method, "--dt", "0.05", "--out", str(tmp_path / method)])
        _, g = read_table(tmp_path / "galerkin" / "x.csv")
        _, c = read_table(tmp_path / "collocation" / "x.csv")
        assert np.abs(g - c).max() < 1e-4

    def test_mc_is_seeded(self, tmp_path, decay_doc):
        for run in ("a", "b"):
            args = ["simulate", decay_doc, "--method", "mc", "--samples", "5", "--dt", "0.1", "--seed", "9", "--out", str(tmp_path / run)]
            assert main(args) == EXIT_OK
        files = sorted(p.name for p in (tmp_path / "a").glob("sample_*.csv"))
        assert files == [f"sample_{k}.csv" for k in range(5)]
        for name in files:
            assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()

    def test_input_override(self, tmp_path):
        doc = {
            "states": [{"name": "x", "pdf": "uniform", "data": [0, 1], "rhs": "u"}],
            "inputs": [{"name": "u", "rhs": "piecewise(u_t, u_v, t)", "u_t": [0, 0.5], "u_v": [0, 0]}],
        }
        path = write_doc(tmp_path, doc)
        args = ["simulate", path, "--order", "1", "--dt", "0.25", "--set", "u_v=1,3", "--out", str(tmp_path / "o")]
        assert main(args) == EXIT_OK
        _, data = read_table(tmp_path / "o" / "x.csv")
        np.testing.assert_allclose(data[:, 1], [0.5, 0.75, 1.0, 1.75, 2.5], atol=1e-12)

    def test_bad_override_syntax(self, tmp_path, decay_doc):
        assert main(["simulate", decay_doc, "--set", "u_v", "--out", str(tmp_path / "o")]) == EXIT_USAGE


class TestMomentsAndFit:
    def test_moments_from_trajectory(self, tmp_path, decay_doc):
        out = tmp_path / "g"
        main(["simulate", decay_doc, "--dt", "0.1", "--moments", "4", "--out", str(out)])
        target = tmp_path / "again.csv"
        assert main(["moments", str(out / "x.csv"), "--doc", decay_doc, "--out", str(target)]) == EXIT_OK
        assert target.read_text().splitlines()[1:] == (out / "moments_x.csv").read_text().splitlines()[1:]

    def test_fit_from_moments_file(self, tmp_path, decay_doc, capsys):
        out = tmp_path / "g"
        main(["simulate", decay_doc, "--dt", "0.1", "--moments", "4", "--out", str(out)])
        capsys.readouterr()
        assert main(["fitbeta4", str(out / "moments_x.csv"), "--time", "1.0"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["time"] == 1.0
        assert payload["lower"] < payload["upper"]

    def test_fit_from_values(self, tmp_path):
        path = tmp_path / "fit.json"
        nu = [str(v) for v in beta4_raw_moments(3, 3, 0.01, 0.03)]
        assert main(["fitbeta4", "--nu", *nu, "--out", str(path)]) == EXIT_OK
        fit = json.loads(path.read_text())
        assert fit["alpha"] == pytest.approx(3, rel=1e-6)
        assert fit["upper"] == pytest.approx(0.03, rel=1e-6)

    def test_infeasible_fit(self):
        assert main(["fitbeta4", "--nu", "0", "1", "0", "3"]) == EXIT_FIT

    def test_short_moments_file(self, tmp_path, decay_doc):
        out = tmp_path / "g"
        main(["simulate", decay_doc, "--dt", "0.1", "--moments", "2", "--out", str(out)])
        assert main(["fitbeta4", str(out / "moments_x.csv")]) == EXIT_USAGE


class TestOed:
    def test_zero_input_only(self, tmp_path):
        out = tmp_path / "oed"
        assert main(["oed", "--zero-input", "--samples", "20", "--out", str(out)]) == EXIT_OK
        result = json.loads((out / "oed_result.json").read_text())
        assert 0 < result["zero_input"]["score"] < 0.05
        cols, data = read_table(out / "envelopes_zero.csv")
        assert cols == ["t", "henri_lo", "henri_hi", "mm_lo", "mm_hi"]
        assert np.all(data[:, 1] <= data[:, 2])

    @pytest.mark.slow
    def test_optimized(self, tmp_path):
        out = tmp_path / "oed"
        assert main(["oed", "--samples", "200", "--out", str(out)]) == EXIT_OK
        result = json.loads((out / "oed_result.json").read_text())
        opt = result["optimized"]
        assert opt["score"] == "inf" or opt["score"] > 5 * result["zero_input"]["score"]
        assert opt["envelopes_disjoint_from"] is not None and opt["envelopes_disjoint_from"] <= 5.0
        assert (out / "score_trace.csv").exists()


def test_entry_point_version():
    proc = subprocess.run([sys.executable, "-m", "polychaos.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert __version__ in proc.stdout


def test_usage_error_without_command():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code != 0
