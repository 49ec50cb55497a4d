import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from complement_lab.catalog import FULL_TURN, builtin
from complement_lab.cli import EXIT_INPUT, EXIT_OK, EXIT_PARSE, GridSpecError, parse_grid, run_capture
from complement_lab.scenefile import SceneFile, SceneInputError, SceneParseError


def rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


class TestParseGrid:
    def test_inclusive_linspace(self):
        assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]

    def test_lists(self):
        assert parse_grid("0.25") == [0.25]
        assert parse_grid("1,2.5") == [1.0, 2.5]

    def test_full_turn_contains_pi(self):
        grid = parse_grid(FULL_TURN)
        assert len(grid) == 64
        assert any(abs(x - math.pi) < 1e-12 for x in grid)
        assert np.allclose(grid, 2 * np.pi * np.arange(64) / 64, atol=1e-14)

    @pytest.mark.parametrize("bad", ["0:1", "a:b:c", "0:1:0", "", "1,,2"])
    def test_malformed(self, bad):
        with pytest.raises(GridSpecError):
            parse_grid(bad)


class TestAnalyze:
    def test_qubit_table(self):
        code, out, _ = run_capture(["analyze", "--builtin", "qubit-zx"])
        assert code == EXIT_OK
        assert "Complementary, TotallyNoncommuting" in out
        assert "zero_meet=4" in out

    def test_three_path_json(self):
        code, out, _ = run_capture(["analyze", "--builtin", "rangwala-roy", "--format", "json"])
        assert code == EXIT_OK
        doc = json.loads(out)
        assert len(doc) == 5
        for entry in doc:
            assert entry["relation"] == "Noncomplementary"
            assert entry["commutation"] == "Commuting"
            assert entry["conditions_agree"] is True

    def test_path_vs_interference(self):
        code, out, _ = run_capture(["analyze", "--builtin", "rangwala-roy", "--pair", "path,interference"])
        assert code == EXIT_OK and "Noncomplementary, Commuting" in out

    def test_explicit_pair_csv(self):
        code, out, _ = run_capture(["analyze", "--builtin", "double-slit", "--pair", "path,interference", "--format", "csv"])
        assert code == EXIT_OK
        (row,) = rows(out)
        assert row["relation"] == "Complementary"
        assert row["total_pairs"] == "4"

    def test_unknown_observable(self):
        code, _, err = run_capture(["analyze", "--builtin", "qubit-zx", "--pair", "Z,Y"])
        assert code == EXIT_INPUT and "Y" in err

    def test_missing_source(self):
        assert run_capture(["analyze"])[0] == EXIT_INPUT


class TestSimulate:
    def test_three_path_csv(self):
        code, out, _ = run_capture(["simulate", "--builtin", "rangwala-roy", "--phi", "0,1.5707963267948966,3.141592653589793", "--format", "csv"])
        assert code == EXIT_OK
        table = rows(out)
        assert [float(r["p_Dt1"]) for r in table] == pytest.approx([0.5, 0.25, 0.0], abs=1e-12)
        assert all(float(r["p_Dr"]) == pytest.approx(0.5, abs=1e-12) for r in table)
        assert all(float(r["anticoincidence"]) == 0.0 for r in table)

    def test_sixty_four_rows(self):
        code, out, _ = run_capture(["simulate", "--builtin", "rangwala-roy", "--phi", "0:6.283:64", "--format", "csv"])
        table = rows(out)
        assert code == EXIT_OK and len(table) == 64
        assert all(float(r["p_Dr"]) == pytest.approx(0.5, abs=1e-10) for r in table)

    def test_default_grid_from_scene(self):
        code, out, _ = run_capture(["simulate", "--builtin", "rangwala-roy", "--format", "csv"])
        assert code == EXIT_OK and len(rows(out)) == 64

    def test_biprism(self):
        code, out, _ = run_capture(["simulate", "--builtin", "biprism", "--alpha2", "0.5", "--format", "csv"])
        (row,) = rows(out)
        assert float(row["p_Dr"]) == pytest.approx(0.5) and float(row["p_Dt"]) == pytest.approx(0.5)

    def test_bad_grid(self):
        assert run_capture(["simulate", "--builtin", "rangwala-roy", "--phi", "0:1"])[0] == EXIT_INPUT

    def test_no_network(self):
        code, _, err = run_capture(["simulate", "--builtin", "qubit-zx"])
        assert code == EXIT_INPUT and err


class TestDuality:
    def test_partial_coherence(self):
        code, out, _ = run_capture(["duality", "--alpha2", "0.5", "--mu", "0.5", "--format", "csv"])
        assert code == EXIT_OK
        (row,) = rows(out)
        assert float(row["V"]) == pytest.approx(0.5) and float(row["P"]) == pytest.approx(0)
        assert float(row["P2plusV2"]) == pytest.approx(0.25)

    def test_which_path_only(self):
        (row,) = rows(run_capture(["duality", "--alpha2", "1", "--mu", "0", "--format", "csv"])[1])
        assert (float(row["P"]), float(row["V"])) == (1.0, 0.0)

    def test_eleven_rows_table(self):
        code, out, _ = run_capture(["duality", "--alpha2", "0:1:11", "--mu", "1"])
        data = [line.split() for line in out.splitlines() if line and not line.startswith("#")][1:]
        assert code == EXIT_OK and len(data) == 11
        assert all(r[4] == "1.000000" for r in data)

    def test_grid_saturates(self):
        code, out, _ = run_capture(["duality", "--alpha2", "0:1:101", "--format", "csv"])
        assert code == EXIT_OK
        assert all(abs(float(r["P2plusV2"]) - 1) <= 1e-12 for r in rows(out))

    def test_biprism_report(self):
        code, out, _ = run_capture(["duality", "--builtin", "biprism"])
        assert code == EXIT_OK
        assert "normalization, not complementarity" in out

    def test_out_of_range(self):
        assert run_capture(["duality", "--alpha2", "1.5"])[0] == EXIT_INPUT


class TestSceneFiles:
    def test_dump_round_trip(self, tmp_path):
        for name in ("rangwala-roy", "biprism", "qubit-zx", "double-slit"):
            path = tmp_path / f"{name}.json"
            code, first, _ = run_capture(["analyze", "--builtin", name, "--dump", str(path), "--format", "json"])
            assert code == EXIT_OK
            assert SceneFile.load(path).same_as(builtin(name))
            code, second, _ = run_capture(["analyze", str(path), "--format", "json"])
            assert code == EXIT_OK and second == first

    def test_byte_identical_output(self):
        args = ["simulate", "--builtin", "rangwala-roy", "--format", "csv"]
        assert run_capture(args)[1] == run_capture(args)[1]
        assert builtin("biprism").dumps() == builtin("biprism").dumps()

    def test_run_all_queries(self, tmp_path):
        path = tmp_path / "rr.json"
        builtin("rangwala-roy").dump(path)
        code, out, _ = run_capture(["run", str(path)])
        assert code == EXIT_OK
        assert out.count("## query") == 6

    def test_dimension_mismatch(self, tmp_path):
        doc = builtin("qubit-zx").to_dict()
        doc["dimension"] = 3
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SceneInputError):
            SceneFile.load(path)
        assert run_capture(["analyze", str(path)])[0] == EXIT_INPUT

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"version": 1, "dimension": ')
        with pytest.raises(SceneParseError):
            SceneFile.load(path)
        assert run_capture(["analyze", str(path)])[0] == EXIT_PARSE

    def test_missing_file(self, tmp_path):
        assert run_capture(["analyze", str(tmp_path / "nope.json")])[0] in (EXIT_INPUT, EXIT_PARSE)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "complement_lab", "analyze", "--builtin", "qubit-zx", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert rows(proc.stdout)[0]["relation"] == "Complementary"
