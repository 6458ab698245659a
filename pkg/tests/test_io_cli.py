import json
import subprocess
import sys

import pytest

from disclab import io as dio
from disclab.cli import main
from disclab.errors import ParseError
from disclab.generators import gen_clique_cycle, gen_petersen
from disclab.graph import EdgeColouring
from disclab.separation import BalancedSeparation


class TestRoundtrip:
    def test_graph(self, tmp_path):
        g = gen_petersen()
        p = tmp_path / "g.json"
        dio.write_json(p, dio.graph_to_json(g))
        assert dio.io_roundtrip(p) == g

    def test_colouring(self, tmp_path):
        f = EdgeColouring(3, [1, 2, 3, 3])
        p = tmp_path / "f.json"
        dio.write_json(p, dio.colouring_to_json(f))
        assert dio.io_roundtrip(p) == f

    def test_separation(self, tmp_path):
        sep = BalancedSeparation(2, (frozenset({0}), frozenset({3})), frozenset({1, 2}))
        p = tmp_path / "s.json"
        dio.write_json(p, dio.separation_to_json(sep))
        assert dio.io_roundtrip(p) == sep

    def test_meta(self, tmp_path):
        _, meta = gen_clique_cycle(2, 3, (0, 1))
        p = tmp_path / "m.json"
        dio.write_json(p, dio.meta_to_json(meta))
        assert dio.io_roundtrip(p) == meta

    def test_canonical_text(self):
        assert dio.dumps({"b": 1, "a": [1]}) == '{\n  "a": [\n    1\n  ],\n  "b": 1\n}\n'


class TestParseErrors:
    def test_colour_zero(self):
        with pytest.raises(ParseError) as exc:
            dio.colouring_from_json({"r": 2, "colours": [1, 0]})
        assert "$.colours[1]" in str(exc.value)

    def test_bad_edge(self):
        with pytest.raises(ParseError):
            dio.graph_from_json({"n": 3, "edges": [[0, 1, 2]]})
        with pytest.raises(ParseError):
            dio.graph_from_json({"n": 3, "edges": [[0, 0]]})
        with pytest.raises(ParseError):
            dio.graph_from_json({"n": "3", "edges": []})

    def test_length_mismatch(self):
        with pytest.raises(ParseError):
            dio.colouring_from_json({"r": 2, "colours": [1]}, gen_petersen())

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{")
        with pytest.raises(ParseError):
            dio.read_json(p)

    def test_unknown_kind(self):
        with pytest.raises(ParseError):
            dio.detect_kind({"foo": 1})


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


class TestCli:
    def test_gen_and_disc(self, tmp_path, capsys):
        g = str(tmp_path / "g.json")
        f = str(tmp_path / "f.json")
        assert main(["gen", "hedgehog", "--n", "6", "--out", g, "--colouring-out", f]) == 0
        capsys.readouterr()
        assert main(["disc", "--graph", g, "--colouring", f, "--json"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["value"] == 1

    def test_exact_graph_discrepancy(self, tmp_path, capsys):
        g = write(tmp_path, "g.json", {"n": 4, "edges": [[0, 1], [1, 2], [2, 3]]})
        assert main(["disc", "--graph", g, "--r", "2"]) == 0
        assert "= 1" in capsys.readouterr().out

    def test_sep(self, tmp_path, capsys):
        g = write(tmp_path, "g.json", dio.graph_to_json(gen_petersen()))
        assert main(["sep", "--graph", g, "--json", "--bounds"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["s"] == 6 and out["lower_bounds"]["kappa"] == 3

    def test_sep_check_invalid(self, tmp_path):
        g = write(tmp_path, "g.json", {"n": 4, "edges": [[0, 1], [1, 2], [2, 3]]})
        s = write(tmp_path, "s.json", {"r": 2, "parts": [[0, 1], [2, 3]], "separator": []})
        assert main(["sep", "--graph", g, "--check", s]) == 1

    def test_extract(self, tmp_path, capsys):
        g = str(tmp_path / "g.json")
        f = str(tmp_path / "f.json")
        trace = str(tmp_path / "t.json")
        assert main(["gen", "clique-cycle", "--k", "3", "--x", "0", "1", "--out", g, "--colouring-out", f]) == 0
        assert main(["extract", "--graph", g, "--colouring", f, "--trace", trace, "--json"]) == 0
        t = json.loads(open(trace).read())
        assert all(c["holds"] is not False for c in t["checks"].values())

    def test_extremal(self, capsys):
        assert main(["extremal", "phi", "--r", "3", "--n", "6", "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["phi"] == 4
        assert main(["extremal", "dc-scan", "--k", "6", "--x", "0", "1"]) == 0

    def test_ham(self, tmp_path, capsys):
        g = write(tmp_path, "g.json", dio.graph_to_json(gen_petersen()))
        assert main(["ham", "forced", "--graph", g, "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["found"] is False

    def test_budget_exit_code(self, tmp_path):
        g = write(tmp_path, "g.json", dio.graph_to_json(gen_petersen()))
        assert main(["disc", "--graph", g, "--r", "3", "--budget", "5"]) == 2

    def test_error_exit_codes(self, tmp_path):
        assert main(["disc", "--graph", str(tmp_path / "missing.json")]) == 1
        bad = write(tmp_path, "f.json", {"r": 2, "colours": [0]})
        g = write(tmp_path, "g.json", {"n": 2, "edges": [[0, 1]]})
        assert main(["disc", "--graph", g, "--colouring", bad]) == 1
        with pytest.raises(SystemExit) as exc:
            main(["gen", "nonsense"])
        assert exc.value.code == 1

    def test_io_commands(self, tmp_path, capsys):
        g = write(tmp_path, "g.json", dio.graph_to_json(gen_petersen()))
        assert main(["io", "roundtrip", g]) == 0
        assert main(["io", "validate", g, "--json"]) == 0
        capsys.readouterr()
        assert main(["io", "dot", g]) == 0
        assert capsys.readouterr().out.startswith("graph G {")

    def test_experiment(self, tmp_path, capsys):
        out = str(tmp_path / "rep.json")
        assert main(["experiment", "eq1-suite", "--param", "nmax=4", "--out", out]) == 0
        rep = json.loads(open(out).read())
        assert rep["summary"]["violations"] == 0

    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "disclab.cli", "gen", "petersen", "--json"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["graph"]["n"] == 10
