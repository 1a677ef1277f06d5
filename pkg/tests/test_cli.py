import csv
import json

import pytest

from stablelab.cli import main
from stablelab.export import filters_dot, hasse_dot, model_dot
from stablelab.lattice import chain, enumerate_distributive_lattices
from stablelab.modal import enumerate_stable_bimodules
from stablelab.modelfile import ModelFileError, dumps_model, load_model, loads_model
from stablelab.semantics import StableModel, valuations


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestModelFile:
    def test_d4_loads(self, fixtures):
        M = load_model(fixtures / "d4.json")
        assert len(M.worlds) == 4

    def test_bad_valuation(self, fixtures):
        with pytest.raises(ModelFileError, match="valuation 'p' is not a filter: missing a∧b"):
            load_model(fixtures / "bad_valuation.json")

    def test_pentagon(self, fixtures):
        with pytest.raises(ModelFileError, match=r"frame not distributive: witness \(c,a,b\)"):
            load_model(fixtures / "pentagon.json")

    def test_unknown_field(self):
        with pytest.raises(ModelFileError, match="unknown field 'colour'"):
            loads_model('{"elements": ["1"], "order": [], "valuation": {}, "colour": 1}')

    def test_syntax_error_has_line(self):
        with pytest.raises(ModelFileError) as e:
            loads_model('{\n  "elements": ["1"],\n  "order": [\n}')
        assert e.value.line == 4

    def test_not_a_lattice(self):
        with pytest.raises(ModelFileError, match="frame is not a lattice"):
            loads_model('{"elements": ["x", "y"], "order": [], "valuation": {}}')

    def test_cycle(self):
        with pytest.raises(ModelFileError, match="antisymmetric"):
            loads_model('{"elements": ["x", "y"], "order": [["x","y"],["y","x"]], "valuation": {}}')

    def test_bad_bimodule(self, fixtures):
        doc = json.loads((fixtures / "d4.json").read_text())
        doc["bimodule"] = [[w, v] for w in doc["elements"] for v in doc["elements"]]
        with pytest.raises(ModelFileError, match=r"bimodule fails condition \(iv\)"):
            loads_model(json.dumps(doc))

    def test_roundtrip_every_small_model(self):
        for W in enumerate_distributive_lattices(3):
            if W.size > 5:
                continue
            for B in (None,) + enumerate_stable_bimodules(W)[:3]:
                for val in valuations(W, ["p"]):
                    M = StableModel(W, val, B)
                    assert loads_model(dumps_model(M)) == M


class TestExport:
    def test_d4_hasse(self, fixtures):
        dot = hasse_dot(load_model(fixtures / "d4.json").frame)
        assert dot.count("[label=") == 4 and dot.count("->") == 4

    def test_c1_hasse(self):
        dot = hasse_dot(chain(1))
        assert dot.count("[label=") == 1 and dot.count("->") == 0

    def test_d4_filters_is_a_diamond(self, fixtures):
        dot = filters_dot(load_model(fixtures / "d4.json").frame)
        assert dot.count("[label=") == 4 and dot.count("->") == 4

    def test_bimodule_edges(self, fixtures):
        M = load_model(fixtures / "d4_modal.json")
        assert model_dot(M, "bimodule").count('[label="R"]') == len(M.bimodule.pairs())

    def test_bimodule_missing(self, fixtures):
        with pytest.raises(ValueError):
            model_dot(load_model(fixtures / "d4.json"), "bimodule")

    def test_deterministic(self, fixtures):
        M = load_model(fixtures / "d4_modal.json")
        assert all(model_dot(M, w) == model_dot(M, w) for w in ("hasse", "bimodule", "filters"))


class TestForceCommand:
    def test_true_with_witnesses(self, capsys, fixtures):
        code, out, _ = run(capsys, "force", fixtures / "d4.json", "0", "p | q", "--explain")
        assert code == 0 and out.startswith("true")
        assert "witnesses (a,b)" in out

    def test_false(self, capsys, fixtures):
        code, out, _ = run(capsys, "force", fixtures / "d4.json", "0", "p")
        assert code == 1 and out.strip() == "false"

    def test_supernova_bot(self, capsys, fixtures):
        code, out, _ = run(capsys, "force", fixtures / "d4.json", "1", "bot")
        assert code == 0 and out.strip() == "true"

    def test_unknown_world(self, capsys, fixtures):
        code, _, err = run(capsys, "force", fixtures / "d4.json", "zz", "p")
        assert code == 2 and "unknown world" in err

    def test_unbound_atom(self, capsys, fixtures):
        code, _, err = run(capsys, "force", fixtures / "d4.json", "0", "r")
        assert code == 2 and "'r'" in err
        code, out, _ = run(capsys, "force", fixtures / "d4.json", "1", "r", "--lenient")
        assert code == 0

    def test_parse_error(self, capsys, fixtures):
        code, _, err = run(capsys, "force", fixtures / "d4.json", "0", "p ->")
        assert code == 2 and "end of input" in err

    def test_invalid_model(self, capsys, fixtures):
        code, _, err = run(capsys, "force", fixtures / "pentagon.json", "0", "top")
        assert code == 2 and "witness (c,a,b)" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "force", tmp_path / "nope.json", "0", "top")
        assert code == 2


class TestSearchCommand:
    @pytest.mark.parametrize("formula", ["((p->q)->p)->p", "p | ~p"])
    def test_found(self, capsys, tmp_path, formula):
        out_file = tmp_path / "cm.json"
        code, out, _ = run(capsys, "search", formula, "-o", out_file, "--png", tmp_path / "cm.png")
        assert code == 0
        first, rest = out.split("\n", 1)
        assert first == "world: {}"
        M = loads_model(rest)
        assert len(M.worlds) == 3
        assert load_model(out_file) == M
        assert (tmp_path / "cm.png").stat().st_size > 0

    def test_exhausted(self, capsys):
        code, out, _ = run(capsys, "search", "p -> p")
        assert code == 1 and out.strip() == "exhausted"

    def test_cap(self, capsys):
        code, _, err = run(capsys, "search", "p & q & r")
        assert code == 2 and "cap" in err

    def test_env_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("STABLELAB_MAX_BASE", "2")
        code, _, err = run(capsys, "search", "p", "--max-base", "3")
        assert code == 2 and "exceeds cap 2" in err

    def test_deterministic(self, capsys):
        assert run(capsys, "search", "p | ~p") == run(capsys, "search", "p | ~p")


class TestVerifyCommand:
    def test_adjunction(self, capsys, tmp_path):
        code, out, _ = run(capsys, "verify", "adjunction", "--max-base", "3", "--out", tmp_path)
        assert code == 0
        report = json.loads(out)
        assert report["passed"] and report["instances"] > 0
        rows = list(csv.DictReader(open(tmp_path / "adjunction.csv")))
        assert sum(int(r["instances"]) for r in rows) == report["instances"]
        assert (tmp_path / "adjunction.png").stat().st_size > 0

    def test_johnstone_note(self, capsys):
        code, out, _ = run(capsys, "verify", "johnstone", "--max-base", "3")
        assert code == 0 and "orientation" in json.loads(out)["notes"][0]

    def test_unknown_suite(self, capsys):
        code, _, err = run(capsys, "verify", "nope")
        assert code == 2 and "unknown suite" in err

    def test_stable_output(self, capsys):
        a = run(capsys, "verify", "filtering", "--max-base", "2", "--no-duration")
        b = run(capsys, "verify", "filtering", "--max-base", "2", "--no-duration")
        assert a[0] == 0 and a[1] == b[1]


class TestExportCommand:
    def test_hasse(self, capsys, fixtures, tmp_path):
        code, out, _ = run(capsys, "export-dot", fixtures / "d4.json", "--what", "hasse",
                           "--png", tmp_path / "h.png")
        assert code == 0 and out.startswith("digraph hasse")
        assert (tmp_path / "h.png").exists()

    def test_bad_model(self, capsys, fixtures):
        code, _, err = run(capsys, "export-dot", fixtures / "bad_valuation.json")
        assert code == 2 and "missing a∧b" in err
