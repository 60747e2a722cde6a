import json

import numpy as np
import pytest

from catalog.entries import round_cone_polar
from config import CheckConfig
from handlers.construct import CONSTRUCTIONS, GUARANTEED_FLAGS, _verify_guarantees
from handlers.spec_file import load_spec, read_document, spec_from_document
from main import main
from tools.tensor import metric_at
from utils.error_handler import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, ConstructionError, SpecFileError
from utils.jet import evaluate

FAST = ["--samples", "12", "--seed", "42"]

CONTACT_INPUT = {
    "chart": {"coords": ["x", "y", "z", "t"], "bounds": {"t": [0, None]}, "sample_box": {"t": [0.5, 2.0]}},
    "cone": {"g_M": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]], "alpha": ["-y", "0", "1"]},
}


@pytest.fixture(autouse=True)
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _write(path, document):
    path.write_text(json.dumps(document))
    return str(path)


class TestClassifyCommand:
    def test_exported_round_cone(self, workspace, capsys):
        assert main(["catalog", "export", "round_cone_polar", "round.json"]) == EXIT_OK
        capsys.readouterr()
        assert main(["classify", "round.json", "--json", *FAST]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["spec_id"] == "round_cone_polar"
        assert payload["flags"]["conical_riemannian"] == "pass"
        assert payload["mismatches"] == []

    def test_text_report(self, workspace, capsys):
        main(["catalog", "export", "warped_noncone", "warped.json"])
        capsys.readouterr()
        assert main(["classify", "warped.json", *FAST]) == EXIT_OK
        assert "📐 warped_noncone" in capsys.readouterr().out

    def test_expectation_mismatch(self, workspace, capsys):
        main(["catalog", "export", "contact_cone", "contact.json"])
        document = read_document("contact.json")
        document["expected"]["conical_riemannian"] = "pass"
        _write(workspace / "contact.json", document)
        assert main(["classify", "contact.json", "--json", *FAST]) == EXIT_MISMATCH
        payload = json.loads(capsys.readouterr().out)
        assert payload["mismatches"] == ["conical_riemannian"]

    def test_unknown_coordinate(self, workspace):
        path = _write(workspace / "bad.json", {
            "chart": {"coords": ["x", "y"]},
            "metric": [["1", "0"], ["0", "q"]],
            "xi": ["x", "y"],
        })
        assert main(["classify", path, *FAST]) == EXIT_ERROR

    def test_malformed_json(self, workspace):
        (workspace / "broken.json").write_text('{\n  "chart": ,\n}')
        assert main(["classify", "broken.json", *FAST]) == EXIT_ERROR
        with pytest.raises(SpecFileError) as exc:
            load_spec("broken.json")
        assert exc.value.line == 2
        assert exc.value.column is not None

    def test_missing_file(self, workspace):
        assert main(["classify", "nowhere.json"]) == EXIT_ERROR

    @pytest.mark.parametrize(
        "document, key",
        [
            ({"chart": {"coords": ["x"]}, "metric": [["1"]], "xi": ["x"], "colour": 1}, "<top>"),
            ({"chart": {"coords": ["x"]}, "metric": [["1"]]}, "xi"),
            ({"chart": {"coords": ["x"]}, "xi": ["x"]}, "<top>"),
            ({"chart": {"coords": ["x"]}, "metric": [["1"]], "xi": ["x"], "expected": {"selfsimilar": "maybe"}},
             "expected.selfsimilar"),
        ],
    )
    def test_schema_errors_name_the_key(self, document, key):
        with pytest.raises(SpecFileError) as exc:
            spec_from_document(document, "inline.json")
        assert exc.value.key == key


class TestConstructCommand:
    def test_extensive_from_cone(self, workspace):
        main(["catalog", "export", "round_cone_polar", "round.json"])
        assert main(["construct", "extensive-from-cone", "round.json", "extensive.json", *FAST]) == EXIT_OK

        document = read_document("extensive.json")
        assert "extensive_hessian_match" in [r["name"] for r in document["verification"]]
        assert document["expected"] == {"extensive_exists": "pass"}

        spec = load_spec("extensive.json")
        np.testing.assert_allclose(metric_at(spec.metric, (0.4, 1.5)).values, [[1.5, 0.0], [0.0, 0.0]])
        assert main(["classify", "extensive.json", *FAST]) == EXIT_OK

    def test_extensive_from_cone_needs_plain_cone(self, workspace):
        main(["catalog", "export", "contact_cone", "contact.json"])
        assert main(["construct", "extensive-from-cone", "contact.json", "out.json", *FAST]) == EXIT_ERROR

    def test_extensive_from_conical_rejects_contact_cone(self, workspace):
        main(["catalog", "export", "contact_cone", "contact.json"])
        assert main(["construct", "extensive-from-conical", "contact.json", "out.json", *FAST]) == EXIT_ERROR
        assert not (workspace / "out.json").exists()

    def test_selfsimilar_from_contact(self, workspace):
        path = _write(workspace / "contact_in.json", CONTACT_INPUT)
        assert main(["construct", "selfsimilar-from-contact", path, "out.json", *FAST]) == EXIT_OK
        document = read_document("out.json")
        assert document["expected"] == {"selfsimilar": "pass", "conical_riemannian": "fail"}
        assert document["cone"]["f_placement"] == "base"
        assert main(["classify", "out.json", *FAST]) == EXIT_OK

    def test_selfsimilar_from_closed_form(self, workspace):
        document = json.loads(json.dumps(CONTACT_INPUT))
        document["cone"]["alpha"] = ["0", "0", "1"]
        path = _write(workspace / "closed.json", document)
        assert main(["construct", "selfsimilar-from-contact", path, "out.json", *FAST]) == EXIT_ERROR

    @pytest.mark.parametrize("kind", ["lemma212-f", "positivity-f"])
    def test_positivity_f(self, workspace, kind):
        path = _write(workspace / "flat.json", {
            "chart": {"coords": ["x", "t"], "bounds": {"t": [0, None]}},
            "cone": {"g_M": [["1"]], "alpha": ["0"]},
        })
        assert main(["construct", kind, path, "out.json", "--margin", "1", *FAST]) == EXIT_OK
        spec = load_spec("out.json")
        assert evaluate(spec.cone.f, (0.3,)) == pytest.approx(1.0)
        document = read_document("out.json")
        assert document["verification"][0]["verdict"] == "pass"
        assert document["expected"] == {"selfsimilar": "pass"}

    def test_positivity_f_with_contact_form(self, workspace):
        path = _write(workspace / "contact_in.json", CONTACT_INPUT)
        assert main(["construct", "lemma212-f", path, "out.json", "--margin", "0.5", *FAST]) == EXIT_OK
        spec = load_spec("out.json")
        assert evaluate(spec.cone.f, (0.0, 2.0, 0.0)) == pytest.approx(5.5)
        assert main(["classify", "out.json", *FAST]) == EXIT_OK

    def test_guarantee_violation_is_an_error(self):
        config = CheckConfig(samples=12, seed=42, workers=1)
        with pytest.raises(ConstructionError) as exc:
            _verify_guarantees(round_cone_polar().spec, "selfsimilar-from-contact", config)
        assert exc.value.check == "conical_riemannian"

    def test_every_kind_declares_guarantees(self):
        assert set(GUARANTEED_FLAGS) == set(CONSTRUCTIONS)


class TestCatalogAndSuiteCommands:
    def test_catalog_list(self, capsys):
        assert main(["catalog", "list"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "round_cone_polar" in out and "product_nonselfsimilar" in out

    def test_unknown_catalog_id(self):
        assert main(["catalog", "export", "klein_bottle", "out.json"]) == EXIT_ERROR

    def test_verify_theorems(self, capsys):
        assert main(["verify-theorems", "--samples", "16", "--json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["passed"] is True
