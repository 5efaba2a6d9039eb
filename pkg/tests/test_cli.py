import json
import subprocess
import sys
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import rationals
from isoparam.cli import (
    ArrangementDocument,
    format_rational,
    loads_document,
    main,
    model_document,
    parse_rational,
)
from isoparam.errors import ParseError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_doc(tmp_path, symbol, name="doc.json", mutate=None):
    d = json.loads(model_document(symbol).dumps())
    if mutate:
        mutate(d)
    p = tmp_path / name
    p.write_text(json.dumps(d, indent=2))
    return str(p)


class TestRationals:
    @pytest.mark.parametrize("text, value", [("3", F(3)), ("-1/2", F(-1, 2)), ("4/6", F(2, 3)), (7, F(7))])
    def test_parse(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("bad", ["1/0", "0.5", 0.5, True, "x", "", None])
    def test_reject(self, bad):
        with pytest.raises(ValueError):
            parse_rational(bad)

    @given(rationals())
    def test_round_trip(self, q):
        assert parse_rational(format_rational(q)) == q


class TestDocument:
    @pytest.mark.parametrize("symbol", ["A~2", "B~3", "C~2", "G~2", "(C~2^v,C~2)"])
    def test_parse_serialize_identity(self, symbol):
        for with_length in (False, True):
            text = model_document(symbol, with_length).dumps()
            doc = loads_document(text)
            assert doc.dumps() == text
            assert loads_document(doc.dumps()).as_dict() == doc.as_dict()

    @given(
        st.lists(st.tuples(rationals(), rationals()).filter(lambda v: v != (0, 0)), min_size=1, max_size=3),
        rationals(),
    )
    def test_round_trip_property(self, normals, phase):
        fams = [
            {"label": "f%d" % k, "direction": [format_rational(a), format_rational(b)], "spacing": "3/2",
             "phase": format_rational(phase), "reducible": bool(k % 2)}
            for k, (a, b) in enumerate(normals)
        ]
        raw = {"dim": 2, "families": fams, "basepoint": ["1/3", "0"], "window_radius": "5"}
        doc = loads_document(json.dumps(raw))
        assert loads_document(doc.dumps()).dumps() == doc.dumps()

    def test_bad_rational_location(self):
        text = '{\n  "dim": 1,\n  "families": [\n    {"label": "a", "direction": ["1"], "spacing": "1/0"}\n  ]\n}\n'
        with pytest.raises(ParseError) as e:
            loads_document(text)
        assert (e.value.line, e.value.column) == (4, 51)
        assert "spacing" in str(e.value)

    def test_syntax_error_location(self):
        with pytest.raises(ParseError) as e:
            loads_document('{\n  "dim": 2,\n  "families": [}\n')
        assert e.value.line == 3

    @pytest.mark.parametrize(
        "raw",
        [
            {"dim": 2},
            {"dim": 0, "families": []},
            {"dim": 2, "families": [{"label": "a", "direction": ["1"], "spacing": "1"}]},
            {"dim": 1, "families": [{"label": "a", "direction": ["1"], "spacing": "-1"}]},
            {"dim": 1, "families": [{"label": "a", "direction": ["1"], "spacing": "1", "colour": "red"}]},
            {"dim": 1, "families": [{"label": "a", "direction": ["1"], "spacing": "1"}], "extra": 1},
            {"dim": 1, "families": [{"label": "a", "direction": ["1"], "spacing": "1", "reducible": "yes"}]},
        ],
    )
    def test_invalid(self, raw):
        with pytest.raises(ParseError):
            loads_document(json.dumps(raw))

    def test_partial_length2(self):
        d = json.loads(model_document("C~2", True).dumps())
        del d["families"][0]["length2"]
        with pytest.raises(ParseError):
            loads_document(json.dumps(d))


class TestClassify:
    def test_b3(self, capsys, tmp_path):
        code, out, _ = run(capsys, "classify", write_doc(tmp_path, "B~3"))
        rep = json.loads(out)
        assert code == 0
        res = {r["name"]: r for r in rep["results"]}
        assert res["symbol"]["value"] == "B~3"
        assert res["vertex-orbits"]["value"] == 2
        assert res["wall-conjugacy-cross-check"]["passed"]

    def test_c2_extremal_reducible(self, capsys, tmp_path):
        def circle(d):
            for f in d["families"]:
                if f["label"].startswith(("even", "odd")):
                    f["reducible"] = True

        code, out, _ = run(capsys, "classify", write_doc(tmp_path, "C~2", mutate=circle), "--format", "dot")
        assert code == 0
        assert "(C~2^v,C~2)" in out
        assert "peripheries=2" in out

    def test_dot_arrows(self, capsys, tmp_path):
        _, out, _ = run(capsys, "classify", write_doc(tmp_path, "G~2"), "--format", "dot")
        assert "->" in out and "multiplicity=3" in out

    def test_text(self, capsys, tmp_path):
        code, out, _ = run(capsys, "classify", write_doc(tmp_path, "A~3"), "--format", "text")
        assert code == 0 and "A~3" in out

    def test_malformed(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"dim": 1, "families": [{"label": "a", "direction": ["1"], "spacing": "1/0"}]}')
        code, out, err = run(capsys, "classify", str(p))
        assert code == 2
        rep = json.loads(out)
        assert rep["error"]["code"] == "parse-error"
        assert rep["error"]["line"] == 1 and rep["error"]["column"] is not None
        assert "1/0" in err or "zero" in err

    def test_rank_one(self, capsys, tmp_path):
        p = tmp_path / "r1.json"
        p.write_text(json.dumps({"dim": 1, "families": [{"label": "a", "direction": ["1"], "spacing": "1"}]}))
        code, out, _ = run(capsys, "classify", str(p))
        assert code == 2
        assert json.loads(out)["error"]["code"] == "unsupported"

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "classify", str(tmp_path / "nope.json"))
        assert code == 2

    def test_figure(self, capsys, tmp_path):
        png = tmp_path / "fig.png"
        code, _, _ = run(capsys, "classify", write_doc(tmp_path, "C~2"), "--figure", str(png))
        assert code == 0
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "rep.json"
        code, out, _ = run(capsys, "classify", write_doc(tmp_path, "A~2"), "-o", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["command"] == "classify"

    def test_deterministic(self, capsys, tmp_path):
        doc = write_doc(tmp_path, "F~4")
        first = run(capsys, "classify", doc)[1]
        assert first == run(capsys, "classify", doc)[1]

    def test_window_radius_flag(self, capsys, tmp_path):
        doc = write_doc(tmp_path, "G~2")
        a = json.loads(run(capsys, "classify", doc)[1])
        b = json.loads(run(capsys, "classify", doc, "--window-radius", "7")[1])
        assert a["results"][0]["value"] == b["results"][0]["value"] == "G~2"
        assert a["inputs_digest"] != b["inputs_digest"]


class TestOtherDocumentCommands:
    def test_axioms(self, capsys, tmp_path):
        code, out, _ = run(capsys, "axioms", write_doc(tmp_path, "C~3"))
        rep = json.loads(out)
        assert code == 0
        assert {"axiom-i", "axiom-ii", "axiom-iii", "axiom-iv"} <= {r["name"] for r in rep["results"]}

    def test_orbits(self, capsys, tmp_path):
        code, out, _ = run(capsys, "orbits", write_doc(tmp_path, "C~3"))
        res = {r["name"]: r for r in json.loads(out)["results"]}
        assert code == 0 and res["vertex-orbits"]["value"] == 3

    def test_restrict(self, capsys, tmp_path):
        doc = write_doc(tmp_path, "B~3")
        code, out, _ = run(capsys, "restrict", doc, "--direction", "0,1,-1", "--direction", "0,0,1")
        res = {r["name"]: r for r in json.loads(out)["results"]}
        assert code == 0 and res["rank"]["value"] == 2
        assert all(r["passed"] for r in res.values())

    def test_restrict_bad_direction(self, capsys, tmp_path):
        code, _, _ = run(capsys, "restrict", write_doc(tmp_path, "B~3"), "--direction", "1,0")
        assert code == 2


class TestSupport:
    @pytest.mark.parametrize(
        "argv, allowed",
        [
            (["A~3", "0", "7"], ["zero"]),
            (["C~3", "0", "1"], ["zero", "(a,-1)", "(a,2)"]),
            (["C~3", "0", "2", "--reducible", "--block", "double_primed"], ["zero"]),
        ],
    )
    def test_examples(self, capsys, argv, allowed):
        code, out, _ = run(capsys, "support", *argv)
        rep = json.loads(out)
        assert code == 0
        assert rep["results"][0]["value"] == allowed

    def test_text(self, capsys):
        code, out, _ = run(capsys, "support", "C~3", "0", "1", "--format", "text")
        assert out.splitlines()[0] == "{zero, (a,-1), (a,2)}"

    def test_equal_indices(self, capsys):
        code, out, _ = run(capsys, "support", "C~3", "2", "2")
        assert code == 2 and json.loads(out)["error"]["code"] == "invalid-pair"

    def test_block_conflict(self, capsys):
        code, _, _ = run(capsys, "support", "C~3", "0", "2", "--block", "primed", "--block-x", "primed")
        assert code == 2


class TestVerify:
    def test_a2(self, capsys):
        code, out, _ = run(capsys, "verify", "--model", "a2", "--trials", "100", "--seed", "1")
        rep = json.loads(out)
        assert code == 0 and rep["ok"] and rep["seed"] == 1

    def test_bc2_block_results(self, capsys):
        code, out, _ = run(capsys, "verify", "--model", "bc2", "--trials", "5")
        names = {r["name"]: r for r in json.loads(out)["results"]}
        assert code == 0
        assert names["diagonal-reducible"]["passed"] and names["diagonal-reducible"]["checked"] > 0

    def test_g2(self, capsys):
        code, out, err = run(capsys, "verify", "--model", "g2")
        assert code == 2
        assert json.loads(out)["error"]["code"] == "unknown-model"
        assert "g2" in err.lower()

    def test_deterministic(self, capsys):
        a = run(capsys, "verify", "--model", "b2", "--trials", "5", "--seed", "9")[1]
        b = run(capsys, "verify", "--model", "b2", "--trials", "5", "--seed", "9")[1]
        assert a == b


class TestScalars:
    def test_normal_sum(self, capsys):
        code, out, _ = run(capsys, "normal-sum", "1/2", "1")
        lo, hi = (F(x) for x in json.loads(out)["results"][0]["value"])
        assert code == 0
        assert float(lo) <= 9.869604401089358 <= float(hi)

    def test_normal_sum_bad(self, capsys):
        assert run(capsys, "normal-sum", "1/0", "1")[0] == 2

    def test_euclid_scan_small_regime(self, capsys):
        code, out, _ = run(capsys, "euclid-scan", "--regime", "pi4", "--format", "text")
        assert code == 0 and "dichotomy-pi4" in out


class TestDiagram:
    def test_round_trip(self, capsys):
        code, out, _ = run(capsys, "diagram", "F~4")
        assert code == 0 and json.loads(out)["results"][0]["value"] == "F~4"

    def test_dual_reverses_arrows(self, capsys):
        a = json.loads(run(capsys, "diagram", "B~3")[1])["diagram"]
        b = json.loads(run(capsys, "diagram", "B~3", "--dual")[1])["diagram"]
        flip = sorted((e["to"], e["from"]) for e in a["arrows"])
        assert a["arrows"] and sorted((e["from"], e["to"]) for e in b["arrows"]) == flip

    def test_document_classifies(self, capsys, tmp_path):
        _, text, _ = run(capsys, "diagram", "(C~2^v,C~2')", "--document")
        p = tmp_path / "m.json"
        p.write_text(text)
        code, out, _ = run(capsys, "classify", str(p))
        assert code == 0 and json.loads(out)["results"][0]["value"] == "(C~2^v,C~2')"

    def test_figure(self, capsys, tmp_path):
        png = tmp_path / "g.png"
        assert run(capsys, "diagram", "E~6", "--figure", str(png))[0] == 0
        assert png.stat().st_size > 1000

    def test_unknown_symbol(self, capsys):
        assert run(capsys, "diagram", "Q~9")[0] == 2


def test_usage_errors(capsys):
    for argv in ([], ["classify"], ["support", "A~3", "x", "1"], ["verify"]):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 2
    capsys.readouterr()


def test_console_script(tmp_path):
    r = subprocess.run([sys.executable, "-m", "isoparam.cli", "support", "A~3", "0", "7"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["results"][0]["value"] == ["zero"]
