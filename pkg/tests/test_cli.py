import json
import shutil
import subprocess
import sys

import jsonschema
import pytest

from fuzzyreserve.cli import main
from fuzzyreserve.datasets import taylor_ashe_path
from fuzzyreserve.report import load_schema
from synth import additive_triangle

TA = str(taylor_ashe_path())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema())
    return doc, out


@pytest.fixture
def write(tmp_path):
    def _write(text, name="t.csv"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", TA)
    assert code == 0
    assert out.strip() == "valid: k=10, 55 observed cells"


def test_validate_zero_amount(capsys, write):
    code, _, err = run(capsys, "validate", write("1,2\n0,\n"))
    assert code == 2
    assert "NonPositiveAmount" in err and "(2,1)" in err


@pytest.mark.parametrize("text", ["", "1,2,3\n4,5\n6\n7\n"])
def test_validate_bad_input(capsys, write, text):
    code, _, err = run(capsys, "validate", write(text))
    assert code == 2
    assert err.startswith("error:")


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "validate", str(tmp_path / "nope.csv"))
    assert code == 2


def test_fit_classical(capsys):
    doc, _ = run_json(capsys, "fit", TA, "--model", "classical")
    assert doc["total"] == pytest.approx(18_680_856, rel=1e-3)
    assert doc["psi"] == pytest.approx(52601.93, rel=0.01)
    assert len(doc["predictions"]) == 10
    assert doc["per_origin"][0] == {"origin": 1, "reserve": 0.0}


def test_fit_hybrid(capsys):
    doc, _ = run_json(capsys, "fit", TA, "--model", "hybrid")
    assert doc["h_star"] == pytest.approx(0.115, abs=0.02)
    assert doc["coefficients"][0]["name"] == "tau"
    assert len(doc["coefficients"][0]["tfn"]) == 3
    assert doc["provenance"]["config"]["convention"] == "reference"


def test_fit_table(capsys):
    code, out, _ = run(capsys, "fit", TA)
    assert code == 0
    doc, _ = run_json(capsys, "fit", TA)
    assert f"{doc['total']:,.2f}" in out


def test_fit_k1(capsys, write):
    path = write("5.0\n")
    for model in ("classical", "hybrid"):
        doc, _ = run_json(capsys, "fit", path, "--model", model)
        assert doc["total"] == 0
        assert doc["per_origin"] == [{"origin": 1, "reserve": 0.0}]


def test_bootstrap_rejects_few_reps(capsys):
    code, _, err = run(capsys, "bootstrap", TA, "--reps", "50")
    assert code == 2
    assert "replications" in err


def test_bootstrap_classical(capsys):
    doc, _ = run_json(capsys, "bootstrap", TA, "--reps", "1000", "--seed", "42")
    v = doc["variability"]
    assert v["sd"] == pytest.approx(2_706_597, rel=0.2)
    assert v["replications"] == 1000 and v["seed"] == 42


def test_bootstrap_byte_identical(capsys):
    args = ("bootstrap", TA, "--reps", "150", "--seed", "5")
    _, first = run_json(capsys, *args)
    _, second = run_json(capsys, *args)
    _, threaded = run_json(capsys, *args, "--workers", "3")
    assert first == second == threaded


@pytest.fixture(scope="module")
def comparison():
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        assert main(["compare", TA, "--reps", "1000", "--seed", "42", "--format", "json", "--workers", "4"]) == 0
    return json.loads(buf.getvalue())


def test_compare(comparison):
    jsonschema.validate(comparison, load_schema())
    c, h = comparison["classical"]["variability"], comparison["hybrid"]["variability"]
    assert h["ep"] < c["ep"]
    assert h["sd"] < c["sd"]
    assert comparison["winners"]["ep"] == comparison["winners"]["sd"] == "hybrid"


@pytest.mark.xfail(strict=True, reason="hybrid MSE comes out below classical MSE on this fixture at seed 42")
def test_compare_hybrid_mse_worse(comparison):
    assert comparison["hybrid"]["variability"]["mse"] > comparison["classical"]["variability"]["mse"]


def test_compare_additive(capsys, write):
    path = write(additive_triangle(5).to_csv())
    doc, _ = run_json(capsys, "compare", path, "--reps", "100", "--convention", "standard")
    assert doc["hybrid"]["total"] == pytest.approx(doc["classical"]["total"], rel=1e-9)


def test_compare_table(capsys):
    code, out, _ = run(capsys, "compare", TA, "--reps", "100")
    assert code == 0
    assert out.splitlines()[0].split() == ["classical", "hybrid", "better"]
    assert "h* =" in out


@pytest.mark.skipif(shutil.which("fuzzyreserve") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["fuzzyreserve", "validate", TA], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == "valid: k=10, 55 observed cells"


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "fuzzyreserve.cli", "validate", "/nonexistent.csv"], capture_output=True, text=True)
    assert res.returncode == 2

