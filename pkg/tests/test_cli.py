import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from stepcalc.cli import main
from stepcalc.dsl import compile_source
from stepcalc.serialize import dumps
from stepcalc.steppoly import StepPoly, ae_equal

DEMOS = Path(__file__).resolve().parent.parent / "demos" / "manifests"


def run(tmp_path, text, *argv, name="m.toml"):
    m = tmp_path / name
    m.write_text(text)
    out = tmp_path / "out"
    code = main(["--manifest", str(m), "--output", str(out), *argv])
    return code, out


def report(out, command):
    return json.loads((out / f"{command}.json").read_text())


PDCEE = """
vars = ["x1", "x2"]
[functions]
chi = "frac(2*x1 - x2 + 1/3)"
prod = "frac(x1)*frac(x2)"
[subgroups]
A = {{ coords = [0] }}
B = {{ coords = [1] }}
[verify-pdcee]
function = "{f}"
subgroups = ["A", "B"]
"""


def test_pdcee_affine_character_passes(tmp_path):
    code, out = run(tmp_path, PDCEE.format(f="chi"), "verify-pdcee")
    assert code == 0
    assert report(out, "verify-pdcee")["holds"] is True


def test_pdcee_product_fails_with_witness(tmp_path):
    code, out = run(tmp_path, PDCEE.format(f="prod"), "verify-pdcee")
    assert code == 1
    rep = report(out, "verify-pdcee")
    assert rep["holds"] is False
    assert len(rep["witnesses"][0]) == 4


def test_mismatched_dimensions_exit_2(tmp_path, capsys):
    text = PDCEE.format(f="chi").replace('A = { coords = [0] }', 'A = { coords = [0], dim = 3 }')
    code, out = run(tmp_path, text, "verify-pdcee")
    assert code == 2
    assert not (out / "verify-pdcee.json").exists()
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text",
    [
        "vars = [",  # not TOML
        'vars = ["x"]\n[functions]\nf = "frac(x"\n[complexity]\nfunction = "f"',
        'vars = ["x"]\n[functions]\nf = "frac(y)"\n[complexity]\nfunction = "f"',
        'vars = ["x"]\n[complexity]\nfunction = "missing"',
        'vars = ["x"]\n[functions]\nf = "floor(frac(x)*frac(x))"\n[complexity]\nfunction = "f"',
        'vars = ["x"]\n[complexity]',
    ],
)
def test_malformed_input_exit_2(tmp_path, text):
    code, out = run(tmp_path, text, "complexity")
    assert code == 2
    assert not out.exists() or not any(out.iterdir())


def test_missing_manifest_exit_2(tmp_path):
    assert main(["--manifest", str(tmp_path / "nope.toml"), "--output", str(tmp_path), "complexity"]) == 2


def test_failed_run_keeps_previous_report(tmp_path):
    good = 'vars = ["x"]\n[functions]\nf = "frac(x)"\n[complexity]\nfunction = "f"'
    code, out = run(tmp_path, good, "complexity")
    assert code == 0
    before = (out / "complexity.json").read_bytes()
    code, _ = run(tmp_path, good.replace('function = "f"', 'function = "g"'), "complexity")
    assert code == 2
    assert (out / "complexity.json").read_bytes() == before
    assert [p.name for p in out.iterdir()] == ["complexity.json"]


def test_equal_sigma_c(tmp_path):
    out = tmp_path / "out"
    assert main(["--manifest", str(DEMOS / "sigma_c.toml"), "--output", str(out), "equal"]) == 0
    rep = report(out, "equal")
    assert rep["holds"] is True and rep["mod1"] is True


def test_equal_mod1_flag(tmp_path):
    text = 'vars = ["s", "t"]\n[functions]\na = "frac(s + t)"\nb = "frac(s) + frac(t)"\n[equal]\nlhs = "a"\nrhs = "b"\n'
    code, out = run(tmp_path, text, "equal")
    assert code == 1 and report(out, "equal")["witnesses"]
    code, out = run(tmp_path, text, "equal", "--mod1")
    assert code == 0 and report(out, "equal")["mod1"] is True


def test_complexity_of_c(tmp_path):
    out = tmp_path / "out"
    assert main(["--manifest", str(DEMOS / "sigma_c.toml"), "--output", str(out), "complexity"]) == 0
    rep = report(out, "complexity")
    assert rep["pieces"] == 2 and rep["maxDegree"] == 2


def test_integrate_triangle(tmp_path):
    out = tmp_path / "out"
    assert main(["--manifest", str(DEMOS / "floor_cocycle.toml"), "--output", str(out), "integrate"]) == 0
    q = StepPoly.from_json(report(out, "integrate")["result"])
    assert ae_equal(q, StepPoly.coordinate(1, 0))


def test_integrate_everything(tmp_path):
    text = 'vars = ["x", "y"]\n[functions]\nf = "frac(x)*frac(y)"\n[integrate]\nfunction = "f"\n'
    code, out = run(tmp_path, text, "integrate", "--out-coords", "2")
    assert code == 0 and report(out, "integrate") == {"value": "1/4"}


def test_diff(tmp_path):
    text = 'vars = ["x", "y"]\n[functions]\nf = "frac(x)"\n[diff]\nfunction = "f"\n'
    code, out = run(tmp_path, text, "diff", "--w", "1/2,0")
    assert code == 0
    rep = report(out, "diff")
    assert rep["w"] == ["1/2", "0/1"]
    g = StepPoly.from_json(rep["result"])
    assert g((F(1, 4), F(1, 3))) == F(1, 2) and g((F(3, 4), 0)) == F(-1, 2)
    code, _ = run(tmp_path, text, "diff", "--w", "1/2")
    assert code == 2


def test_coboundary_command(tmp_path):
    out = tmp_path / "out"
    argv = ["--manifest", str(DEMOS / "floor_cocycle.toml"), "--output", str(out), "coboundary"]
    assert main(argv) == 0
    rep = report(out, "coboundary")
    assert rep["degree"] == 1
    df = StepPoly.from_json(rep["values"][0]["value"])
    assert ae_equal(df, compile_source("frac(z + w)*frac(z + w) - frac(z)*frac(z)", ["w", "z"]))
    assert main(argv + ["--group", "nope"]) == 2


EFFACE = """
vars = ["z"]
[functions]
sq = {{ source = "{src}", vars = ["w", "z"] }}
[subgroups]
T = {{ coords = [0] }}
[efface]
function = "sq"
group = "T"
p = 1
"""


def test_efface_command(tmp_path):
    code, out = run(tmp_path, EFFACE.format(src="frac(z + w)*frac(z + w) - frac(z)*frac(z)"), "efface")
    assert code == 0
    rep = report(out, "efface")
    assert rep["roundTrip"]["holds"] is True
    g = StepPoly.from_json(rep["primitive"]["values"][0]["value"])
    assert ae_equal(g, compile_source("frac(z)*frac(z) - 1/3", ["z"]))


def test_efface_rejects_non_cocycle(tmp_path):
    code, out = run(tmp_path, EFFACE.format(src="frac(z) + frac(w) - frac(z + w)"), "efface")
    assert code == 1
    rep = report(out, "efface")
    assert rep["error"] == "not a cocycle" and rep["witnesses"]


def test_zero_sum_command(tmp_path):
    text = (
        'vars = ["x", "y"]\n[functions]\na = "frac(x)"\nb = "-frac(x)"\nc = "frac(y)"\n'
        "[subgroups]\nV = { coords = [1] }\n"
        '[verify-zerosum]\nfunctions = ["a", "b"]\nsubgroups = ["V", "V"]\n'
    )
    code, out = run(tmp_path, text, "verify-zerosum")
    assert code == 0
    code, out = run(tmp_path, text.replace('["a", "b"]', '["a", "c"]'), "verify-zerosum")
    assert code == 1 and report(out, "verify-zerosum")["holds"] is False


def test_cross_section_command(tmp_path):
    out = tmp_path / "out"
    assert main(["--manifest", str(DEMOS / "cross_section_doubling.toml"), "--output", str(out), "cross-section"]) == 0
    rep = report(out, "cross-section")
    assert rep["failures"] == [] and rep["samples"] == 1000
    text = 'vars = ["t"]\n[cross-section]\nmatrix = [[1, 2], [2, 4]]\n'
    code, _ = run(tmp_path, text, "cross-section")
    assert code == 2


@pytest.mark.parametrize("command", ["equal", "coboundary", "integrate", "diff"])
def test_reports_are_byte_identical(tmp_path, command):
    blobs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        main(["--manifest", str(DEMOS / "floor_cocycle.toml"), "--output", str(out), command])
        blobs.append((out / f"{command}.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_seeded_cross_section_is_deterministic(tmp_path):
    blobs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        main(["--manifest", str(DEMOS / "cross_section_doubling.toml"), "--output", str(out), "--seed", "5", "cross-section"])
        blobs.append((out / "cross-section.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_function_from_file(tmp_path):
    f = compile_source("frac(x)*frac(x)", ["x"])
    (tmp_path / "f.json").write_text(dumps(f.to_json()))
    text = 'vars = ["x"]\n[functions]\nf = { file = "f.json" }\n[integrate]\nfunction = "f"\n'
    code, out = run(tmp_path, text, "integrate")
    assert code == 0 and report(out, "integrate") == {"value": "1/3"}


def test_bundled_manifests_pass(tmp_path):
    for name, command in [("repf_p3.toml", "equal"), ("floor_cocycle.toml", "equal")]:
        assert main(["--manifest", str(DEMOS / name), "--output", str(tmp_path), command]) == 0


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "stepcalc.cli", "--manifest", str(DEMOS / "sigma_c.toml"), "--output", str(tmp_path), "complexity"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "pieces=2" in proc.stdout
