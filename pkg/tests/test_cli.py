import io
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from gentlecm.cli import main
from gentlecm.corpus import load_algebra
from gentlecm.diffmod import DifferentialModule, load_module
from gentlecm.linalg import GF

ROOT = Path(__file__).resolve().parents[1]
A0_FILE = str(ROOT / "algebras" / "a0.alg")
C3_FILE = str(ROOT / "algebras" / "cycle3.alg")
FULL_FILE = str(ROOT / "algebras" / "cycle3_full.alg")
SIX = "a,b,ab'^-1,a',b',a'b^-1"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_validate_torus_algebra():
    code, out = run("validate", A0_FILE)
    assert code == 0
    assert out.strip() == "gentle, finite global dimension, dim 9"


def test_validate_infinite_gldim():
    code, out = run("validate", FULL_FILE)
    assert code == 1
    assert out.startswith("gentle, infinite global dimension")


def test_info_surface_line():
    code, out = run("info", A0_FILE)
    assert code == 0
    assert "surface: genus 1, boundary 1, marked points 2" in out.splitlines()


def test_info_cycle():
    code, out = run("info", C3_FILE)
    assert code == 0
    assert "surface: genus 0, boundary 2, marked points 3" in out


def test_object_band_dump():
    code, out = run("object", "--band", "abd", "--jordan", "2,1", C3_FILE, "--dump", "-")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("band abd")
    assert lines[2].startswith("indecomposable: yes")
    dump = "\n".join(lines[3:]) + "\n"
    A = load_algebra(C3_FILE)
    assert load_module(A, dump) == DifferentialModule(A, GF(5), (0, 1, 0), {"abd": [[2]]})


def test_object_string_complex(tmp_path):
    target = tmp_path / "c.txt"
    code, out = run("object", "--string", "a", A0_FILE, "--complex", str(target))
    assert code == 0
    assert "dimension 8" in out
    assert any(line.startswith("deg ") for line in target.read_text().splitlines())


def test_object_ungradable_band_complex_rejected(tmp_path):
    code, _ = run("object", "--band", "abd", C3_FILE, "--complex", str(tmp_path / "x"))
    assert code == 1


def test_decompose_round_trip(tmp_path):
    dump = tmp_path / "m.txt"
    code, _ = run("object", "--band", SIX, "--jordan", "3,2", A0_FILE, "--dump", str(dump))
    assert code == 0
    code, out = run("decompose", A0_FILE, "--input", str(dump))
    assert code == 0
    assert out.splitlines()[-1] == "# 1 indecomposable radical summands"


def test_enumerate_counts():
    code, out = run("enumerate", "builtin:cycle3", "--bands", "--max-letters", "1")
    assert code == 0
    assert out.splitlines() == ["band 1 abd winding 1", "# 1 bands"]


def test_winding_and_grade():
    assert run("winding", C3_FILE, "--band", "abd") == (0, "winding 1\ngrading none\n")
    assert run("grade", A0_FILE, "--string", "a", "--anchor", "2") == (0, "grading 2 1\n")


def test_twist_band():
    code, out = run("twist", C3_FILE, "--band", "abd", "--jordan", "2,1", "--lambda", "3")
    assert code == 0
    assert "expected parameter [[1]]" in out
    assert out.splitlines()[-1].startswith("isomorphic: yes")


def test_matrixify_canonical_matches_G():
    _, g = run("matrixify", A0_FILE, "--string", "a,a'^-1,ab'")
    _, b = run("matrixify", A0_FILE, "--string", "a,a'^-1,ab'", "--canonical")
    assert g == b
    assert g.splitlines()[1] == "band e(1)[ab'] rows=2 cols=2"


def test_render_svg(tmp_path):
    target = tmp_path / "s.svg"
    code, _ = run("render", A0_FILE, "--svg-out", str(target), "--band", SIX)
    assert code == 0
    root = ET.fromstring(target.read_text())
    assert sum(1 for el in root.iter() if el.get("class") == "curve-segment") == 6


def test_deterministic_output(tmp_path):
    for argv in (("info", A0_FILE), ("enumerate", A0_FILE, "--strings", "--bands"),
                 ("object", "--band", SIX, "--jordan", "2,2", A0_FILE, "--dump", "-"),
                 ("render", A0_FILE, "--svg-out", "-", "--string", "a,a'^-1")):
        assert run(*argv) == run(*argv)


@pytest.mark.parametrize("argv", [
    (),
    ("nonsense",),
    ("object", A0_FILE),
    ("object", A0_FILE, "--string", "a", "--band", "a,a'^-1"),
    ("object", C3_FILE, "--band", "abd", "--jordan", "0,1"),
    ("twist", C3_FILE, "--band", "abd", "--lambda", "5"),
    ("enumerate", A0_FILE),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


@pytest.mark.parametrize("argv", [
    ("validate", "no/such/file.alg"),
    ("object", A0_FILE, "--string", "a,b'"),
    ("object", A0_FILE, "--string", "zz"),
    ("matrixify", A0_FILE, "--string", "a", "--order", "ab'"),
])
def test_rejected_input(argv):
    assert run(*argv)[0] == 1


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "gentlecm" in capsys.readouterr().out
