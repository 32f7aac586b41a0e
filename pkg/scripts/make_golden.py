"""Regenerate the golden CLI reports under tests/golden/."""
import os
import shutil
import sys
from importlib import resources
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from cli_cases import CASES, SIDECAR  # noqa: E402
from markov_infodesign.cli import main  # noqa: E402

GOLDEN = ROOT / "tests" / "golden"

if __name__ == "__main__":
    os.chdir(str(resources.files("markov_infodesign").joinpath("fixtures")))
    for name, (argv, code) in CASES.items():
        out = GOLDEN / name
        shutil.rmtree(out, ignore_errors=True)
        got = main(argv + ["--out", str(out)])
        assert got == code, (name, got, code)
        (out / SIDECAR).unlink()
