"""Regenerate the spectrum CSV files under tests/data from the CLI.

The files are checked independently in the test suite (class-by-class character sums),
so regenerating them is only needed when the CSV layout changes."""
import sys
from pathlib import Path

from lenspec.cli import main

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
GOLDEN = [("spectrum_full_8.csv", "full", 8), ("spectrum_gamma0_3_40.csv", "gamma0:3", 40),
          ("spectrum_hat_3_40.csv", "hat:3", 40)]

if __name__ == "__main__":
    for name, group, xmax in GOLDEN:
        code = main(["spectrum", "--group", group, "--xmax", str(xmax), "--format", "csv", "-o", str(DATA / name)])
        if code:
            sys.exit(code)
        print("wrote", DATA / name)
