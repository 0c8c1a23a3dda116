"""Maximum sleeping ratio of both schemes, with and without channel borrowing,
against SC-UE load, MBS-UE load and macro radius."""

import argparse
import sys
from pathlib import Path

from hcnsleep.cli import main

SWEEPS = {
    "lambda_s": "lambda_s:10:200:39",
    "lambda_m": "lambda_m:0:60:31",
    "D": "D:300:700:41",
}

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/sweeps", type=Path)
    a = ap.parse_args()
    for name, sweep in SWEEPS.items():
        for scheme in ("random", "repulsive"):
            code = main(["sweep-sleeping", "--scheme", scheme, "--cb", "both", "--sweep", sweep,
                         "--out", str(a.out / f"{scheme}_{name}.csv")])
            if code:
                sys.exit(code)
