"""Analytic versus simulated outage for the three UE classes.

Writes outage_mbs.csv, outage_sc.csv and outage_offloaded.csv under --out.
"""

import argparse
import sys

from hcnsleep.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/outage")
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=2015)
    a = ap.parse_args()
    sys.exit(main(["validate-outage", "--out", a.out, "--trials", str(a.trials), "--workers", str(a.workers),
                   "--seed", str(a.seed)]))
