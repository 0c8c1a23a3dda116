"""Area power against macro radius for a range of small-cell static powers."""

import argparse

import numpy as np

from hcnsleep import load_config
from hcnsleep.traffic import PowerModel, planning_sweep, sine_profile

KM2 = 1e-6

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p-mbs", type=float, default=1000.0, help="static power of an MBS (W)")
    ap.add_argument("--p-sc", type=float, nargs="+", default=[10.0, 50.0, 100.0, 200.0], help="static power of an SC (W)")
    ap.add_argument("--cb", action="store_true")
    a = ap.parse_args()
    cfg, qos, rd = load_config()
    radii = np.arange(400.0, 1100.1, 25.0)
    profile = sine_profile(50 * KM2, 0.5 * KM2)
    print("P_static_sc_W,best_D_m,min_area_power_W_per_km2,interior")
    for p_sc in a.p_sc:
        rows = planning_sweep(radii, profile, cfg, qos, PowerModel(a.p_mbs, p_sc), a.cb, rd.p_hat_s)
        P = np.array([r.area_power for r in rows])
        k = int(np.argmin(P))
        print(f"{p_sc:g},{radii[k]:g},{P[k] / KM2:.1f},{0 < k < len(P) - 1}")
