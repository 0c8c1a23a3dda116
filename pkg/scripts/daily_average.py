"""Time-averaged sleeping ratio over the two shipped daily profiles."""

import argparse

from hcnsleep import interference_factor, load_config
from hcnsleep.traffic import average_sleeping_ratio, dual_peak_profile, sine_profile

KM2 = 1e-6

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambda-max", type=float, default=200.0, help="per km^2")
    ap.add_argument("--lambda-min", type=float, nargs="+", default=[0.5, 20.0, 50.0, 100.0], help="per km^2")
    a = ap.parse_args()
    cfg, qos, rd = load_config()
    I = interference_factor(cfg)
    print("profile,lambda_min_per_km2,avg_no_cb,avg_cb,infeasible_samples_no_cb")
    for name, make in (("sine", sine_profile), ("dual-peak", dual_peak_profile)):
        for lo in a.lambda_min:
            prof = make(a.lambda_max * KM2, lo * KM2)
            off, on = (average_sleeping_ratio(prof, cfg, qos, cb, rd.p_hat_s, I) for cb in (False, True))
            print(f"{name},{lo:g},{off.average:.4f},{on.average:.4f},{len(off.infeasible_hours)}")
