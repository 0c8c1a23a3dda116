"""Independent reference computations used to check the package.

None of these share code paths with the implementation beyond the hex grid
and the config dataclasses.
"""

import math

import numpy as np
from scipy import integrate
from scipy.stats import poisson

SQRT3 = math.sqrt(3.0)


def hex_lattice_bruteforce(D, rings):
    """MBS centres by breadth-first expansion over the six neighbour offsets."""
    step = SQRT3 * D
    dirs = [(step * math.cos(math.pi / 6 + k * math.pi / 3), step * math.sin(math.pi / 6 + k * math.pi / 3))
            for k in range(6)]
    pts = {(0.0, 0.0)}
    frontier = [(0.0, 0.0)]
    for _ in range(rings):
        nxt = []
        for x, y in frontier:
            for dx, dy in dirs:
                p = (round(x + dx, 6), round(y + dy, 6))
                if p not in pts:
                    pts.add(p)
                    nxt.append(p)
        frontier = nxt
    return np.array(sorted(pts))


def mean_interference_dblquad(D, interferers, power, alpha):
    """Average summed interference over the flat-topped hexagon by adaptive
    2-D quadrature (x outer, y inner)."""
    def f(y, x):
        d2 = (interferers[:, 0] - x) ** 2 + (interferers[:, 1] - y) ** 2
        return float(np.sum(d2 ** (-alpha / 2)))

    def ylim(x):
        return min(SQRT3 / 2 * D, SQRT3 * (D - abs(x)))

    val, _ = integrate.dblquad(f, -D, D, lambda x: -ylim(x), ylim, epsabs=0, epsrel=1e-10)
    return power * val / (1.5 * SQRT3 * D ** 2)


def mbs_outage_exact(cfg, lambda_m, w_m, U_m, mbs, n_pos=20000, seed=0, n_max=150):
    """Exact MBS-UE outage for Rayleigh fading on every link.

    A typical UE is uniform in the centre hexagon (rejection sampled from the
    bounding box); the other UEs of the cell form a Poisson count.  Given the
    position and the count, success probability is the Laplace transform
    ``exp(-s sigma2) * prod_j 1 / (1 + s P g_j)``.
    """
    rng = np.random.default_rng(seed)
    pts = []
    while sum(len(p) for p in pts) < n_pos:
        c = rng.uniform([-cfg.D, -SQRT3 / 2 * cfg.D], [cfg.D, SQRT3 / 2 * cfg.D], size=(n_pos, 2))
        keep = SQRT3 * np.abs(c[:, 0]) + np.abs(c[:, 1]) <= SQRT3 * cfg.D
        pts.append(c[keep])
    pos = np.concatenate(pts)[:n_pos]
    d2 = ((pos[:, None, :] - mbs[None]) ** 2).sum(-1)
    g = d2 ** (-cfg.alpha_m / 2)
    ns = np.arange(n_max)
    pn = poisson.pmf(ns, lambda_m * 1.5 * SQRT3 * cfg.D ** 2)
    succ = np.empty(n_max)
    for k in ns:
        T = 2.0 ** ((k + 1) * U_m / w_m) - 1
        s = T / (cfg.P_m * g[:, 0])
        succ[k] = np.mean(np.exp(-s * cfg.sigma2) * np.prod(1 / (1 + s[:, None] * cfg.P_m * g[:, 1:]), axis=1))
    return 1 - float(np.sum(pn * succ))


def ppp_sinr_ccdf_alpha4(T):
    """Interference-limited coverage of a PPP network with nearest-BS
    association, Rayleigh fading, alpha = 4."""
    r = math.sqrt(T)
    return 1.0 / (1.0 + r * (math.pi / 2 - math.atan(1 / r))) if T > 0 else 1.0
