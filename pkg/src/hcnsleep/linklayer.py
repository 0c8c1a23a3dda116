"""Link-level quantities: SINR under Rayleigh fading, equal-share rate, and
the location-averaged macro interference-to-noise factor.

Path loss is the bare power law ``d ** -alpha`` with ``d`` in metres and no
reference-distance constant.
"""

from __future__ import annotations

import numpy as np

from .config import NetworkConfig
from .geometry import hex_grid, hexagon_vertices


def sinr(ue, serving: int, actives, power: float, alpha: float, sigma2: float, fading=None) -> float:
    """SINR at one UE position from cell ``serving`` (an index into ``actives``).

    ``fading`` holds one power gain per active cell; defaults to all ones.
    """
    ue = np.asarray(ue, dtype=float)
    actives = np.atleast_2d(np.asarray(actives, dtype=float))
    if not 0 <= serving < len(actives):
        raise ValueError("serving cell must be one of the active cells")
    h = np.ones(len(actives)) if fading is None else np.asarray(fading, dtype=float)
    d = np.linalg.norm(actives - ue, axis=1)
    if np.any(d == 0):
        raise ValueError("UE coincides with a base station (singular path loss)")
    rx = power * d ** -alpha * h
    return float(rx[serving] / (rx.sum() - rx[serving] + sigma2))


def sinr_many(ues: np.ndarray, serving: np.ndarray, actives: np.ndarray, power: float,
              alpha: float, sigma2: float, fading: np.ndarray | None = None) -> np.ndarray:
    """Vectorised :func:`sinr`; ``fading`` has shape ``(len(ues), len(actives))``."""
    ues = np.asarray(ues, dtype=float).reshape(-1, 2)
    if len(ues) == 0:
        return np.empty(0)
    diff = ues[:, None, :] - np.asarray(actives, dtype=float)[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    if np.any(d2 == 0):
        raise ValueError("UE coincides with a base station (singular path loss)")
    rx = power * d2 ** (-0.5 * alpha)
    if fading is not None:
        rx *= fading
    sig = rx[np.arange(len(ues)), serving]
    return sig / (rx.sum(axis=1) - sig + sigma2)


def rate(w, n_sharers, sinr_value):
    """Equal-share Shannon rate ``w / (N + 1) * log2(1 + sinr)`` in bit/s."""
    return np.asarray(w) / (np.asarray(n_sharers) + 1.0) * np.log2(1.0 + np.asarray(sinr_value))


def _hex_centroid_nodes(D: float, n: int):
    """Centroid-rule nodes for the hexagon split into 6 * n^2 equal triangles."""
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    up = i + j <= n - 1
    down = i + j <= n - 2
    uv = np.concatenate([
        np.column_stack([(i[up] + 1 / 3) / n, (j[up] + 1 / 3) / n]),
        np.column_stack([(i[down] + 2 / 3) / n, (j[down] + 2 / 3) / n]),
    ])
    verts = hexagon_vertices(D)
    nodes = [uv[:, :1] * verts[k] + uv[:, 1:] * verts[(k + 1) % 6] for k in range(6)]
    return np.concatenate(nodes)


def mean_interference(D: float, interferers: np.ndarray, power: float, alpha: float, n: int) -> float:
    """Centroid-rule average of the summed interference over the centre hexagon."""
    if len(interferers) == 0:
        return 0.0
    nodes = _hex_centroid_nodes(D, n)
    total = 0.0
    for bs in interferers:
        d2 = np.sum((nodes - bs) ** 2, axis=1)
        total += np.sum(d2 ** (-0.5 * alpha))
    return power * total / len(nodes)


def interference_factor(cfg: NetworkConfig, tol: float = 1e-4, n0: int = 8, max_n: int = 4096) -> float:
    """Ratio of location-averaged inter-cell MBS interference to noise.

    UE positions are uniform over the centre hexagon; every other MBS of the
    grid interferes at full power.  The grid is doubled until two successive
    estimates differ by less than ``tol`` (relative).
    """
    mbs = hex_grid(cfg)[1:]
    if len(mbs) == 0:
        return 0.0
    n = n0
    prev = mean_interference(cfg.D, mbs, cfg.P_m, cfg.alpha_m, n)
    while True:
        n *= 2
        cur = mean_interference(cfg.D, mbs, cfg.P_m, cfg.alpha_m, n)
        if abs(cur - prev) <= tol * abs(cur) or n >= max_n:
            return cur / cfg.sigma2
        prev = cur

