"""Two-layer topology: hexagonal macro grid, PPP small cells and UEs.

Hexagons are flat-topped with circumradius ``D``; neighbouring MBSs sit
``sqrt(3) D`` apart.  Random draws go through :func:`substream`, which maps
``(seed, *key)`` to an independent generator so that trial ``k`` of an
experiment always sees the same numbers no matter how trials are
partitioned across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import Voronoi, cKDTree

from .config import NetworkConfig, LoadState

SQRT3 = math.sqrt(3.0)

# substream key tags, one per independent draw family
STREAM_TRIAL = 0
STREAM_SLEEP = 1
STREAM_PPP = 2


def substream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based split of one 64-bit experiment seed."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return substream(seed, STREAM_PPP)


def hex_lattice(D: float, rings: int) -> np.ndarray:
    """MBS centres covering ``rings`` hexagonal rings around the origin."""
    a1 = np.array([1.5 * D, 0.5 * SQRT3 * D])
    a2 = np.array([0.0, SQRT3 * D])
    pts = [(0, 0)]
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            if (q, r) != (0, 0) and max(abs(q), abs(r), abs(q + r)) <= rings:
                pts.append((q, r))
    # sort rings outward so index 0 is the centre and order is stable
    pts.sort(key=lambda qr: (max(abs(qr[0]), abs(qr[1]), abs(qr[0] + qr[1])), qr))
    qr = np.array(pts, dtype=float)
    return qr[:, :1] * a1 + qr[:, 1:] * a2


def hex_grid(cfg: NetworkConfig) -> np.ndarray:
    return hex_lattice(cfg.D, cfg.mbs_rings)


def hexagon_vertices(D: float, center=(0.0, 0.0)) -> np.ndarray:
    ang = np.arange(6) * (math.pi / 3.0)
    return np.asarray(center, dtype=float) + D * np.column_stack([np.cos(ang), np.sin(ang)])


def in_hexagon(points: np.ndarray, D: float, center=(0.0, 0.0)) -> np.ndarray:
    """Closed containment test for the flat-topped hexagon of circumradius D."""
    p = np.atleast_2d(points) - np.asarray(center, dtype=float)
    ax, ay = np.abs(p[:, 0]), np.abs(p[:, 1])
    tol = 1e-9 * D
    return (ay <= 0.5 * SQRT3 * D + tol) & (SQRT3 * ax + ay <= SQRT3 * D + tol)


@dataclass(frozen=True)
class HexRegion:
    """Union of equal hexagons; the simulation window."""

    centers: np.ndarray
    D: float

    @classmethod
    def from_config(cls, cfg: NetworkConfig) -> "HexRegion":
        return cls(hex_grid(cfg), cfg.D)

    @property
    def area(self) -> float:
        return len(self.centers) * 1.5 * SQRT3 * self.D ** 2

    @property
    def diameter(self) -> float:
        c = self.centers
        return float(np.max(np.linalg.norm(c[:, None] - c[None], axis=-1))) + 2 * self.D

    def contains(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        out = np.zeros(len(p), dtype=bool)
        for c in self.centers:
            out |= in_hexagon(p, self.D, c)
        return out

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. uniform points: pick a hexagon, one of its six triangles,
        then a uniform point in that triangle."""
        if n == 0:
            return np.empty((0, 2))
        cell = rng.integers(len(self.centers), size=n)
        tri = rng.integers(6, size=n)
        u = rng.random((n, 2))
        flip = u.sum(axis=1) > 1.0
        u[flip] = 1.0 - u[flip]
        a0 = tri * (math.pi / 3.0)
        a1 = a0 + math.pi / 3.0
        v0 = self.D * np.column_stack([np.cos(a0), np.sin(a0)])
        v1 = self.D * np.column_stack([np.cos(a1), np.sin(a1)])
        return self.centers[cell] + u[:, :1] * v0 + u[:, 1:] * v1


def sample_ppp(density: float, region: HexRegion, seed) -> np.ndarray:
    """Homogeneous PPP of the given density (points per m^2) on ``region``."""
    if density < 0:
        raise ValueError(f"density must be >= 0, got {density}")
    rng = _as_rng(seed)
    n = int(rng.poisson(density * region.area)) if density > 0 else 0
    return region.sample_uniform(n, rng)


def associate(points: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Index of the nearest anchor for every point (ties -> lowest index)."""
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    if anchors.size == 0:
        raise ValueError("no anchors: points have no serving cell")
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        return np.empty(0, dtype=np.intp)
    if len(anchors) == 1:
        return np.zeros(len(points), dtype=np.intp)
    tree = cKDTree(anchors)
    d, idx = tree.query(points, k=2)
    # the kd-tree does not order equidistant anchors; enforce the tie rule
    tie = d[:, 0] == d[:, 1]
    best = idx[:, 0].copy()
    if tie.any():
        for i in np.flatnonzero(tie):
            cand = tree.query_ball_point(points[i], d[i, 0] * (1 + 1e-12))
            dd = np.linalg.norm(anchors[cand] - points[i], axis=1)
            best[i] = min(c for c, v in zip(cand, dd) if v <= dd.min() * (1 + 1e-12))
    return best.astype(np.intp)


def distance_to_nearest(points: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        return np.empty(0)
    return cKDTree(np.atleast_2d(anchors)).query(points)[0]


def repulsive_sleep_set(sc_positions: np.ndarray, mbs_positions: np.ndarray, R_s: float) -> np.ndarray:
    """Indices of SCs strictly closer than ``R_s`` to their nearest MBS."""
    if R_s < 0:
        raise ValueError(f"R_s must be >= 0, got {R_s}")
    return np.flatnonzero(distance_to_nearest(sc_positions, mbs_positions) < R_s)


def random_sleep_set(sc_count: int, p_s: float, seed) -> np.ndarray:
    """Each SC index kept independently with probability ``p_s``."""
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must lie in [0, 1], got {p_s}")
    rng = seed if isinstance(seed, np.random.Generator) else substream(seed, STREAM_SLEEP)
    return np.flatnonzero(rng.random(sc_count) < p_s)


@dataclass(frozen=True)
class Topology:
    mbs_positions: np.ndarray
    sc_positions: np.ndarray
    mbs_ue_positions: np.ndarray
    sc_ue_positions: np.ndarray

    @property
    def mbs_ue_cell(self) -> np.ndarray:
        return associate(self.mbs_ue_positions, self.mbs_positions)

    def sc_ue_cell(self, sleeping=()) -> np.ndarray:
        """Nearest active SC per SC UE (-1 if every SC sleeps)."""
        active = np.setdiff1d(np.arange(len(self.sc_positions)), np.asarray(sleeping, dtype=np.intp))
        if len(active) == 0:
            return np.full(len(self.sc_ue_positions), -1, dtype=np.intp)
        return active[associate(self.sc_ue_positions, self.sc_positions[active])]

    @property
    def association(self) -> dict:
        return {"mbs_ue": self.mbs_ue_cell, "sc_ue": self.sc_ue_cell()}


def draw_topology(cfg: NetworkConfig, load: LoadState, seed) -> Topology:
    rng = _as_rng(seed)
    region = HexRegion.from_config(cfg)
    sc = sample_ppp(cfg.rho_s, region, rng)
    ue_m = sample_ppp(load.lambda_m, region, rng)
    ue_s = sample_ppp(load.lambda_s, region, rng)
    return Topology(region.centers, sc, ue_m, ue_s)


_TAGS = (("MBS", "mbs_positions"), ("SC", "sc_positions"),
         ("UEM", "mbs_ue_positions"), ("UES", "sc_ue_positions"))


def dump_topology(topo: Topology, path) -> None:
    lines = []
    for tag, attr in _TAGS:
        lines += [f"{tag} {x!r} {y!r}" for x, y in np.asarray(getattr(topo, attr)).reshape(-1, 2).tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_topology(path) -> Topology:
    buckets = {tag: [] for tag, _ in _TAGS}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in buckets:
            raise ValueError(f"{path}:{lineno}: malformed record {line!r}")
        buckets[parts[0]].append((float(parts[1]), float(parts[2])))
    return Topology(**{attr: np.array(buckets[tag], dtype=float).reshape(-1, 2) for tag, attr in _TAGS})


def voronoi_cell_areas(points: np.ndarray, window: tuple[float, float, float, float]) -> np.ndarray:
    """Areas of the Voronoi cells of ``points`` that lie entirely inside the
    axis-aligned ``window`` (xmin, ymin, xmax, ymax); boundary cells dropped."""
    vor = Voronoi(points)
    xmin, ymin, xmax, ymax = window
    areas = []
    for region_idx in vor.point_region:
        region = vor.regions[region_idx]
        if not region or -1 in region:
            continue
        poly = vor.vertices[region]
        if (poly[:, 0].min() < xmin or poly[:, 0].max() > xmax
                or poly[:, 1].min() < ymin or poly[:, 1].max() > ymax):
            continue
        # vertices of a Voronoi region are not guaranteed ordered; sort by angle
        c = poly.mean(axis=0)
        poly = poly[np.argsort(np.arctan2(poly[:, 1] - c[1], poly[:, 0] - c[0]))]
        x, y = poly[:, 0], poly[:, 1]
        areas.append(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    return np.array(areas)
