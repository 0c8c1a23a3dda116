import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from hcnsleep.config import LoadState, NetworkConfig
from hcnsleep.geometry import (HexRegion, associate, draw_topology, dump_topology, hex_grid, hex_lattice,
                               in_hexagon, load_topology, random_sleep_set, repulsive_sleep_set, sample_ppp,
                               substream, voronoi_cell_areas)
from oracles import hex_lattice_bruteforce

points2d = st.lists(st.tuples(st.floats(-2000, 2000), st.floats(-2000, 2000)), min_size=1, max_size=40)


def test_zero_rings_is_origin():
    np.testing.assert_array_equal(hex_lattice(500.0, 0), [[0.0, 0.0]])


@pytest.mark.parametrize("rings, count", [(1, 7), (2, 19), (3, 37)])
def test_ring_counts(rings, count):
    assert len(hex_lattice(500.0, rings)) == count


def test_grid_matches_neighbour_expansion(cfg):
    g = hex_grid(cfg)
    ref = hex_lattice_bruteforce(cfg.D, cfg.mbs_rings)
    key = lambda a: a[np.lexsort((a[:, 1].round(6), a[:, 0].round(6)))]
    np.testing.assert_allclose(key(g), key(ref), atol=1e-6)
    np.testing.assert_array_equal(g[0], [0.0, 0.0])


def test_nearest_neighbour_spacing_is_sqrt3_D(cfg):
    g = hex_grid(cfg)
    d = np.linalg.norm(g[:, None] - g[None], axis=-1)
    np.fill_diagonal(d, np.inf)
    np.testing.assert_allclose(d.min(axis=1), math.sqrt(3) * cfg.D, rtol=1e-12)


def test_hexagons_tile_without_overlap(cfg):
    """Points drawn in the bounding box of the 19-cell region fall in at most
    one hexagon interior, and the region area matches 19 hexagons."""
    region = HexRegion.from_config(cfg)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-3 * cfg.D, 3 * cfg.D, size=(20000, 2))
    hits = sum(in_hexagon(pts, cfg.D * (1 - 1e-9), c).astype(int) for c in region.centers)
    assert hits.max() == 1
    assert math.isclose(region.area, 19 * cfg.hex_area)


def test_ppp_zero_density_is_empty(cfg):
    assert len(sample_ppp(0.0, HexRegion.from_config(cfg), 3)) == 0


def test_ppp_is_deterministic(cfg):
    region = HexRegion.from_config(cfg)
    np.testing.assert_array_equal(sample_ppp(25e-6, region, 7), sample_ppp(25e-6, region, 7))


def test_ppp_points_lie_in_region(cfg):
    region = HexRegion.from_config(cfg)
    assert region.contains(sample_ppp(200e-6, region, 11)).all()


def test_ppp_mean_count(cfg):
    """Sample mean of the SC count over 10^4 seeds is within 2% of rho_s * A."""
    region = HexRegion.from_config(cfg)
    expected = cfg.rho_s * region.area
    assert math.isclose(expected, 308.6, rel_tol=1e-3)
    counts = [len(sample_ppp(cfg.rho_s, region, s)) for s in range(10000)]
    assert abs(np.mean(counts) / expected - 1) < 0.02


def test_ppp_counts_chi_square(cfg):
    """Counts across seeds are Poisson(rho_s * A) at 1% significance."""
    region = HexRegion.from_config(cfg)
    mu = cfg.rho_s * region.area
    counts = np.array([len(sample_ppp(cfg.rho_s, region, s)) for s in range(4000)])
    edges = np.concatenate([[-0.5], np.arange(mu - 40, mu + 41, 5) + 0.5, [np.inf]])
    observed, _ = np.histogram(counts, edges)
    cdf = stats.poisson.cdf(np.floor(edges[1:]), mu) - stats.poisson.cdf(np.floor(edges[:-1]), mu)
    cdf[-1] = stats.poisson.sf(np.floor(edges[-2]), mu)
    _, p = stats.chisquare(observed, cdf / cdf.sum() * len(counts))
    assert p > 0.01


def test_ppp_positions_uniform_across_cells(cfg):
    region = HexRegion.from_config(cfg)
    pts = sample_ppp(2e-3, region, 5)
    cell = associate(pts, region.centers)
    _, p = stats.chisquare(np.bincount(cell, minlength=19))
    assert p > 0.01


def test_voronoi_areas_follow_gamma():
    """SC Voronoi cell areas match Gamma(K=3.575, scale 1/(K rho)) by KS at 1%."""
    rho = 25e-6
    side = 30000.0
    rng = np.random.default_rng(2015)
    n = rng.poisson(rho * side ** 2)
    pts = rng.uniform(0, side, size=(n, 2))
    margin = 2000.0
    areas = voronoi_cell_areas(pts, (margin, margin, side - margin, side - margin))
    assert len(areas) >= 10000
    K = 3.575
    assert stats.kstest(areas, stats.gamma(K, scale=1 / (K * rho)).cdf).pvalue > 0.01


def test_single_anchor():
    np.testing.assert_array_equal(associate(np.random.default_rng(0).random((5, 2)), [[3.0, 3.0]]), 0)


def test_tie_goes_to_lowest_index():
    anchors = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 5.0]])
    assert associate([[0.0, 0.0]], anchors)[0] == 0
    assert associate([[0.0, 0.0]], anchors[[1, 0, 2]])[0] == 0


def test_no_anchor_is_an_error():
    with pytest.raises(ValueError, match="no anchors"):
        associate([[0.0, 0.0]], np.empty((0, 2)))


def test_association_matches_exhaustive_scan():
    rng = np.random.default_rng(4)
    anchors = rng.uniform(-1000, 1000, size=(5, 2))
    pts = rng.uniform(-1000, 1000, size=(100, 2))
    brute = np.argmin(np.linalg.norm(pts[:, None] - anchors[None], axis=-1), axis=1)
    np.testing.assert_array_equal(associate(pts, anchors), brute)


@given(points2d, points2d)
def test_association_is_permutation_invariant(pts, anchors):
    pts, anchors = np.array(pts), np.array(anchors)
    a = associate(pts, anchors)
    perm = np.random.default_rng(0).permutation(len(pts))
    np.testing.assert_array_equal(associate(pts[perm], anchors), a[perm])
    d = np.linalg.norm(pts[:, None] - anchors[None], axis=-1)
    np.testing.assert_allclose(d[np.arange(len(pts)), a], d.min(axis=1))
    # idempotent: an anchor maps to the lowest-index anchor at its location
    self_map = associate(anchors, anchors)
    assert all(np.array_equal(anchors[i], anchors[j]) and j <= i for i, j in enumerate(self_map))


def test_repulsive_sleep_set_edges(cfg):
    region = HexRegion.from_config(cfg)
    sc = sample_ppp(cfg.rho_s, region, 9)
    assert len(repulsive_sleep_set(sc, region.centers, 0.0)) == 0
    assert len(repulsive_sleep_set(sc, region.centers, math.inf)) == len(sc)
    assert len(repulsive_sleep_set(sc, region.centers, region.diameter)) == len(sc)


def test_repulsive_sleep_set_matches_scan(cfg):
    region = HexRegion.from_config(cfg)
    sc = sample_ppp(cfg.rho_s, region, 10)
    d = np.linalg.norm(sc[:, None] - region.centers[None], axis=-1).min(axis=1)
    np.testing.assert_array_equal(repulsive_sleep_set(sc, region.centers, 300.0), np.flatnonzero(d < 300.0))


@settings(max_examples=50)
@given(st.floats(0, 1200), st.floats(0, 1200))
def test_repulsive_sleep_set_monotone(r1, r2):
    cfg = NetworkConfig()
    region = HexRegion.from_config(cfg)
    sc = sample_ppp(cfg.rho_s, region, 12)
    lo, hi = sorted((r1, r2))
    assert set(repulsive_sleep_set(sc, region.centers, lo)) <= set(repulsive_sleep_set(sc, region.centers, hi))


@pytest.mark.parametrize("p, expected", [(0.0, 0), (1.0, 1000)])
def test_random_sleep_set_edges(p, expected):
    assert len(random_sleep_set(1000, p, 3)) == expected


def test_random_sleep_set_fraction():
    frac = len(random_sleep_set(100_000, 0.5, 3)) / 100_000
    assert abs(frac - 0.5) <= 0.01
    np.testing.assert_array_equal(random_sleep_set(500, 0.3, 8), random_sleep_set(500, 0.3, 8))


def test_substreams_are_independent_of_order():
    a = substream(5, 3, 1).random(4)
    substream(5, 2, 1).random(100)
    np.testing.assert_array_equal(a, substream(5, 3, 1).random(4))
    assert not np.array_equal(a, substream(5, 3, 2).random(4))


def test_topology_invariants_and_round_trip(cfg, tmp_path):
    topo = draw_topology(cfg, LoadState(20e-6, 100e-6), 21)
    region = HexRegion.from_config(cfg)
    for pts in (topo.sc_positions, topo.mbs_ue_positions, topo.sc_ue_positions):
        assert region.contains(pts).all()
    m = topo.mbs_ue_cell
    d = np.linalg.norm(topo.mbs_ue_positions[:, None] - topo.mbs_positions[None], axis=-1)
    np.testing.assert_allclose(d[np.arange(len(m)), m], d.min(axis=1))
    sleeping = repulsive_sleep_set(topo.sc_positions, topo.mbs_positions, 300.0)
    s = topo.sc_ue_cell(sleeping)
    assert not np.isin(s, sleeping).any()
    path = tmp_path / "topo.txt"
    dump_topology(topo, path)
    back = load_topology(path)
    for name in ("mbs_positions", "sc_positions", "mbs_ue_positions", "sc_ue_positions"):
        np.testing.assert_array_equal(getattr(back, name), getattr(topo, name))
    assert path.read_text().splitlines()[0].startswith("MBS ")


def test_all_sleeping_leaves_no_server(cfg):
    topo = draw_topology(cfg, LoadState(0.0, 50e-6), 2)
    assert (topo.sc_ue_cell(np.arange(len(topo.sc_positions))) == -1).all()


def test_load_topology_rejects_bad_records(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("MBS 0 0\nXYZ 1 2\n")
    with pytest.raises(ValueError, match="malformed"):
        load_topology(p)
