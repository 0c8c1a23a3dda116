"""Monte Carlo estimates of the MBS-UE, SC-UE and offloaded-UE outage.

Each trial draws a fresh topology and one fading realisation per link.
Statistics come only from UEs located in the centre macro cell; sharer
counts use whole cells.  Trial ``k`` uses generators derived from
``(seed, k)``, so any partition of the trial range into worker chunks gives
identical integer tallies, and the reduction is a plain sum.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .config import BandAllocation, LoadState, NetworkConfig, QosSpec, SleepPolicy
from .geometry import HexRegion, associate, distance_to_nearest, in_hexagon, sample_ppp, substream
from .linklayer import rate, sinr_many

Z95 = 1.959963984540054
CLASSES = ("G_m", "G_s", "G_o")

# per-trial substream tags
_SC, _UE_M, _UE_S, _SLEEP, _FADE_M, _FADE_S, _FADE_O, _BAND = range(8)


@dataclass(frozen=True)
class OutageEstimate:
    mean: float
    ci_half_width: float
    trials: int
    samples: int

    @property
    def defined(self) -> bool:
        return self.samples > 0


@dataclass(frozen=True)
class OutageResult:
    G_m: OutageEstimate
    G_s: OutageEstimate
    G_o: OutageEstimate
    mean_offloaded: float
    mean_sc_served: float

    def __iter__(self):
        return iter((self.G_m, self.G_s, self.G_o))


class Tally:
    """Integer sufficient statistics per class: sums of outages o, samples n,
    o^2, n^2 and o*n over trials (for the clustered ratio CI)."""

    def __init__(self, n_bands: int = 1):
        self.stats = np.zeros((n_bands, 3, 5), dtype=np.int64)
        self.offloaded = 0
        self.sc_served = 0
        self.trials = 0

    def add_trial(self, outages: np.ndarray, samples: np.ndarray, offloaded: int, sc_served: int):
        o = outages.astype(np.int64)
        n = np.broadcast_to(samples.astype(np.int64), o.shape)
        self.stats += np.stack([o, n, o * o, n * n, o * n], axis=-1)
        self.offloaded += offloaded
        self.sc_served += sc_served
        self.trials += 1

    def __add__(self, other: "Tally") -> "Tally":
        out = Tally(self.stats.shape[0])
        out.stats = self.stats + other.stats
        out.offloaded = self.offloaded + other.offloaded
        out.sc_served = self.sc_served + other.sc_served
        out.trials = self.trials + other.trials
        return out

    def estimate(self, band: int, cls: int) -> OutageEstimate:
        so, sn, soo, snn, son = (int(v) for v in self.stats[band, cls])
        T = self.trials
        if sn == 0:
            return OutageEstimate(math.nan, math.nan, T, 0)
        p = so / sn
        if T >= 2:
            ss = soo - 2 * p * son + p * p * snn
            var = max(ss, 0.0) / (T * (T - 1) * (sn / T) ** 2)
        else:
            var = p * (1 - p) / sn
        return OutageEstimate(p, Z95 * math.sqrt(var), T, sn)

    def result(self, band: int = 0) -> OutageResult:
        T = max(self.trials, 1)
        return OutageResult(*(self.estimate(band, c) for c in range(3)),
                            mean_offloaded=self.offloaded / T, mean_sc_served=self.sc_served / T)


def _outage_count(w: float, sharers: np.ndarray, sinr: np.ndarray, U: float) -> int:
    if len(sinr) == 0:
        return 0
    return int(np.count_nonzero(rate(w, sharers, sinr) < U))


def simulate_trial(cfg: NetworkConfig, load: LoadState, qos: QosSpec, policy: SleepPolicy,
                   bands: Sequence[BandAllocation], seed: int, trial: int, region: HexRegion):
    """One topology + fading draw; returns (outages[n_bands, 3], samples[3],
    centre-cell offloaded count, centre-cell SC-served count)."""
    def rs(tag):
        return substream(seed, trial, tag)

    mbs = region.centers
    D = cfg.D
    sc = sample_ppp(cfg.rho_s, region, rs(_SC))
    ue_m = sample_ppp(load.lambda_m, region, rs(_UE_M))
    ue_s = sample_ppp(load.lambda_s, region, rs(_UE_S))

    if policy.scheme == "random":
        asleep = rs(_SLEEP).random(len(sc)) < policy.p_s
    elif policy.scheme == "repulsive":
        asleep = distance_to_nearest(sc, mbs) < policy.R_s
    else:
        asleep = np.zeros(len(sc), dtype=bool)

    # MBS UEs in the centre cell share its MBS band
    cm = ue_m[in_hexagon(ue_m, D)]
    n_m = len(cm)
    sinr_m = sinr_many(cm, np.zeros(n_m, dtype=np.intp), mbs, cfg.P_m, cfg.alpha_m, cfg.sigma2,
                       rs(_FADE_M).exponential(size=(n_m, len(mbs))))

    # SC UEs keep their SC unless it sleeps, in which case they go to the macro layer
    if len(sc):
        serving = associate(ue_s, sc)
        offloaded = asleep[serving]
    else:
        serving = np.full(len(ue_s), -1, dtype=np.intp)
        offloaded = np.ones(len(ue_s), dtype=bool)
    centre = in_hexagon(ue_s, D)
    served = ~offloaded
    load_per_sc = np.bincount(serving[served], minlength=len(sc))
    cs = centre & served
    active = np.flatnonzero(~asleep)
    slot = np.full(len(sc), -1, dtype=np.intp)
    slot[active] = np.arange(len(active))
    n_s = int(cs.sum())
    sinr_s = sinr_many(ue_s[cs], slot[serving[cs]], sc[active], cfg.P_s, cfg.alpha_s, cfg.sigma2,
                       rs(_FADE_S).exponential(size=(n_s, len(active))))
    sharers_s = load_per_sc[serving[cs]] - 1

    # offloaded UEs of the centre cell, split between the two bands
    co = ue_s[centre & offloaded]
    n_o = len(co)
    on_mbs_band = (rs(_BAND).random(n_o) < policy.p_m) if policy.cb else np.ones(n_o, dtype=bool)
    fade_o = rs(_FADE_O).exponential(size=(n_o, len(mbs)))
    zeros = np.zeros(n_o, dtype=np.intp)
    sinr_om = sinr_many(co, zeros, mbs, cfg.P_m, cfg.alpha_m, cfg.sigma2, fade_o)[on_mbs_band]
    sinr_os = sinr_many(co, zeros, mbs, cfg.P_m, cfg.alpha_s, cfg.sigma2, fade_o)[~on_mbs_band]
    k_m = len(sinr_om)
    k_s = n_o - k_m

    out = np.zeros((len(bands), 3), dtype=np.int64)
    for b, band in enumerate(bands):
        out[b, 0] = _outage_count(band.w_m, np.full(n_m, n_m - 1), sinr_m, qos.U_m)
        out[b, 1] = _outage_count(band.w_s, sharers_s, sinr_s, qos.U_s)
        out[b, 2] = (_outage_count(band.w_o_m, np.full(k_m, k_m - 1), sinr_om, qos.U_o)
                     + _outage_count(band.w_o_s, np.full(k_s, k_s - 1), sinr_os, qos.U_o))
    return out, np.array([n_m, n_s, n_o]), n_o, n_s


def run_trials(cfg, load, qos, policy, bands, seed, start, stop) -> Tally:
    region = HexRegion.from_config(cfg)
    tally = Tally(len(bands))
    for k in range(start, stop):
        out, n, off, srv = simulate_trial(cfg, load, qos, policy, bands, seed, k, region)
        tally.add_trial(out, n, off, srv)
    return tally


def _run_chunk(args):
    return run_trials(*args)


def simulate(cfg: NetworkConfig, load: LoadState, qos: QosSpec, policy: SleepPolicy,
             bands: Sequence[BandAllocation], trials: int = 10_000, seed: int = 0,
             workers: int = 1) -> Tally:
    """Tally outages for several band allocations on the same random draws."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bands = list(bands)
    if workers <= 1:
        return run_trials(cfg, load, qos, policy, bands, seed, 0, trials)
    edges = np.linspace(0, trials, workers + 1).astype(int)
    jobs = [(cfg, load, qos, policy, bands, seed, a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_run_chunk, jobs))
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total


def estimate_outage(cfg: NetworkConfig, load: LoadState, qos: QosSpec, policy: SleepPolicy,
                    bands: BandAllocation, trials: int = 10_000, seed: int = 0,
                    workers: int = 1) -> OutageResult:
    """Outage estimates (G_m, G_s, G_o) with 95% clustered-CI half-widths.

    A class with no centre-cell UEs over all trials has ``mean = nan`` and
    ``defined == False``.
    """
    return simulate(cfg, load, qos, policy, [bands], trials, seed, workers).result(0)


SWEEPABLE = ("w_m", "w_s", "w_o", "p_s", "R_s", "lambda_m", "lambda_s")
_BAND_PARAMS = {"w_m": "w_m", "w_s": "w_s", "w_o": "w_o_m"}


@dataclass(frozen=True)
class CurveRow:
    value: float
    result: OutageResult


def outage_curve(param: str, values: Iterable[float], cfg: NetworkConfig, load: LoadState, qos: QosSpec,
                 policy: SleepPolicy, bands: BandAllocation, trials: int = 10_000, seed: int = 0,
                 workers: int = 1) -> list[CurveRow]:
    """One outage estimate per swept value, all with the same base seed.

    Bandwidth sweeps reuse a single set of draws, which gives exactly the
    numbers separate :func:`estimate_outage` calls would.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValueError("empty sweep")
    if param not in SWEEPABLE:
        raise ValueError(f"cannot sweep {param!r}; choose from {SWEEPABLE}")
    if param in _BAND_PARAMS:
        attr = _BAND_PARAMS[param]
        blist = [replace(bands, **{attr: v}) for v in values]
        tally = simulate(cfg, load, qos, policy, blist, trials, seed, workers)
        return [CurveRow(v, tally.result(i)) for i, v in enumerate(values)]
    rows = []
    for v in values:
        if param in ("p_s", "R_s"):
            pol = replace(policy, scheme="random" if param == "p_s" else "repulsive", **{param: v})
            ld = load
        else:
            pol = policy
            ld = replace(load, **{param: v})
        rows.append(CurveRow(v, estimate_outage(cfg, ld, qos, pol, bands, trials, seed, workers)))
    return rows


def curve_csv(param: str, rows: Sequence[CurveRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([param, "G_m", "G_m_ci", "G_s", "G_s_ci", "G_o", "G_o_ci", "trials"])
    for row in rows:
        r = row.result
        w.writerow([repr(row.value)] + [x for e in r for x in (repr(e.mean), repr(e.ci_half_width))]
                   + [r.G_m.trials])
    return buf.getvalue()
