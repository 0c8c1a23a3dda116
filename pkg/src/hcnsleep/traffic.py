"""Daily traffic profiles, time-averaged sleeping ratio and area power."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .analytic import DEFAULT_P_HAT_S
from .config import LoadState, NetworkConfig, QosSpec
from .linklayer import interference_factor
from .optimizer import SolveResult, best_scheme

PEAK_HOUR = 14.0
DEFAULT_SAMPLES = 96
MAX_COVERAGE_RADIUS = 1100.0
PATTERN1_KNOTS = Path(__file__).with_name("data") / "pattern1_knots.csv"


@dataclass(frozen=True)
class TrafficProfile:
    """Total UE density (per m^2) sampled on ``hours`` in [0, 24)."""

    hours: np.ndarray
    lam: np.ndarray
    high_rate_fraction: float = 0.8
    lambda_max: float = field(default=math.nan)
    lambda_min: float = field(default=math.nan)

    def __post_init__(self):
        h = np.asarray(self.hours, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        if h.shape != lam.shape or h.ndim != 1 or len(h) < 2:
            raise ValueError("hours and lam must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(h) <= 0) or h[0] < 0 or h[-1] >= 24:
            raise ValueError("hours must increase strictly within [0, 24)")
        if np.any(lam < 0):
            raise ValueError("densities must be >= 0")
        if not 0.0 <= self.high_rate_fraction <= 1.0:
            raise ValueError("high_rate_fraction must lie in [0, 1]")
        object.__setattr__(self, "hours", h)
        object.__setattr__(self, "lam", lam)
        if math.isnan(self.lambda_max):
            object.__setattr__(self, "lambda_max", float(lam.max()))
        if math.isnan(self.lambda_min):
            object.__setattr__(self, "lambda_min", float(lam.min()))

    def loads(self) -> list[LoadState]:
        f = self.high_rate_fraction
        return [LoadState((1 - f) * x, f * x) for x in self.lam]


def _grid(samples_per_day: int) -> np.ndarray:
    if samples_per_day < 2:
        raise ValueError("samples_per_day must be >= 2")
    return np.arange(samples_per_day) * (24.0 / samples_per_day)


def _check_range(lambda_max, lambda_min):
    if not 0 <= lambda_min <= lambda_max:
        raise ValueError("need 0 <= lambda_min <= lambda_max")


def sine_profile(lambda_max: float, lambda_min: float, samples_per_day: int = DEFAULT_SAMPLES,
                 peak_hour: float = PEAK_HOUR, high_rate_fraction: float = 0.8) -> TrafficProfile:
    _check_range(lambda_max, lambda_min)
    t = _grid(samples_per_day)
    s = (1 + np.sin(2 * np.pi * (t - peak_hour) / 24 + np.pi / 2)) / 2
    return TrafficProfile(t, lambda_min + (lambda_max - lambda_min) * s, high_rate_fraction,
                          lambda_max, lambda_min)


def load_knots(path: str | Path = PATTERN1_KNOTS) -> np.ndarray:
    """Read an ``hour,level`` table; levels in [0, 1], hours spanning 0..24
    with equal end levels so the profile wraps continuously."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        k = np.array([[float(r["hour"]), float(r["level"])] for r in rows])
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed knot file {path}: {exc}") from exc
    if (len(k) < 2 or k[0, 0] != 0 or k[-1, 0] != 24 or np.any(np.diff(k[:, 0]) <= 0)
            or np.any((k[:, 1] < 0) | (k[:, 1] > 1)) or k[0, 1] != k[-1, 1]):
        raise ValueError(f"malformed knot file {path}: need increasing hours 0..24, "
                         "levels in [0, 1] and level(0) == level(24)")
    return k


def dual_peak_profile(lambda_max: float, lambda_min: float, samples_per_day: int = DEFAULT_SAMPLES,
                      knots: str | Path | np.ndarray = PATTERN1_KNOTS,
                      high_rate_fraction: float = 0.8) -> TrafficProfile:
    """Two rush-hour peaks, piecewise linear between knots."""
    _check_range(lambda_max, lambda_min)
    k = knots if isinstance(knots, np.ndarray) else load_knots(knots)
    t = _grid(samples_per_day)
    level = np.interp(t, k[:, 0], k[:, 1])
    return TrafficProfile(t, lambda_min + (lambda_max - lambda_min) * level, high_rate_fraction,
                          lambda_max, lambda_min)


def read_profile_csv(path: str | Path, high_rate_fraction: float = 0.8) -> TrafficProfile:
    """CSV with header ``hour,lambda_per_km2``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        h = [float(r["hour"]) for r in rows]
        lam = [float(r["lambda_per_km2"]) * 1e-6 for r in rows]
    except (KeyError, ValueError, TypeError) as exc:
        raise ValueError(f"malformed profile file {path}: {exc}") from exc
    return TrafficProfile(np.array(h), np.array(lam), high_rate_fraction)


@dataclass(frozen=True)
class PowerModel:
    """Constant per-site power (W) of an active MBS and an active SC."""

    P_static_mbs: float = 1000.0
    P_static_sc: float = 10.0

    def __post_init__(self):
        if self.P_static_mbs < 0 or self.P_static_sc < 0:
            raise ValueError("static powers must be >= 0")


@dataclass(frozen=True)
class SleepTrace:
    hours: np.ndarray
    loads: list[LoadState]
    results: list[SolveResult]

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r.sleeping_ratio for r in self.results])

    @property
    def average(self) -> float:
        return float(self.ratios.mean())

    @property
    def infeasible_hours(self) -> np.ndarray:
        return self.hours[[not r.feasible for r in self.results]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        # t in hours, densities per km^2; infeasible samples carry scheme "none"
        w.writerow(["t", "lambda_m", "lambda_s", "scheme", "cb", "sleeping_ratio"])
        for t, ld, r in zip(self.hours, self.loads, self.results):
            w.writerow([repr(float(t)), repr(float(ld.lambda_m * 1e6)), repr(float(ld.lambda_s * 1e6)),
                        r.scheme if r.feasible else "none", int(r.cb), repr(r.sleeping_ratio)])
        return buf.getvalue()


def average_sleeping_ratio(profile: TrafficProfile, cfg: NetworkConfig, qos: QosSpec, cb: bool = False,
                           p_hat_s: float = DEFAULT_P_HAT_S, I: float | None = None) -> SleepTrace:
    """Best-scheme sleeping ratio at every sample; infeasible samples count as 0."""
    I = interference_factor(cfg) if I is None else I
    loads = profile.loads()
    cache: dict[float, SolveResult] = {}
    results = []
    for x, ld in zip(profile.lam, loads):
        if x not in cache:
            cache[x] = best_scheme(cfg, I, ld, qos, cb, p_hat_s)
        results.append(cache[x])
    return SleepTrace(profile.hours, loads, results)


@dataclass(frozen=True)
class PlanningRow:
    D: float
    avg_sleep_ratio: float
    area_power: float  # W per m^2


def area_power(cfg: NetworkConfig, avg_sleep_ratio: float, power: PowerModel) -> float:
    return cfg.rho_m * power.P_static_mbs + cfg.rho_s * (1 - avg_sleep_ratio) * power.P_static_sc


def planning_sweep(radii: Sequence[float], profile: TrafficProfile, cfg: NetworkConfig, qos: QosSpec,
                   power: PowerModel = PowerModel(), cb: bool = False,
                   p_hat_s: float = DEFAULT_P_HAT_S, max_radius: float = MAX_COVERAGE_RADIUS) -> list[PlanningRow]:
    """Area power versus macro coverage radius under a fixed daily profile."""
    rows = []
    for D in radii:
        if D > max_radius:
            raise ValueError(f"coverage radius {D} m exceeds the basic-coverage cap {max_radius} m")
        c = cfg.with_(D=float(D))
        avg = average_sleeping_ratio(profile, c, qos, cb, p_hat_s).average
        rows.append(PlanningRow(float(D), avg, area_power(c, avg, power)))
    return rows


def planning_csv(rows: Sequence[PlanningRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["D_m", "avg_sleep_ratio", "area_power_W_per_km2"])
    for r in rows:
        w.writerow([repr(float(r.D)), repr(float(r.avg_sleep_ratio)), repr(float(r.area_power * 1e6))])
    return buf.getvalue()
