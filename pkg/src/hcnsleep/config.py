"""Deployment, QoS and policy types, plus the flat key-value config parser."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

HEX_AREA_FACTOR = 3.0 * math.sqrt(3.0) / 2.0

SCHEMES = ("none", "random", "repulsive")


class ConfigError(ValueError):
    """Raised when a config value violates its documented bound."""


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watt_to_dbm(watt: float) -> float:
    return 10.0 * math.log10(watt / 1e-3)


def _require(ok: bool, name: str, bound: str, value) -> None:
    if not ok:
        raise ConfigError(f"{name}={value!r} violates {bound}")


@dataclass(frozen=True)
class NetworkConfig:
    """Static deployment and radio parameters, all in SI units."""

    D: float = 500.0
    rho_s: float = 25e-6
    P_m: float = 10.0
    P_s: float = 1.0
    W_m: float = 10e6
    W_s: float = 10e6
    sigma2: float = field(default_factory=lambda: dbm_to_watt(-104.0))
    alpha_m: float = 3.5
    alpha_s: float = 4.0
    mbs_rings: int = 2

    def __post_init__(self):
        for name in ("D", "rho_s", "P_m", "P_s", "W_m", "W_s", "sigma2"):
            v = getattr(self, name)
            _require(v > 0 and math.isfinite(v), name, "> 0", v)
        for name in ("alpha_m", "alpha_s"):
            v = getattr(self, name)
            _require(2.0 < v <= 4.0, name, "2 < alpha <= 4", v)
        _require(int(self.mbs_rings) == self.mbs_rings and self.mbs_rings >= 0,
                 "mbs_rings", "integer >= 0", self.mbs_rings)

    @property
    def hex_area(self) -> float:
        return HEX_AREA_FACTOR * self.D ** 2

    @property
    def rho_m(self) -> float:
        """MBS density, one per hexagon."""
        return 1.0 / self.hex_area

    @property
    def r_cap(self) -> float:
        """Largest sleeping radius for which pi R^2 rho_m stays <= 1."""
        return math.sqrt(self.hex_area / math.pi)

    def with_(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class QosSpec:
    """Per-class rate thresholds (bit/s) and outage caps."""

    U_m: float = 64e3
    U_s: float = 100e3
    U_o: float = 100e3
    eta_m: float = 0.05
    eta_s: float = 0.05
    eta_o: float = 0.05

    def __post_init__(self):
        for name in ("U_m", "U_s", "U_o"):
            v = getattr(self, name)
            _require(v >= 0 and math.isfinite(v), name, ">= 0", v)
        for name in ("eta_m", "eta_s", "eta_o"):
            v = getattr(self, name)
            _require(0.0 < v < 1.0, name, "0 < eta < 1", v)

    def with_(self, **changes) -> "QosSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class LoadState:
    """Instantaneous UE densities per m^2."""

    lambda_m: float
    lambda_s: float

    def __post_init__(self):
        _require(self.lambda_m >= 0, "lambda_m", ">= 0", self.lambda_m)
        _require(self.lambda_s >= 0, "lambda_s", ">= 0", self.lambda_s)


@dataclass(frozen=True)
class SleepPolicy:
    scheme: str = "none"
    p_s: float = 0.0
    R_s: float = 0.0
    cb: bool = False
    p_m: float = 1.0

    def __post_init__(self):
        _require(self.scheme in SCHEMES, "scheme", f"one of {SCHEMES}", self.scheme)
        _require(0.0 <= self.p_s <= 1.0, "p_s", "0 <= p_s <= 1", self.p_s)
        _require(self.R_s >= 0.0, "R_s", ">= 0", self.R_s)
        _require(0.0 < self.p_m <= 1.0, "p_m", "0 < p_m <= 1", self.p_m)
        if not self.cb:
            _require(self.p_m == 1.0, "p_m", "p_m == 1 without channel borrowing", self.p_m)

    @classmethod
    def random(cls, p_s: float, cb: bool = False, p_m: float = 1.0) -> "SleepPolicy":
        return cls("random", p_s=p_s, cb=cb, p_m=p_m)

    @classmethod
    def repulsive(cls, R_s: float, cb: bool = False, p_m: float = 1.0) -> "SleepPolicy":
        return cls("repulsive", R_s=R_s, cb=cb, p_m=p_m)

    @property
    def param(self) -> float:
        return self.R_s if self.scheme == "repulsive" else self.p_s


@dataclass(frozen=True)
class BandAllocation:
    """Bandwidth per UE class (Hz).

    ``w_o_m`` is the offloaded share carved from the MBS band and ``w_o_s`` the
    share borrowed from the SC band (zero without channel borrowing).
    """

    w_m: float
    w_s: float
    w_o_m: float
    w_o_s: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            _require(v >= 0 and math.isfinite(v), f.name, ">= 0", v)

    @property
    def w_o(self) -> float:
        return self.w_o_m + self.w_o_s

    @classmethod
    def split(cls, cfg: NetworkConfig, w_m: float, w_s: float, cb: bool) -> "BandAllocation":
        """Offloaded UEs get whatever the non-offloaded classes leave over."""
        if w_m > cfg.W_m or w_s > cfg.W_s:
            raise ConfigError(f"w_m={w_m} or w_s={w_s} exceeds the layer band")
        return cls(w_m, w_s, cfg.W_m - w_m, (cfg.W_s - w_s) if cb else 0.0)


@dataclass(frozen=True)
class RunDefaults:
    """Experiment-level defaults that are not part of the radio model."""

    p_hat_s: float = 0.8
    high_rate_fraction: float = 0.8
    P_static_mbs: float = 1000.0
    P_static_sc: float = 10.0
    trials: int = 10_000
    seed: int = 20150101

    def __post_init__(self):
        _require(0.0 < self.p_hat_s < 1.0, "p_hat_s", "0 < p_hat_s < 1", self.p_hat_s)
        _require(0.0 <= self.high_rate_fraction <= 1.0, "high_rate_fraction",
                 "0 <= fraction <= 1", self.high_rate_fraction)
        _require(self.P_static_mbs >= 0, "P_static_mbs_W", ">= 0", self.P_static_mbs)
        _require(self.P_static_sc >= 0, "P_static_sc_W", ">= 0", self.P_static_sc)
        _require(self.trials >= 1, "trials", ">= 1", self.trials)


# config key -> (target, attribute, converter)
_KEYS = {
    "D_m": ("net", "D", float),
    "rho_s_per_m2": ("net", "rho_s", float),
    "P_m_W": ("net", "P_m", float),
    "P_s_W": ("net", "P_s", float),
    "W_m_Hz": ("net", "W_m", float),
    "W_s_Hz": ("net", "W_s", float),
    "sigma2_dBm": ("net", "sigma2", lambda s: dbm_to_watt(float(s))),
    "alpha_m": ("net", "alpha_m", float),
    "alpha_s": ("net", "alpha_s", float),
    "mbs_rings": ("net", "mbs_rings", int),
    "U_m_bps": ("qos", "U_m", float),
    "U_s_bps": ("qos", "U_s", float),
    "U_o_bps": ("qos", "U_o", float),
    "eta_m": ("qos", "eta_m", float),
    "eta_s": ("qos", "eta_s", float),
    "eta_o": ("qos", "eta_o", float),
    "p_hat_s": ("run", "p_hat_s", float),
    "high_rate_fraction": ("run", "high_rate_fraction", float),
    "P_static_mbs_W": ("run", "P_static_mbs", float),
    "P_static_sc_W": ("run", "P_static_sc", float),
    "trials": ("run", "trials", int),
    "seed": ("run", "seed", int),
}

DEFAULT_CONFIG = Path(__file__).with_name("data") / "default.cfg"


def parse_config(text: str, source: str = "<string>"):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {"net": {}, "qos": {}, "run": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        target, attr, conv = _KEYS[key]
        try:
            values[target][attr] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {val!r}") from exc
    return (NetworkConfig(**values["net"]), QosSpec(**values["qos"]),
            RunDefaults(**values["run"]))


def load_config(path: str | Path | None = None):
    """Return ``(NetworkConfig, QosSpec, RunDefaults)`` from a config file.

    Omitted keys fall back to the shipped defaults; unknown keys are rejected.
    """
    path = DEFAULT_CONFIG if path is None else Path(path)
    return parse_config(path.read_text(), str(path))
