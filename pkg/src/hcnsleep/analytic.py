"""Closed-form outage probabilities and the linearised QoS constraints.

All hexagon-area expressions go through ``cfg.rho_m`` (MBSs per m^2).  The
closed forms rest on high-SNR / small ``U/w`` approximations and can leave
[0, 1] for extreme inputs; they are clamped, and ``with_flag=True`` also
returns whether clamping fired.
"""

from __future__ import annotations

import math

from .config import BandAllocation, NetworkConfig, QosSpec, SleepPolicy

DEFAULT_P_HAT_S = 0.8


def _clamp(x: float, with_flag: bool):
    y = min(1.0, max(0.0, x))
    return (y, y != x) if with_flag else y


def _signal_to_noise_interference(cfg: NetworkConfig, I: float) -> float:
    return cfg.P_m / (cfg.sigma2 * (1.0 + I))


def tau_m(cfg: NetworkConfig, I: float, eta_m: float) -> float:
    """Edge SINR of MBS UEs for outage cap ``eta_m``."""
    return _signal_to_noise_interference(cfg, I) * (cfg.alpha_m + 2) / 2 * eta_m / cfg.D ** cfg.alpha_m


def tau_o(cfg: NetworkConfig, I: float, eta_o: float, alpha: float, r: float) -> float:
    """Edge SINR of offloaded UEs spread uniformly over a disc of radius ``r``."""
    if r == 0:
        return math.inf
    return _signal_to_noise_interference(cfg, I) * (alpha + 2) / 2 * eta_o / r ** alpha


def tau_s(alpha_s: float, eta_s: float) -> float:
    return (alpha_s - 2) / 2 * eta_s / (1 - eta_s)


def tau_s_prime(alpha_s: float, eta_s: float, p_s: float, p_hat_s: float = DEFAULT_P_HAT_S) -> float:
    """SC edge SINR under random sleeping; flat once ``p_s`` passes ``p_hat_s``."""
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must lie in [0, 1], got {p_s}")
    return tau_s(alpha_s, eta_s) / (1.0 - min(p_hat_s, p_s))


def mbs_load_factor(cfg: NetworkConfig, lambda_m: float) -> float:
    """1 + mean number of other MBS UEs in a macro cell."""
    return 1.0 + lambda_m / cfg.rho_m


def sc_load_factor(cfg: NetworkConfig, lambda_s: float) -> float:
    return 1.0 + lambda_s / cfg.rho_s


def min_w_m(cfg: NetworkConfig, I: float, lambda_m: float, qos: QosSpec) -> float:
    """Smallest MBS-UE band meeting the linearised MBS constraint with equality."""
    return qos.U_m * mbs_load_factor(cfg, lambda_m) / math.log2(1 + tau_m(cfg, I, qos.eta_m))


def min_w_s(cfg: NetworkConfig, lambda_s: float, qos: QosSpec, tau: float) -> float:
    return qos.U_s * sc_load_factor(cfg, lambda_s) / math.log2(1 + tau)


def outage_mbs_closed(cfg: NetworkConfig, I: float, lambda_m: float, w_m: float, U_m: float,
                      with_flag: bool = False):
    """MBS-UE outage probability in the high-SNR limit."""
    if w_m <= 0:
        raise ValueError("w_m must be > 0")
    x = U_m / w_m
    pre = 2 * cfg.D ** cfg.alpha_m * (I + 1) * cfg.sigma2 / (cfg.P_m * (cfg.alpha_m + 2))
    g = pre * (2.0 ** x * math.exp(cfg.hex_area * lambda_m * (2.0 ** x - 1)) - 1)
    return _clamp(g, with_flag)


def outage_mbs_simplified_ok(cfg: NetworkConfig, I: float, lambda_m: float, w_m: float, qos: QosSpec) -> bool:
    w_bar = w_m / mbs_load_factor(cfg, lambda_m)
    return w_bar * math.log2(1 + tau_m(cfg, I, qos.eta_m)) >= qos.U_m


def outage_sc_closed(alpha_s: float, lambda_s: float, rho_s: float, w_s: float, U_s: float,
                     with_flag: bool = False):
    """SC-UE outage without sleeping, interference-limited PPP layer."""
    if not 2.0 < alpha_s <= 4.0:
        raise ValueError(f"alpha_s must lie in (2, 4], got {alpha_s}")
    if w_s <= 0:
        raise ValueError("w_s must be > 0")
    q = 2.0 ** (-(U_s / w_s) * (1 + lambda_s / rho_s))
    g = 1 - (alpha_s - 2) / 2 * q / (1 - (4 - alpha_s) / 2 * q)
    return _clamp(g, with_flag)


def sc_edge_sinr(scheme: str, p_s: float, alpha_s: float, eta_s: float, p_hat_s: float = DEFAULT_P_HAT_S) -> float:
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must lie in [0, 1], got {p_s}")
    if scheme == "random":
        return tau_s_prime(alpha_s, eta_s, p_s, p_hat_s)
    # no sleeping, and the conservative stand-in for repulsive sleeping
    return tau_s(alpha_s, eta_s)


def constraint_sc(scheme: str, p_s: float, lambda_s: float, cfg: NetworkConfig, w_s: float,
                  qos: QosSpec, p_hat_s: float = DEFAULT_P_HAT_S) -> bool:
    tau = sc_edge_sinr(scheme, p_s, cfg.alpha_s, qos.eta_s, p_hat_s)
    return w_s / sc_load_factor(cfg, lambda_s) * math.log2(1 + tau) >= qos.U_s


def offloaded_geometry(cfg: NetworkConfig, policy: SleepPolicy, lambda_s: float) -> tuple[float, float]:
    """(mean offloaded UEs per macro cell, radius of the offloaded disc)."""
    if policy.scheme == "random":
        return cfg.hex_area * lambda_s * policy.p_s, cfg.D
    if policy.scheme == "repulsive":
        return math.pi * policy.R_s ** 2 * lambda_s, policy.R_s
    return 0.0, cfg.D


def offloaded_capacity(band: float, cfg: NetworkConfig, I: float, qos: QosSpec, alpha: float, r: float) -> float:
    """``band * log2(1 + tau_o) / U_o``: how many UEs (incl. the typical one)
    the band can carry at the offloaded edge SINR."""
    if qos.U_o == 0:
        return math.inf
    t = tau_o(cfg, I, qos.eta_o, alpha, r)
    if math.isinf(t):
        return math.inf if band > 0 else 0.0
    return band * math.log2(1 + t) / qos.U_o


def constraint_offloaded(policy: SleepPolicy, lambda_s: float, bands: BandAllocation,
                         cfg: NetworkConfig, I: float, qos: QosSpec) -> tuple[bool, bool]:
    """(MBS-band ok, SC-band ok) for the offloaded UEs.

    Without channel borrowing only the MBS band exists and the SC-band entry
    is vacuously true; likewise when ``p_m == 1`` nobody uses the SC band.
    """
    if bands.w_m > cfg.W_m or bands.w_s > cfg.W_s:
        raise ValueError("band allocation exceeds the layer bandwidth")
    L, r = offloaded_geometry(cfg, policy, lambda_s)
    p_m = policy.p_m if policy.cb else 1.0
    A_m = offloaded_capacity(cfg.W_m - bands.w_m, cfg, I, qos, cfg.alpha_m, r)
    ok_m = A_m >= 1 + L * p_m
    if not policy.cb or p_m == 1.0:
        return ok_m, True
    A_s = offloaded_capacity(cfg.W_s - bands.w_s, cfg, I, qos, cfg.alpha_s, r)
    return ok_m, A_s >= 1 + L * (1 - p_m)


def feasible_p_m(A_m: float, A_s: float, L: float) -> tuple[float, float] | None:
    """Interval of MBS-band probabilities satisfying both offloaded-band
    constraints, or ``None`` if empty.

    ``A_m``/``A_s`` are the band capacities from :func:`offloaded_capacity` and
    ``L`` the mean offloaded load per macro cell.  ``p_m = 1`` leaves the SC band
    idle, so it only needs the MBS band.
    """
    if A_m < 1:
        return None
    if L == 0:
        return (0.0, 1.0) if A_s >= 1 else (1.0, 1.0)
    hi = min(1.0, (A_m - 1) / L)
    if A_s >= 1:
        lo = max(0.0, 1.0 - (A_s - 1) / L)
        if lo <= hi and hi > 0:
            return lo, hi
    return (1.0, 1.0) if hi >= 1.0 else None


def implied_outage_sc(alpha_s: float, lambda_s: float, rho_s: float, w_s: float, U_s: float,
                      p_s: float = 0.0, p_hat_s: float = DEFAULT_P_HAT_S) -> float:
    """Outage cap at which the SC constraint holds with equality.

    Inverts ``tau_s_prime`` for ``eta_s``; for ``alpha_s = 4`` and ``p_s = 0``
    this coincides with :func:`outage_sc_closed`.
    """
    if w_s <= 0:
        raise ValueError("w_s must be > 0")
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must lie in [0, 1], got {p_s}")
    x = 2.0 ** (U_s / w_s * (1 + lambda_s / rho_s)) - 1
    k = 2 * x * (1 - min(p_hat_s, p_s)) / (alpha_s - 2)
    return k / (1 + k)


def implied_outage_offloaded(cfg: NetworkConfig, I: float, w_o: float, U_o: float, L: float,
                             alpha: float, r: float) -> float:
    """Outage cap at which the offloaded constraint on band ``w_o`` is tight."""
    if w_o <= 0:
        raise ValueError("w_o must be > 0")
    t = 2.0 ** (U_o * (1 + L) / w_o) - 1
    return min(1.0, t * 2 * r ** alpha * (1 + I) * cfg.sigma2 / (cfg.P_m * (alpha + 2)))
