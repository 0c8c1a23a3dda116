"""Maximum sleeping ratio under the random and repulsive schemes.

Every solver returns a :class:`SolveResult`; an infeasible macro or SC layer
is reported through ``feasible=False`` rather than an exception so sweeps can
carry on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analytic as an
from .config import BandAllocation, LoadState, NetworkConfig, QosSpec

P_S_TOL = 1e-6
R_S_TOL = 1e-4
SCAN_POINTS = 64


@dataclass(frozen=True)
class SolveResult:
    scheme: str
    cb: bool
    feasible: bool
    sleeping_ratio: float = 0.0
    policy_param: float = 0.0
    p_m: float = 1.0
    bands: BandAllocation | None = None
    binding: tuple[str, ...] = ()
    method: str = "closed_form"
    flags: tuple[str, ...] = field(default=())

    @classmethod
    def infeasible(cls, scheme: str, cb: bool, reason: str, method: str) -> "SolveResult":
        return cls(scheme, cb, False, binding=(reason,), method=method)


def bisect_max(pred: Callable[[float], bool], lo: float, hi: float, tol: float,
               scan: int = SCAN_POINTS) -> float | None:
    """Largest ``x`` in ``[lo, hi]`` with ``pred(x)`` true, to within ``tol``.

    A coarse scan locates the last feasible grid point first, so a predicate
    that is only monotone past some point is still handled; the bracket is
    then halved with ``lo`` kept feasible.  Returns ``None`` if ``pred(lo)`` is
    false.
    """
    if not pred(lo):
        return None
    if pred(hi):
        return hi
    grid = np.linspace(lo, hi, scan + 1)
    a, b = lo, hi
    for x0, x1 in zip(grid[:-1], grid[1:]):
        if pred(x1):
            a = x1
        else:
            b = x1
            break
    while b - a > tol:
        mid = 0.5 * (a + b)
        if pred(mid):
            a = mid
        else:
            b = mid
    return a


def _random_offload_capacities(cfg, I, qos, w_m, w_s):
    A_m = an.offloaded_capacity(cfg.W_m - w_m, cfg, I, qos, cfg.alpha_m, cfg.D)
    A_s = an.offloaded_capacity(cfg.W_s - w_s, cfg, I, qos, cfg.alpha_s, cfg.D)
    return A_m, A_s


def solve_random_no_cb(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec,
                       p_hat_s: float = an.DEFAULT_P_HAT_S) -> SolveResult:
    """Closed-form optimum of the random scheme without channel borrowing."""
    w_m = an.min_w_m(cfg, I, load.lambda_m, qos)
    if w_m > cfg.W_m:
        return SolveResult.infeasible("random", False, "mbs", "closed_form")
    A_m = an.offloaded_capacity(cfg.W_m - w_m, cfg, I, qos, cfg.alpha_m, cfg.D)
    if load.lambda_s == 0 or math.isinf(A_m):
        raw = math.inf if A_m >= 1 else -math.inf
    else:
        with np.errstate(over="ignore"):  # tiny lambda_s overflows to inf, which the clamp handles
            raw = float(cfg.rho_m / load.lambda_s * (A_m - 1))
    p_s = min(1.0, max(0.0, raw))
    flags = ("clamped",) if p_s != raw else ()
    w_s = an.min_w_s(cfg, load.lambda_s, qos, an.tau_s_prime(cfg.alpha_s, qos.eta_s, p_s, p_hat_s))
    if w_s > cfg.W_s:
        return SolveResult.infeasible("random", False, "sc", "closed_form")
    binding = ("mbs", "offloaded_mbs") if 0 < raw < 1 else ("mbs", "cap" if raw >= 1 else "offloaded_mbs")
    return SolveResult("random", False, True, p_s, p_s, 1.0,
                       BandAllocation.split(cfg, w_m, w_s, cb=False), binding, "closed_form", flags)


def random_no_cb_feasible(cfg, I, load, qos, p_s, p_hat_s=an.DEFAULT_P_HAT_S) -> bool:
    """Full constraint set of the random/no-CB problem at ``p_s``, taking
    ``w_m`` minimal and ``w_s`` as the whole SC band."""
    w_m = an.min_w_m(cfg, I, load.lambda_m, qos)
    if w_m > cfg.W_m or not an.constraint_sc("random", p_s, load.lambda_s, cfg, cfg.W_s, qos, p_hat_s):
        return False
    if p_s == 0:
        return True
    A_m = an.offloaded_capacity(cfg.W_m - w_m, cfg, I, qos, cfg.alpha_m, cfg.D)
    return A_m >= 1 + cfg.hex_area * load.lambda_s * p_s


def _random_cb_state(cfg, I, load, qos, p_s, p_hat_s):
    """(w_m, w_s, p_m interval or None) for the random/CB problem at ``p_s``."""
    w_m = an.min_w_m(cfg, I, load.lambda_m, qos)
    w_s = an.min_w_s(cfg, load.lambda_s, qos, an.tau_s_prime(cfg.alpha_s, qos.eta_s, p_s, p_hat_s))
    if w_m > cfg.W_m or w_s > cfg.W_s:
        return w_m, w_s, None
    if p_s == 0:
        # nothing offloaded; the borrowed band is free
        return w_m, w_s, (1.0, 1.0)
    A_m, A_s = _random_offload_capacities(cfg, I, qos, w_m, w_s)
    return w_m, w_s, an.feasible_p_m(A_m, A_s, cfg.hex_area * load.lambda_s * p_s)


def solve_random_cb(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec,
                    p_hat_s: float = an.DEFAULT_P_HAT_S, tol: float = P_S_TOL) -> SolveResult:
    """Bisection on ``p_s``; at each candidate ``w_m`` and ``w_s`` are minimal
    and a feasible MBS-band share ``p_m`` must exist."""
    def ok(p):
        return _random_cb_state(cfg, I, load, qos, p, p_hat_s)[2] is not None

    p_s = bisect_max(ok, 0.0, 1.0, tol)
    if p_s is None:
        w_m = an.min_w_m(cfg, I, load.lambda_m, qos)
        return SolveResult.infeasible("random", True, "mbs" if w_m > cfg.W_m else "sc", "bisection")
    w_m, w_s, (lo, hi) = _random_cb_state(cfg, I, load, qos, p_s, p_hat_s)
    p_m = 0.5 * (lo + hi)
    binding = ("mbs", "sc", "cap") if p_s == 1.0 else ("mbs", "sc", "offloaded_mbs", "offloaded_sc")
    return SolveResult("random", True, True, p_s, p_s, p_m,
                       BandAllocation.split(cfg, w_m, w_s, cb=True), binding, "bisection")


def random_cb_closed_form(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec,
                          p_hat_s: float = an.DEFAULT_P_HAT_S) -> float:
    """Pooled-band optimum of the random/CB problem for equal path-loss
    exponents in the noise-limited regime ``p_s >= p_hat_s`` (unclamped)."""
    w_m = an.min_w_m(cfg, I, load.lambda_m, qos)
    w_s = an.min_w_s(cfg, load.lambda_s, qos, an.tau_s_prime(cfg.alpha_s, qos.eta_s, p_hat_s, p_hat_s))
    c = math.log2(1 + an.tau_o(cfg, I, qos.eta_o, cfg.alpha_m, cfg.D)) / qos.U_o
    return cfg.rho_m / load.lambda_s * (c * (cfg.W_m - w_m + cfg.W_s - w_s) - 1)


def cb_gain_closed_form(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec,
                        p_hat_s: float = an.DEFAULT_P_HAT_S) -> float:
    """Extra sleeping ratio from borrowing the SC layer's spare band."""
    w_s = an.min_w_s(cfg, load.lambda_s, qos, an.tau_s_prime(cfg.alpha_s, qos.eta_s, p_hat_s, p_hat_s))
    c = math.log2(1 + an.tau_o(cfg, I, qos.eta_o, cfg.alpha_m, cfg.D)) / qos.U_o
    return cfg.rho_m / load.lambda_s * c * (cfg.W_s - w_s)


def _repulsive_bands(cfg, I, load, qos):
    w_m = an.min_w_m(cfg, I, load.lambda_m, qos)
    w_s = an.min_w_s(cfg, load.lambda_s, qos, an.tau_s(cfg.alpha_s, qos.eta_s))
    return w_m, w_s


def _repulsive_p_m(cfg, I, load, qos, R, w_m, w_s, cb):
    if R == 0:
        return (1.0, 1.0)
    L = math.pi * R ** 2 * load.lambda_s
    A_m = an.offloaded_capacity(cfg.W_m - w_m, cfg, I, qos, cfg.alpha_m, R)
    if not cb:
        return (1.0, 1.0) if A_m >= 1 + L else None
    A_s = an.offloaded_capacity(cfg.W_s - w_s, cfg, I, qos, cfg.alpha_s, R)
    return an.feasible_p_m(A_m, A_s, L)


def repulsive_offload_residual(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec, R: float) -> float:
    """Left side minus right side of the no-CB offloaded constraint at radius R,
    in bit/s; strictly decreasing in R."""
    w_m, _ = _repulsive_bands(cfg, I, load, qos)
    t = an.tau_o(cfg, I, qos.eta_o, cfg.alpha_m, R)
    return (cfg.W_m - w_m) / (1 + math.pi * R ** 2 * load.lambda_s) * math.log2(1 + t) - qos.U_o


def solve_repulsive(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec, cb: bool = False,
                    r_cap: float | None = None, tol: float = R_S_TOL) -> SolveResult:
    """Largest sleeping radius meeting all four constraints.

    ``r_cap`` defaults to ``cfg.r_cap`` (sleeping ratio exactly 1); pass
    ``math.inf`` to study the uncapped root, in which case the bracket is grown
    geometrically until it becomes infeasible.
    """
    w_m, w_s = _repulsive_bands(cfg, I, load, qos)
    if w_m > cfg.W_m:
        return SolveResult.infeasible("repulsive", cb, "mbs", "bisection")
    if w_s > cfg.W_s:
        return SolveResult.infeasible("repulsive", cb, "sc", "bisection")
    cap = cfg.r_cap if r_cap is None else r_cap

    def ok(R):
        return _repulsive_p_m(cfg, I, load, qos, R, w_m, w_s, cb) is not None

    hi = cap
    if math.isinf(cap):
        hi = cfg.D
        while ok(hi):
            hi *= 2
            if hi > 1e9:
                break
    # R -> 0+ is feasible iff the offloaded band is non-empty
    if cfg.W_m - w_m <= 0 and not (cb and cfg.W_s - w_s > 0):
        return SolveResult.infeasible("repulsive", cb, "offloaded_mbs", "bisection")
    R = bisect_max(ok, 0.0, hi, tol)
    if not ok(R):  # pragma: no cover - bisect_max keeps the low end feasible
        R = 0.0
    lo_pm, hi_pm = _repulsive_p_m(cfg, I, load, qos, R, w_m, w_s, cb)
    ratio = min(1.0, math.pi * R ** 2 * cfg.rho_m)
    binding = ("mbs", "sc", "cap") if R >= cap else ("mbs", "sc", "offloaded_mbs") + (("offloaded_sc",) if cb else ())
    return SolveResult("repulsive", cb, True, ratio, R, 0.5 * (lo_pm + hi_pm),
                       BandAllocation.split(cfg, w_m, w_s, cb), binding, "bisection")


def repulsive_upper_bound(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec, cb: bool = False,
                          with_ln2: bool = True) -> float:
    """Sleeping-radius bound from ``2**x - 1 >= x ln 2`` and ``1 + L > L``.

    ``with_ln2=False`` drops the ``ln 2`` that the linearisation introduces;
    that variant can undercut the true optimum and is kept only for comparison.
    """
    w_m, w_s = _repulsive_bands(cfg, I, load, qos)
    band = cfg.W_m - w_m + ((cfg.W_s - w_s) if cb else 0.0)
    if band <= 0:
        return 0.0
    if load.lambda_s == 0 or qos.U_o == 0:
        return math.inf
    a = cfg.alpha_m
    k = (a + 2) * qos.eta_o * cfg.P_m / (2 * cfg.sigma2 * (1 + I) * qos.U_o * math.pi * load.lambda_s)
    if with_ln2:
        k /= math.log(2)
    return (k * band) ** (1 / (a + 2))


def best_scheme(cfg: NetworkConfig, I: float, load: LoadState, qos: QosSpec, cb: bool = False,
                p_hat_s: float = an.DEFAULT_P_HAT_S) -> SolveResult:
    """The scheme that turns off more SCs; ties go to the random scheme."""
    rnd = solve_random_cb(cfg, I, load, qos, p_hat_s) if cb else solve_random_no_cb(cfg, I, load, qos, p_hat_s)
    rep = solve_repulsive(cfg, I, load, qos, cb)
    if not rnd.feasible and not rep.feasible:
        return SolveResult.infeasible("none", cb, rnd.binding[0], "bisection")
    if not rep.feasible:
        return rnd
    if not rnd.feasible:
        return rep
    return rep if rep.sleeping_ratio > rnd.sleeping_ratio else rnd
