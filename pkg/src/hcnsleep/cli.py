"""Command-line entry point: ``python -m hcnsleep <command> [flags]``.

Every command writes CSVs atomically, prints one ``wrote ...`` line per file
and exits 0.  Failures print a single JSON object to stderr and exit 2 for
usage or config problems, 1 for anything else.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic as an
from .config import BandAllocation, ConfigError, LoadState, SleepPolicy, load_config
from .linklayer import interference_factor
from .mcsim import outage_curve
from .optimizer import SolveResult, best_scheme, solve_random_cb, solve_random_no_cb, solve_repulsive
from .traffic import (PowerModel, TrafficProfile, average_sleeping_ratio, dual_peak_profile, planning_csv,
                      planning_sweep, read_profile_csv, sine_profile)

COMMANDS = ("validate-outage", "sweep-sleeping", "traffic", "planning")
KM2 = 1e-6  # per-km^2 -> per-m^2

# sweepable optimizer inputs and how each enters the problem
SLEEP_SWEEPS = ("lambda_s", "lambda_m", "D", "rho_s", "U_o")
DEFAULT_SWEEPS = {"sweep-sleeping": "lambda_s:10:200:20", "planning": "D:400:1100:15"}

# outage-validation operating point
VALIDATE_LOAD = LoadState(20 * KM2, 100 * KM2)
VALIDATE_BANDS = np.arange(1, 11) * 1e6
VALIDATE_P_S = np.round(np.arange(0, 9) * 0.1, 10)
VALIDATE_R_S = np.arange(0, 301, 50, dtype=float)
VALIDATE_OFFLOAD_R = 300.0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Sweep:
    param: str
    lo: float
    hi: float
    steps: int

    @classmethod
    def parse(cls, text: str) -> "Sweep":
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError(f"--sweep expects param:lo:hi:steps, got {text!r}")
        try:
            lo, hi, steps = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise UsageError(f"bad --sweep {text!r}: {exc}") from exc
        if steps < 1:
            raise UsageError("--sweep steps must be >= 1")
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo or (steps > 1 and hi == lo):
            raise UsageError(f"empty sweep range {lo}..{hi}")
        return cls(parts[0], lo, hi, steps)

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps) if self.steps > 1 else np.array([self.lo])


@dataclass(frozen=True)
class ExperimentSpec:
    command: str
    config: Path | None = None
    sweep: Sweep | None = None
    seed: int | None = None
    trials: int | None = None
    out: Path | None = None
    cb: tuple[bool, ...] = (False,)
    scheme: str = "best"
    workers: int = 1
    lambda_m: float = 20.0
    lambda_s: float = 100.0
    profile: str = "sine"
    profile_file: Path | None = None
    knots: Path | None = None
    lambda_max: float = 200.0
    lambda_min: float = 0.5
    samples: int = 96

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for p in (self.config, self.profile_file, self.knots):
            if p is not None and not Path(p).is_file():
                raise UsageError(f"file not found: {p}")
        if self.trials is not None and self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.samples < 2:
            raise UsageError("--samples must be >= 2")
        if self.command == "sweep-sleeping" and self.sweep and self.sweep.param not in SLEEP_SWEEPS:
            raise UsageError(f"sweep-sleeping can sweep {SLEEP_SWEEPS}, not {self.sweep.param!r}")
        if self.command == "planning" and self.sweep and self.sweep.param != "D":
            raise UsageError("planning sweeps D only")


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(path: Path, text: str, note: str = "") -> None:
    write_atomic(path, text)
    rows = max(text.count("\n") - 1, 0)
    print(f"wrote {path} rows={rows}" + (f" {note}" if note else ""))


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _f(x: float) -> str:
    return repr(float(x))


# -- validate-outage -------------------------------------------------------

def cmd_validate_outage(spec, cfg, qos, rd):
    I = interference_factor(cfg)
    trials = spec.trials or rd.trials
    seed = rd.seed if spec.seed is None else spec.seed
    out = spec.out or Path(".")
    load = VALIDATE_LOAD
    full = BandAllocation(cfg.W_m, cfg.W_s, cfg.W_m)

    rows = outage_curve("w_m", VALIDATE_BANDS, cfg, load, qos, SleepPolicy(), full, trials, seed, spec.workers)
    _emit(out / "outage_mbs.csv", _table(
        ["w_m_Hz", "G_m", "G_m_ci", "G_m_analytic", "trials"],
        [[_f(r.value), _f(r.result.G_m.mean), _f(r.result.G_m.ci_half_width),
          _f(an.outage_mbs_closed(cfg, I, load.lambda_m, r.value, qos.U_m)), r.result.G_m.trials] for r in rows]))

    sc_rows = []
    for scheme, param, values in (("random", "p_s", VALIDATE_P_S), ("repulsive", "R_s", VALIDATE_R_S)):
        for r in outage_curve(param, values, cfg, load, qos, SleepPolicy(), full, trials, seed, spec.workers):
            if scheme == "random":
                ana = an.implied_outage_sc(cfg.alpha_s, load.lambda_s, cfg.rho_s, cfg.W_s, qos.U_s, r.value, rd.p_hat_s)
            else:
                ana = an.outage_sc_closed(cfg.alpha_s, load.lambda_s, cfg.rho_s, cfg.W_s, qos.U_s)
            sc_rows.append([scheme, _f(r.value), _f(r.result.G_s.mean), _f(r.result.G_s.ci_half_width),
                            _f(ana), r.result.G_s.trials])
    _emit(out / "outage_sc.csv", _table(
        ["scheme", "p_s_or_R_s_m", "G_s", "G_s_ci", "G_s_analytic", "trials"], sc_rows))

    pol = SleepPolicy.repulsive(VALIDATE_OFFLOAD_R)
    L, rad = an.offloaded_geometry(cfg, pol, load.lambda_s)
    rows = outage_curve("w_o", VALIDATE_BANDS, cfg, load, qos, pol, full, trials, seed, spec.workers)
    _emit(out / "outage_offloaded.csv", _table(
        ["w_o_Hz", "G_o", "G_o_ci", "G_o_analytic", "trials"],
        [[_f(r.value), _f(r.result.G_o.mean), _f(r.result.G_o.ci_half_width),
          _f(an.implied_outage_offloaded(cfg, I, r.value, qos.U_o, L, cfg.alpha_m, rad)), r.result.G_o.trials]
         for r in rows]), f"R_s_m={VALIDATE_OFFLOAD_R}")
    return 0


# -- sweep-sleeping --------------------------------------------------------

def solve(scheme: str, cfg, I, load, qos, cb: bool, p_hat_s: float) -> SolveResult:
    if scheme == "random":
        return (solve_random_cb if cb else solve_random_no_cb)(cfg, I, load, qos, p_hat_s)
    if scheme == "repulsive":
        return solve_repulsive(cfg, I, load, qos, cb)
    return best_scheme(cfg, I, load, qos, cb, p_hat_s)


# densities per km^2, bands in Hz, param is p_s (random) or R_s in m (repulsive)
SWEEP_HEADER = ["lambda_s", "lambda_m", "scheme", "cb", "sleeping_ratio", "param", "p_m", "w_m", "w_s", "w_o",
                "binding", "feasible", "sweep_param", "sweep_value"]


def cmd_sweep_sleeping(spec, cfg, qos, rd):
    sweep = spec.sweep or Sweep.parse(DEFAULT_SWEEPS["sweep-sleeping"])
    rows, feasible = [], 0
    I_cache: dict[float, float] = {}
    for v in sweep.values():
        c, q = cfg, qos
        lm, ls = spec.lambda_m * KM2, spec.lambda_s * KM2
        if sweep.param == "lambda_s":
            ls = v * KM2
        elif sweep.param == "lambda_m":
            lm = v * KM2
        elif sweep.param == "D":
            c = cfg.with_(D=float(v))
        elif sweep.param == "rho_s":
            c = cfg.with_(rho_s=float(v) * KM2)
        else:
            q = qos.with_(U_o=float(v))
        if c.D not in I_cache:
            I_cache[c.D] = interference_factor(c)
        load = LoadState(lm, ls)
        for cb in spec.cb:
            r = solve(spec.scheme, c, I_cache[c.D], load, q, cb, rd.p_hat_s)
            feasible += r.feasible
            b = r.bands
            rows.append([_f(ls / KM2), _f(lm / KM2), r.scheme, int(cb), _f(r.sleeping_ratio),
                         _f(r.policy_param), _f(r.p_m),
                         _f(b.w_m) if b else "", _f(b.w_s) if b else "", _f(b.w_o) if b else "",
                         "|".join(r.binding), int(r.feasible), sweep.param, _f(v)])
    if feasible == 0:
        print(json.dumps({"warning": "infeasible-everywhere", "sweep": sweep.param}), file=sys.stderr)
    _emit(spec.out or Path("sweep_sleeping.csv"), _table(SWEEP_HEADER, rows), f"feasible={feasible}")
    return 0


# -- traffic and planning --------------------------------------------------

def _profile(spec, rd, lambda_max, lambda_min) -> TrafficProfile:
    f = rd.high_rate_fraction
    if spec.profile_file is not None:
        return read_profile_csv(spec.profile_file, f)
    if spec.profile == "sine":
        return sine_profile(lambda_max * KM2, lambda_min * KM2, spec.samples, high_rate_fraction=f)
    kw = {"knots": spec.knots} if spec.knots is not None else {}
    return dual_peak_profile(lambda_max * KM2, lambda_min * KM2, spec.samples, high_rate_fraction=f, **kw)


def cmd_traffic(spec, cfg, qos, rd):
    prof = _profile(spec, rd, spec.lambda_max, spec.lambda_min)
    I = interference_factor(cfg)
    parts, notes = [], []
    for cb in spec.cb:
        trace = average_sleeping_ratio(prof, cfg, qos, cb, rd.p_hat_s, I)
        text = trace.to_csv()
        parts.append(text if not parts else text.split("\n", 1)[1])
        notes.append(f"avg_sleep_ratio_cb{int(cb)}={trace.average:.4f} infeasible_samples={len(trace.infeasible_hours)}")
    _emit(spec.out or Path("traffic_trace.csv"), "".join(parts), " ".join(notes))
    return 0


def cmd_planning(spec, cfg, qos, rd):
    sweep = spec.sweep or Sweep.parse(DEFAULT_SWEEPS["planning"])
    prof = _profile(spec, rd, spec.lambda_max, spec.lambda_min)
    power = PowerModel(rd.P_static_mbs, rd.P_static_sc)
    parts = []
    for cb in spec.cb:
        rows = planning_sweep(sweep.values(), prof, cfg, qos, power, cb, rd.p_hat_s)
        best = min(rows, key=lambda r: r.area_power)
        text = planning_csv(rows)
        parts.append((text if not parts else text.split("\n", 1)[1], f"cb{int(cb)}_best_D_m={best.D:g}"))
    _emit(spec.out or Path("planning.csv"), "".join(t for t, _ in parts), " ".join(n for _, n in parts))
    return 0


HANDLERS = {"validate-outage": cmd_validate_outage, "sweep-sleeping": cmd_sweep_sleeping,
            "traffic": cmd_traffic, "planning": cmd_planning}


def run(spec: ExperimentSpec) -> int:
    spec.validate()
    cfg, qos, rd = load_config(spec.config)
    return HANDLERS[spec.command](spec, cfg, qos, rd)


# -- argument parsing ------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _cb_choice(text: str) -> tuple[bool, ...]:
    return {"on": (True,), "off": (False,), "both": (False, True)}[text]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="key-value config file (default: shipped defaults)")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--cb", nargs="?", const="on", default="off", choices=("on", "off", "both"),
                        help="channel borrowing; bare --cb means on")
    common.add_argument("--scheme", choices=("random", "repulsive", "best"), default="best")
    common.add_argument("--sweep", help="param:lo:hi:steps (densities per km^2, D in m, U_o in bit/s)")
    common.add_argument("--out", type=Path, help="output file (directory for validate-outage)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--lambda-m", type=float, default=20.0, help="MBS-UE density per km^2")
    common.add_argument("--lambda-s", type=float, default=100.0, help="SC-UE density per km^2")
    common.add_argument("--profile", choices=("sine", "dual-peak"), default="sine")
    common.add_argument("--profile-file", type=Path, help="CSV with hour,lambda_per_km2")
    common.add_argument("--knots", type=Path, help="hour,level knot table for the dual-peak profile")
    common.add_argument("--lambda-max", type=float, help="peak total UE density per km^2")
    common.add_argument("--lambda-min", type=float, default=0.5)
    common.add_argument("--samples", type=int, default=96, help="profile samples per day")

    p = _Parser(prog="hcnsleep", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def spec_from_args(argv) -> ExperimentSpec:
    a = build_parser().parse_args(argv)
    lmax = a.lambda_max if a.lambda_max is not None else (50.0 if a.command == "planning" else 200.0)
    return ExperimentSpec(
        command=a.command, config=a.config, sweep=Sweep.parse(a.sweep) if a.sweep else None,
        seed=a.seed, trials=a.trials, out=a.out, cb=_cb_choice(a.cb), scheme=a.scheme, workers=a.workers,
        lambda_m=a.lambda_m, lambda_s=a.lambda_s, profile=a.profile, profile_file=a.profile_file,
        knots=a.knots, lambda_max=lmax, lambda_min=a.lambda_min, samples=a.samples)


def _fail(kind: str, exc: BaseException, code: int) -> int:
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        return run(spec_from_args(sys.argv[1:] if argv is None else argv))
    except UsageError as exc:
        return _fail("usage", exc, 2)
    except ConfigError as exc:
        return _fail("config", exc, 2)
    except OSError as exc:
        return _fail("io", exc, 1)
    except ValueError as exc:
        return _fail("value", exc, 1)
