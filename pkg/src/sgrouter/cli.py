"""Command-line front end: strategy comparison, coverage heat maps, UAV sweeps.

All commands honor --seed for bit-exact reproducibility and write versioned
CSV (leading comment line ``# sg-router v1``) to --out or stdout.

Exit codes: 0 success, 1 failed validation check, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, optimizer, simulate, uav
from .channel import Band
from .config import ConfigError, RunConfig, dbm_to_watt, load_config
from .optimizer import NoConvergence, NoRoot
from .analysis import QuadratureFailure

CSV_VERSION = "# sg-router v1"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _write_csv(path: str | None, lines: list[str]) -> None:
    text = "\n".join([CSV_VERSION, *lines]) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _strategy(cfg: RunConfig, name: str, band) -> simulate.StrategyKind:
    if name == "ideal":
        return simulate.Ideal()
    if name == "stepwise-optimal":
        return simulate.StepwiseOptimal(cfg.hop_cap_epsilon)
    if name == "stepwise-suboptimal":
        return simulate.StepwiseSuboptimal(cfg.hop_cap_epsilon)
    if name == "long-hop":
        return simulate.LongHop(cfg.long_hop_radius[band.band])
    return simulate.ShortHop(cfg.short_hop_max_angle)


def cmd_compare(cfg: RunConfig, args) -> int:
    gamma = 10.0 ** (cfg.gamma_db / 10.0)
    trials = max(1, cfg.trials // 10) if args.quick else cfg.trials
    lines = [
        "band,strategy,r_m,s_dbm,mean_throughput_bps,ci95_bps,coverage,failure_rate,"
        "analytic_throughput_bps"
    ]
    for name in ("thz", "rf"):
        band, lam = cfg.band(name), cfg.density(name)
        for R in cfg.thz_r if name == "thz" else cfg.rf_r:
            for s_dbm in cfg.s_dbm:
                sc = optimizer.Scenario(band, R, dbm_to_watt(s_dbm), lam)
                for sname in cfg.strategies:
                    strat = _strategy(cfg, sname, band)
                    mc = simulate.monte_carlo(strat, sc, gamma, trials, cfg.seed,
                                              workers=args.workers)
                    analytic = ""
                    if sname == "stepwise-suboptimal":
                        acfg = analysis.AnalysisConfig(sc, snr_threshold=gamma)
                        analytic = f"{analysis.analytic_total_throughput(acfg):.6e}"
                    lines.append(
                        f"{name},{sname},{R:g},{s_dbm:g},{mc.mean_throughput:.6e},"
                        f"{mc.throughput_ci95:.6e},{mc.coverage_rate:.6f},"
                        f"{mc.failure_rate:.6f},{analytic}"
                    )
    _write_csv(args.out, lines)
    return EXIT_OK


def cmd_heatmap(cfg: RunConfig, args) -> int:
    name = args.band
    band, lam = cfg.band(name), cfg.density(name)
    r_grid = cfg.thz_r if name == "thz" else cfg.rf_r
    gamma = 10.0 ** (cfg.gamma_db / 10.0)
    if not r_grid or not cfg.s_dbm:
        raise ConfigError("heatmap needs non-empty R and S grids")
    lines = ["r_m\\s_dbm," + ",".join(f"{s:g}" for s in cfg.s_dbm)]
    for R in r_grid:
        row = []
        for s_dbm in cfg.s_dbm:
            sc = optimizer.Scenario(band, R, dbm_to_watt(s_dbm), lam)
            acfg = analysis.AnalysisConfig(sc, snr_threshold=gamma)
            row.append(f"{analysis.analytic_coverage(acfg):.6f}")
        lines.append(f"{R:g}," + ",".join(row))
    _write_csv(args.out, lines)
    return EXIT_OK


def cmd_uav_sweep(cfg: RunConfig, args) -> int:
    thz = cfg.thz
    S = dbm_to_watt(cfg.uav_s_dbm)
    base = optimizer.Scenario(thz, cfg.uav_r, S, cfg.thz_density)
    scn = uav.UavScenario(
        base, cfg.uav_altitude, cfg.uav_density,
        uav.LosParams(cfg.uav_los_a, cfg.uav_los_b),
        cfg.uav_absorption_los, cfg.uav_absorption_nlos,
    )
    trials = max(50, cfg.trials // 100) if args.quick else max(200, cfg.trials // 20)
    lines = ["sweep,value,r_m,s_dbm,mean_throughput_bps"]
    if args.sweep in ("altitude", "both"):
        vals = uav.altitude_sweep(scn, cfg.uav_altitude_grid, trials, cfg.seed)
        for h, v in zip(cfg.uav_altitude_grid, vals):
            lines.append(f"altitude_m,{h:g},{cfg.uav_r:g},{cfg.uav_s_dbm:g},{v:.6e}")
    if args.sweep in ("density", "both"):
        vals = uav.density_sweep(scn, cfg.uav_density_grid, trials, cfg.seed)
        for lam, v in zip(cfg.uav_density_grid, vals):
            lines.append(f"density_per_km2,{lam*1e6:g},{cfg.uav_r:g},{cfg.uav_s_dbm:g},{v:.6e}")
    _write_csv(args.out, lines)
    return EXIT_OK


def cmd_validate(cfg: RunConfig, args) -> int:
    from .validation import run_validation

    results = run_validation(cfg, quick=args.quick)
    lines = ["check,passed,detail"]
    all_ok = True
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: {detail}")
        lines.append(f"\"{name}\",{int(ok)},\"{detail}\"")
        all_ok &= ok
    if args.out:
        _write_csv(args.out, lines)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key=value config file")
    common.add_argument("--seed", type=int, default=None, help="override run.seed")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None, help="output CSV path (default stdout)")
    common.add_argument("--quick", action="store_true", help="reduced trial counts")
    p = argparse.ArgumentParser(prog="sg-router", parents=[common],
                                description="THz/RF multi-hop routing analysis")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("compare", parents=[common], help="strategy comparison table")
    hm = sub.add_parser("heatmap", parents=[common], help="coverage heat map over (R, S)")
    hm.add_argument("--band", choices=("thz", "rf"), default="thz")
    us = sub.add_parser("uav-sweep", parents=[common], help="UAV altitude/density sweeps")
    us.add_argument("--sweep", choices=("altitude", "density", "both"), default="both")
    sub.add_parser("validate", parents=[common], help="run the self-check suite")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config_path = args.config or os.environ.get("SGROUTER_CONFIG")
    try:
        cfg = load_config(config_path)
        if args.seed is not None:
            cfg.seed = args.seed
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "compare":
            return cmd_compare(cfg, args)
        if args.command == "heatmap":
            return cmd_heatmap(cfg, args)
        if args.command == "uav-sweep":
            return cmd_uav_sweep(cfg, args)
        return cmd_validate(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureFailure, NoConvergence, NoRoot, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
