"""Command-line interface for batch studies.

Exit codes: 0 success, 2 configuration error, 3 sweep infeasible everywhere,
4 I/O error.  Flags override config-file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import config as config_mod
from .adaptation import GENERALIZED, policy_family, family_outage_table, select_optimum
from .linkbudget import required_gain_threshold
from .sweeps import (
    POLICY_LABELS,
    emit_outputs,
    run_correlation_sweep,
    run_distance_sweep,
    run_orientation_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamadapt",
        description="Beamwidth adaptation studies for planar receive arrays",
    )
    parser.add_argument("--config", help="INI config file (defaults apply when omitted)")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, help="random seed (overrides config)")
    parser.add_argument(
        "--policy", choices=["generalized", "baseline", "both"], help="policies to evaluate"
    )
    parser.add_argument("--plots", action="store_true", help="also emit SVG plots")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("sweep-distance", help="feasible/optimal antenna counts vs distance")
    sub.add_parser("sweep-correlation", help="outage vs error correlation at fixed distance")
    sub.add_parser("sweep-orientation", help="outage vs confidence-ellipse orientation")

    p_out = sub.add_parser("outage", help="feasible range and optimum at one distance")
    p_out.add_argument("--distance", type=float, required=True, help="link distance in meters")

    p_mask = sub.add_parser("mask", help="print an activation mask as an ASCII grid")
    p_mask.add_argument("--distance", type=float, required=True, help="link distance in meters")
    p_mask.add_argument("--count", type=int, help="active count (default: optimal at distance)")
    return parser


def _load_config(args) -> config_mod.ExperimentConfig:
    cfg = config_mod.load(args.config) if args.config else config_mod.ExperimentConfig()
    overrides = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.policy is not None:
        overrides["policy"] = args.policy
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg.validate()


def _run_sweep(args, cfg) -> int:
    runner = {
        "sweep-distance": run_distance_sweep,
        "sweep-correlation": run_correlation_sweep,
        "sweep-orientation": run_orientation_sweep,
    }[args.command]
    result = runner(cfg)
    written = emit_outputs(result, cfg, plots=args.plots)
    for path in written:
        print(f"wrote {path}")
    if args.command == "sweep-distance":
        for label, dist in sorted(result.coverage_distance_m.items()):
            print(f"coverage distance ({label}): {dist if dist is not None else 'infeasible'}")
        if result.coverage_distance_improvement is not None:
            print(f"coverage distance improvement: {result.coverage_distance_improvement:.4f}")
            print(f"coverage area improvement: {result.coverage_area_improvement:.4f}")
        if result.peak_power_saving is not None:
            print(
                f"peak power saving: {result.peak_power_saving:.4f} "
                f"at {result.peak_power_saving_distance_m:.1f} m"
            )
    if args.command == "sweep-orientation" and result.gap_argmax_deg is not None:
        print(f"gap argmax: {result.gap_argmax_deg:.1f} deg (gap {result.gap_max:.6f})")
    if not any(r.feasible for r in result.records):
        print("sweep infeasible at every point", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _point_tables(cfg, distance):
    geom = cfg.geometry()
    pattern = cfg.element_pattern()
    cov = cfg.covariance()
    grid = cfg.integration_grid()
    g0 = required_gain_threshold(cfg.link_budget(), distance)
    out = {}
    for kind in cfg.policy_kinds():
        family = policy_family(geom, cov, cfg.adaptation_policy(kind))
        counts, outage = family_outage_table(geom, pattern, cov, family, cfg.mean_direction(), grid, g0)
        out[kind] = (family, counts, outage[:, 0])
    return g0, out


def _run_outage(args, cfg) -> int:
    g0, tables = _point_tables(cfg, args.distance)
    print(f"distance_m = {args.distance}")
    print(f"g0_db = {g0:.6f}")
    any_feasible = False
    for kind, (family, counts, outage) in tables.items():
        ok = counts[outage <= cfg.outage_threshold]
        opt_count, opt_outage = select_optimum(counts, outage, cfg.geometry().size)
        label = POLICY_LABELS[kind]
        if ok.size:
            any_feasible = True
            print(
                f"{label}: n_min={int(ok.min())} n_max={int(ok.max())} "
                f"optimal={opt_count} outage={opt_outage:.6g}"
            )
        else:
            print(f"{label}: infeasible (best outage {opt_outage:.6g} with {opt_count} antennas)")
    return EXIT_OK if any_feasible else EXIT_INFEASIBLE


def _run_mask(args, cfg) -> int:
    kinds = cfg.policy_kinds()
    kind = kinds[0] if len(kinds) == 1 else GENERALIZED
    g0, tables = _point_tables(cfg, args.distance)
    family, counts, outage = tables[kind]
    if args.count is not None:
        candidates = counts[counts >= args.count]
        count = int(candidates.min()) if candidates.size else int(counts.max())
    else:
        count, _ = select_optimum(counts, outage, cfg.geometry().size)
    mask = family.mask_for_count(count)
    print(f"policy = {POLICY_LABELS[kind]}, active = {mask.active_count}, g0_db = {g0:.3f}")
    print(mask.ascii_art())
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except config_mod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command in ("sweep-distance", "sweep-correlation", "sweep-orientation"):
            return _run_sweep(args, cfg)
        if args.command == "outage":
            return _run_outage(args, cfg)
        return _run_mask(args, cfg)
    except config_mod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ImportError as exc:
        print(f"missing optional dependency: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
