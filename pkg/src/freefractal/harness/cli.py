"""Command line entry point.

Subcommands: dim-single, dim-algebra, additivity, invariance, ball-diameter,
formulas. Each accepts --config (JSON, schema documented in the README),
--seed, --out, and --format; without a config a documented default
configuration runs. Outputs: results.csv (or .json), run-manifest.json, and
gnuplot-ready two-column files under <out>/plots/.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from ..algebra import FiniteDimAlgebra
from ..spectral import SpectralMeasure
from .config import ScenarioConfig, config_from_dict, load_config
from .results import ResultSink, write_gnuplot_tables, write_manifest
from . import scenarios

SCENARIOS = (
    "dim-single",
    "dim-algebra",
    "additivity",
    "invariance",
    "ball-diameter",
    "formulas",
)


def default_config(scenario: str) -> ScenarioConfig:
    """Runnable defaults per scenario, using the two-atom projection law."""
    two_atom = SpectralMeasure.atomic([(0.0, 0.5), (1.0, 0.5)])
    if scenario == "dim-single":
        return ScenarioConfig(scenario=scenario, measure=two_atom)
    if scenario == "dim-algebra":
        return ScenarioConfig(
            scenario=scenario,
            algebra=FiniteDimAlgebra([(2, 1.0)]),
            k_grid=[8, 12, 16, 24, 32],
        )
    if scenario == "additivity":
        return ScenarioConfig(
            scenario=scenario,
            measures=[two_atom, two_atom],
            k_grid=[8, 16, 32],
            samples_per_k=640,
            freeness_k=128,
            freeness_trials=200,
        )
    if scenario == "invariance":
        return ScenarioConfig(
            scenario=scenario,
            measure=SpectralMeasure.uniform(0.0, 1.0),
            k_grid=[16, 24, 32],
            polynomial=[0.0, 0.0, 0.0, 1.0],
        )
    if scenario == "ball-diameter":
        return ScenarioConfig(
            scenario=scenario,
            measure=two_atom,
            k_grid=[16],
            eps_grid=[0.1, 0.05, 0.01],
            ball_cells=200,
        )
    if scenario == "formulas":
        return ScenarioConfig(scenario=scenario, k_grid=[2])
    raise ValueError(f"unknown scenario {scenario}")


def run_scenario(config: ScenarioConfig):
    """Dispatch to the scenario function; returns (report, rows, tables)."""
    name = config.scenario
    if name == "dim-single":
        rep = scenarios.run_single_selfadjoint_dimension(config)
        return rep, rep.rows, rep.tables
    if name == "dim-algebra":
        rep = scenarios.run_fd_algebra_dimension(config)
        return rep, rep.rows, rep.tables
    if name == "additivity":
        rep = scenarios.run_additivity(config)
        return rep, rep.rows, {}
    if name == "invariance":
        rep = scenarios.run_invariance(config)
        return rep, rep.rows, {}
    if name == "ball-diameter":
        rep = scenarios.run_ball_diameter_check(config)
        return rep, rep.rows, {}
    if name == "formulas":
        rep = scenarios.run_formula_suite(seed=config.seed)
        return rep, rep.rows, {}
    raise ValueError(f"unknown scenario {name}")


def _summarize(report) -> dict:
    if hasattr(report, "estimate"):
        out = {"estimate": report.estimate, "target": report.target,
               "gap": report.gap}
        if hasattr(report, "stderr"):
            out["stderr"] = report.stderr
        return out
    if hasattr(report, "joint_estimate"):
        return {
            "joint_estimate": report.joint_estimate,
            "joint_target": report.joint_target,
            "rotated_pass_rate": report.rotated_pass_rate,
            "subadditivity_holds": report.subadditivity_holds,
        }
    if hasattr(report, "difference"):
        return {
            "estimate_identity": report.estimate_identity,
            "estimate_image": report.estimate_image,
            "difference": report.difference,
        }
    if hasattr(report, "success_rate"):
        return {
            "cells": report.cells,
            "success_rate": report.success_rate,
            "eps_too_large": report.eps_too_large,
            "worst_error": report.worst_error,
        }
    if hasattr(report, "all_ok"):
        return {
            "all_ok": report.all_ok,
            "checks": {c.name: {"value": c.value, "error": c.error, "ok": c.ok}
                       for c in report.checks},
        }
    return {}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="freefractal",
        description="Microstate-space fractal dimension experiments",
    )
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config path")
        sp.add_argument("--seed", type=int, help="64-bit master seed override")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), dest="fmt")
    args = parser.parse_args(argv)

    if args.config:
        config = load_config(args.config)
        if config.scenario != args.scenario:
            doc = config.to_dict()
            doc["scenario"] = args.scenario
            config = config_from_dict(doc)
    else:
        config = default_config(args.scenario)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    if args.fmt is not None:
        overrides["format"] = args.fmt
    if overrides:
        doc = config.to_dict()
        doc.update(overrides)
        config = config_from_dict(doc)

    t0 = time.perf_counter()
    report, rows, tables = run_scenario(config)
    wall = time.perf_counter() - t0

    sink = ResultSink()
    sink.extend(rows)
    results_path = sink.write(config.out, config.fmt)
    manifest_path = write_manifest(config.out, config, wall)
    if tables:
        write_gnuplot_tables(config.out, config.scenario, tables)

    summary = _summarize(report)
    print(json.dumps({
        "scenario": config.scenario,
        "seed": config.seed,
        "results": str(results_path),
        "manifest": str(manifest_path),
        "wall_time_s": round(wall, 3),
        "summary": summary,
    }, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
