"""Scenario harness: config schema, result persistence, CLI, experiments."""

from .config import ScenarioConfig, config_from_dict, default_eps_grid, load_config
from .results import ResultRow, ResultSink, write_gnuplot_tables, write_manifest
from .scenarios import (
    run_additivity,
    run_ball_diameter_check,
    run_fd_algebra_dimension,
    run_formula_suite,
    run_invariance,
    run_single_selfadjoint_dimension,
)
