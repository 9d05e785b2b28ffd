"""Scenario configuration: schema, defaults, validation, hashing.

The config document is JSON with ``schema_version`` 1. Unknown keys are
rejected so typos fail loudly. Every scenario is a pure function of
(config, seed); the manifest records a hash of the canonical config.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from ..algebra import FiniteDimAlgebra
from ..spectral import SpectralMeasure

SCHEMA_VERSION = 1

_KNOWN_KEYS = {
    "schema_version",
    "scenario",
    "seed",
    "measure",
    "measures",
    "algebra",
    "k_grid",
    "eps_grid",
    "tau",
    "microstate",
    "samples_per_k",
    "restarts",
    "representation_eps",
    "polynomial",
    "cover_gamma",
    "freeness",
    "ball_cells",
    "out",
    "format",
}


def default_eps_grid() -> list[float]:
    """Nine log-spaced scales from 0.4 down to 0.025."""
    lo, hi, n = 0.4, 0.025, 9
    ratio = (hi / lo) ** (1.0 / (n - 1))
    return [lo * ratio**i for i in range(n)]


@dataclass
class ScenarioConfig:
    """Validated knobs for one harness run."""

    scenario: str
    seed: int = 20240101
    measure: SpectralMeasure | None = None
    measures: list[SpectralMeasure] = field(default_factory=list)
    algebra: FiniteDimAlgebra | None = None
    k_grid: list[int] = field(default_factory=lambda: [8, 12, 16, 24, 32])
    eps_grid: list[float] = field(default_factory=default_eps_grid)
    tau: float = 0.3
    R: float = 2.0
    m: int = 3
    gamma: float = 0.1
    samples_per_k: int = 2000
    restarts: int = 16
    representation_eps: float = 0.05
    polynomial: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0, 1.0])
    cover_gamma: float = 1e-5
    freeness_k: int = 128
    freeness_trials: int = 200
    ball_cells: int = 200
    out: str = "results"
    fmt: str = "csv"

    def __post_init__(self):
        if not self.k_grid:
            raise ValueError("k grid must be non-empty")
        if any(k2 <= k1 for k1, k2 in zip(self.k_grid, self.k_grid[1:])):
            raise ValueError("k grid must be strictly increasing")
        if not self.eps_grid:
            raise ValueError("eps grid must be non-empty")
        if any(e2 >= e1 for e1, e2 in zip(self.eps_grid, self.eps_grid[1:])):
            raise ValueError("eps grid must be strictly decreasing")
        if self.eps_grid[-1] <= 0:
            raise ValueError("eps grid must be positive")
        if not 0.0 < self.tau < 0.5:
            raise ValueError("tau must lie in (0, 1/2)")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        for mu in self.all_measures():
            bound = max(abs(mu.support_lo), abs(mu.support_hi))
            if self.R <= bound:
                raise ValueError(
                    f"R={self.R} must exceed the measure's norm bound {bound}"
                )

    def all_measures(self) -> list[SpectralMeasure]:
        out = list(self.measures)
        if self.measure is not None:
            out.insert(0, self.measure)
        return out

    def orbit_count(self, k: int) -> int:
        return max(8, self.samples_per_k // k)

    def to_dict(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "seed": self.seed,
            "k_grid": self.k_grid,
            "eps_grid": self.eps_grid,
            "tau": self.tau,
            "microstate": {"R": self.R, "m": self.m, "gamma": self.gamma},
            "samples_per_k": self.samples_per_k,
            "restarts": self.restarts,
            "representation_eps": self.representation_eps,
            "polynomial": self.polynomial,
            "cover_gamma": self.cover_gamma,
            "freeness": {"k": self.freeness_k, "trials": self.freeness_trials},
            "ball_cells": self.ball_cells,
            "out": self.out,
            "format": self.fmt,
        }
        if self.measure is not None:
            doc["measure"] = self.measure.to_dict()
        if self.measures:
            doc["measures"] = [m.to_dict() for m in self.measures]
        if self.algebra is not None:
            doc["algebra"] = self.algebra.to_dict()
        return doc

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def config_from_dict(doc: dict) -> ScenarioConfig:
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version}")
    micro = doc.get("microstate", {})
    freeness = doc.get("freeness", {})
    kwargs = dict(
        scenario=doc["scenario"],
        seed=int(doc.get("seed", 20240101)),
        k_grid=[int(k) for k in doc.get("k_grid", [8, 12, 16, 24, 32])],
        eps_grid=[float(e) for e in doc.get("eps_grid", default_eps_grid())],
        tau=float(doc.get("tau", 0.3)),
        R=float(micro.get("R", 2.0)),
        m=int(micro.get("m", 3)),
        gamma=float(micro.get("gamma", 0.1)),
        samples_per_k=int(doc.get("samples_per_k", 2000)),
        restarts=int(doc.get("restarts", 16)),
        representation_eps=float(doc.get("representation_eps", 0.05)),
        polynomial=[float(c) for c in doc.get("polynomial", [0.0, 0.0, 0.0, 1.0])],
        cover_gamma=float(doc.get("cover_gamma", 1e-5)),
        freeness_k=int(freeness.get("k", 128)),
        freeness_trials=int(freeness.get("trials", 200)),
        ball_cells=int(doc.get("ball_cells", 200)),
        out=doc.get("out", "results"),
        fmt=doc.get("format", "csv"),
    )
    if "measure" in doc:
        kwargs["measure"] = SpectralMeasure.from_dict(doc["measure"])
    if "measures" in doc:
        kwargs["measures"] = [SpectralMeasure.from_dict(d) for d in doc["measures"]]
    if "algebra" in doc:
        kwargs["algebra"] = FiniteDimAlgebra.from_dict(doc["algebra"])
    return ScenarioConfig(**kwargs)


def load_config(path: str) -> ScenarioConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))
