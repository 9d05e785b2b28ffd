"""Result rows, CSV/JSON persistence, run manifest, gnuplot emission."""

from __future__ import annotations

import csv
import json
import math
import platform
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

CSV_FIELDS = ["scenario", "k", "eps", "statistic", "value", "stderr", "seed", "wall_time"]


@dataclass
class ResultRow:
    scenario: str
    k: int
    eps: float
    statistic: str
    value: float
    stderr: float = float("nan")
    seed: int = 0
    wall_time: float = 0.0

    def as_record(self) -> dict:
        return asdict(self)


class ResultSink:
    """Append-only collector with an ordered flush to disk."""

    def __init__(self):
        self.rows: list[ResultRow] = []

    def add(self, row: ResultRow):
        self.rows.append(row)

    def extend(self, rows):
        self.rows.extend(rows)

    def write_csv(self, path: Path):
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for row in self.rows:
                writer.writerow(row.as_record())

    def write_json(self, path: Path):
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump([r.as_record() for r in self.rows], fh, indent=1)

    def write(self, out_dir: str | Path, fmt: str = "csv") -> Path:
        out = Path(out_dir)
        target = out / ("results.csv" if fmt == "csv" else "results.json")
        if fmt == "csv":
            self.write_csv(target)
        else:
            self.write_json(target)
        return target


def write_manifest(out_dir: str | Path, config, wall_time: float) -> Path:
    from .. import __version__

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "schema_version": 1,
        "scenario": config.scenario,
        "seed": config.seed,
        "config": config.to_dict(),
        "config_sha256": config.config_hash(),
        "versions": {
            "freefractal": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
            "platform": platform.platform(),
        },
        "wall_time_s": wall_time,
    }
    path = out / "run-manifest.json"
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
    return path


def write_gnuplot_tables(out_dir: str | Path, scenario: str, tables: dict) -> list[Path]:
    """Two-column scale/statistic files, one per table key (typically per k)."""
    out = Path(out_dir) / "plots"
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for key, pairs in tables.items():
        path = out / f"{scenario}_{key}.dat"
        with open(path, "w") as fh:
            fh.write("# |log eps|  statistic\n")
            for x, y in pairs:
                fh.write(f"{x:.12g} {y:.12g}\n")
        written.append(path)
    return written
