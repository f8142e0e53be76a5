"""Experiment-report output: JSON, delimited table, and a summary figure.

The JSON document embeds the full protocol, seed and library version, so an
identical invocation reproduces it byte for byte.  The CSV carries one row
per training size with columns size, mean, min, max, variance.  The figure
plots the mean recognition rate against training size with the min-max band.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .classify import ExperimentReport

__all__ = [
    "FLOAT_FORMAT",
    "report_to_dict",
    "report_json",
    "write_json",
    "write_csv",
    "write_figure",
]

# 10 significant digits everywhere a float is printed, so golden-file
# comparisons stay meaningful.
FLOAT_FORMAT = "%.10g"


def format_float(x: float) -> str:
    return FLOAT_FORMAT % x


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "protocol": report.protocol.to_dict(),
        "library_version": report.library_version,
        "reshape_order": report.reshape_order,
        "ties": report.ties,
        "sizes": [
            {
                "training_size": s.training_size,
                "mean": s.mean,
                "min": s.min,
                "max": s.max,
                "variance": s.variance,
                "rounds": [
                    {
                        "round": r.round,
                        "rate": r.rate,
                        "correct_per_class": list(r.correct_per_class),
                    }
                    for r in s.rounds
                ],
            }
            for s in report.sizes
        ],
        **({"extra": report.extra} if report.extra else {}),
    }


def report_json(report: ExperimentReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def write_json(report: ExperimentReport, path) -> Path:
    path = Path(path)
    path.write_text(report_json(report))
    return path


def write_csv(report: ExperimentReport, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size", "mean", "min", "max", "variance"])
        for s in report.sizes:
            writer.writerow(
                [s.training_size]
                + [format_float(v) for v in (s.mean, s.min, s.max, s.variance)]
            )
    return path


def write_figure(report: ExperimentReport, path) -> Path:
    path = Path(path)
    sizes = [s.training_size for s in report.sizes]
    means = [s.mean for s in report.sizes]
    lows = [s.min for s in report.sizes]
    highs = [s.max for s in report.sizes]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.fill_between(sizes, lows, highs, alpha=0.2, label="min-max over rounds")
    ax.plot(sizes, means, marker="o", label="mean")
    ax.set_xlabel("training size per class")
    ax.set_ylabel("recognition rate")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"max-depth classification ({report.protocol.depth})")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
