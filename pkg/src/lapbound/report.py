"""Experiment result tables and their CSV/JSON serializations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .estimator import ErrorEstimate
from .graph import Graph, gradient

__all__ = [
    "ReportRow",
    "ExperimentReport",
    "per_edge_table",
    "report_to_csv",
    "report_to_json",
    "comparator_to_csv",
]

CSV_COLUMNS = ("label", "n", "m", "true_error", "psi", "eff", "sweeps", "seconds")
COMPARATOR_COLUMNS = ("method", "psi_or_sqrtE", "true_error", "eff", "seconds")


@dataclass(frozen=True)
class ReportRow:
    label: str
    n: int
    m: int
    psi: float
    sweeps: int
    seconds: float
    true_error: float | None = None

    @property
    def eff(self) -> float | None:
        if self.true_error is None or self.true_error <= 0.0:
            return None
        return self.psi / self.true_error

    @classmethod
    def from_estimate(
        cls, label: str, g: Graph, est: ErrorEstimate, seconds: float
    ) -> "ReportRow":
        return cls(
            label=label,
            n=g.n,
            m=g.m,
            psi=est.psi,
            sweeps=est.sweeps,
            seconds=seconds,
            true_error=est.true_error,
        )


@dataclass
class ExperimentReport:
    """Rows of estimator runs, plus provenance for reproducibility."""

    rows: list = field(default_factory=list)
    seed: int | None = None
    per_edge: list | None = None

    def add(self, row: ReportRow) -> None:
        self.rows.append(row)


def per_edge_table(g: Graph, est: ErrorEstimate, u=None, v=None) -> list:
    """Edge records ``{i, j, w, psi_e}`` in canonical order, 1-based.

    When both ``u`` and ``v`` are given, each record also carries the
    per-edge true error ``err_e``: the weighted drop of ``u - v`` across
    the edge.
    """
    labels = g.edge_labels()
    records = []
    err = None
    if u is not None and v is not None:
        diff = gradient(g, np.asarray(u, dtype=np.float64) - np.asarray(v, dtype=np.float64))
        err = np.sqrt(g.weights) * np.abs(diff)
    for e in range(g.m):
        rec = {
            "i": int(labels[e, 0]),
            "j": int(labels[e, 1]),
            "w": float(g.weights[e]),
            "psi_e": float(est.per_edge[e]),
        }
        if err is not None:
            rec["err_e"] = float(err[e])
        records.append(rec)
    return records


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.10g}"


def report_to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        writer.writerow(
            [
                row.label,
                row.n,
                row.m,
                _fmt(row.true_error),
                _fmt(row.psi),
                _fmt(row.eff),
                row.sweeps,
                _fmt(row.seconds),
            ]
        )
    return buf.getvalue()


def report_to_json(report: ExperimentReport) -> str:
    from lapbound import __version__

    payload = {
        "version": __version__,
        "seed": report.seed,
        "rows": [
            {
                "label": r.label,
                "n": r.n,
                "m": r.m,
                "true_error": r.true_error,
                "psi": r.psi,
                "eff": r.eff,
                "sweeps": r.sweeps,
                "seconds": r.seconds,
            }
            for r in report.rows
        ],
    }
    if report.per_edge is not None:
        payload["per_edge"] = report.per_edge
    return json.dumps(payload, indent=2) + "\n"


def comparator_to_csv(entries) -> str:
    """Rows of ``(method, value, true_error, seconds)`` with derived eff."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARATOR_COLUMNS)
    for method, value, true_error, seconds in entries:
        eff = None if true_error is None or true_error <= 0 else value / true_error
        writer.writerow([method, _fmt(value), _fmt(true_error), _fmt(eff), _fmt(seconds)])
    return buf.getvalue()
