"""CSV exports for traces, comparisons, per-cycle dumps and oracle tables.

Files are written to a temporary sibling and renamed into place, so an
interrupted run never leaves a truncated CSV behind.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .energy import CYCLE_CSV_HEADER, cycle_rows
from .learner import ExperimentTrace
from .metrics import ComparisonSeries

TRACE_HEADER = ["iteration", "action_kind", "routing", "eps", "e_b_J", "bottleneck_station", "failures"]
COMPARISON_HEADER = ["iteration", "e_b_sh", "e_b_emh", "E_sh", "E_emh", "rho", "e_b_emh_ma15"]
ORACLE_HEADER = ["rank", "routing", "e_b_J", "optimal"]


def joules(x: float) -> str:
    return f"{x:.9g}"


def exact(x: float | None) -> str:
    """Round-trippable float text; blank for missing values."""
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    return repr(float(x))


def routing_cell(r) -> str:
    return ";".join(str(p) for p in r.parents)


def write_csv_atomic(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def trace_rows(trace: ExperimentTrace) -> list[list[str]]:
    return [
        [
            str(rec.iteration),
            rec.action,
            routing_cell(rec.routing),
            exact(rec.epsilon),
            joules(rec.e_b),
            str(rec.bottleneck_station),
            str(rec.failures),
        ]
        for rec in trace.records
    ]


def comparison_rows(c: ComparisonSeries) -> list[list[str]]:
    return [
        [str(t), joules(a), joules(b), joules(c_), joules(d), exact(rho), joules(ma)]
        for t, a, b, c_, d, rho, ma in zip(
            c.iterations, c.e_b_sh, c.e_b_emh, c.E_sh, c.E_emh, c.rho, c.e_b_emh_ma
        )
    ]


def cycle_dump_rows(trace: ExperimentTrace) -> list[list[str]]:
    rows = []
    for rec in trace.records:
        if rec.measurement is None:
            raise ValueError("trace was recorded without cycle reports")
        for k, rep in enumerate(rec.measurement.cycle_reports, start=1):
            for row in cycle_rows(rep, rec.iteration, k):
                rows.append([str(row[0]), str(row[1]), str(row[2])] + [exact(v) for v in row[3:9]] + [joules(row[9])])
    return rows


def oracle_rows(ranked) -> list[list[str]]:
    return [
        [str(i), routing_cell(r), joules(e), "1" if i == 1 else "0"]
        for i, (r, e) in enumerate(ranked, start=1)
    ]


def write_trace(trace: ExperimentTrace, path) -> Path:
    return write_csv_atomic(path, TRACE_HEADER, trace_rows(trace))


def write_comparison(c: ComparisonSeries, path) -> Path:
    return write_csv_atomic(path, COMPARISON_HEADER, comparison_rows(c))


def write_cycle_dump(trace: ExperimentTrace, path) -> Path:
    return write_csv_atomic(path, CYCLE_CSV_HEADER, cycle_dump_rows(trace))


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
