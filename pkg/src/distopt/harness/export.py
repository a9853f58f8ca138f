"""CSV and JSON export of traces, experiments and sweeps."""

from __future__ import annotations

import csv
import io
import json
import os

import numpy as np

from ..trace import CSV_COLUMNS, RunTrace, TraceRecord

__all__ = ["trace_csv", "write_csv", "trace_to_dict", "trace_from_dict", "write_json", "read_json", "export"]

FORMAT_VERSION = 1


def _cell(value):
    if isinstance(value, float):
        # repr is the shortest round-trip form, identical on every IEEE platform
        return repr(value)
    return str(value)


def trace_csv(trace: RunTrace) -> str:
    """CSV text with the fixed column order; an empty trace gives the header only."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in trace.records:
        row = rec.row()
        writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(trace: RunTrace, path) -> str:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trace_csv(trace))
    return str(path)


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def trace_to_dict(trace: RunTrace, config: dict | None = None) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "algorithm": trace.algorithm,
        "columns": list(CSV_COLUMNS),
        "meta": _plain(trace.meta),
        "x": None if trace.x is None else _plain(trace.x),
        "records": [rec.to_dict() for rec in trace.records],
        "config": config,
    }


def trace_from_dict(data: dict) -> RunTrace:
    trace = RunTrace(data["algorithm"], meta=data.get("meta", {}))
    for rec in data["records"]:
        trace.append(TraceRecord.from_dict(rec))
    if data.get("x") is not None:
        trace.x = np.array(data["x"], dtype=float)
    return trace


def write_json(trace: RunTrace, path, config: dict | None = None) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace_to_dict(trace, config), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return str(path)


def read_json(path):
    """Return ``(trace, config)`` from a file written by :func:`write_json`."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return trace_from_dict(data), data.get("config")


def export(result, out_dir, formats=("csv", "json")) -> list:
    """Write an ExperimentResult or SweepResult below ``out_dir``; returns the paths."""
    from .sweep import SweepResult

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if isinstance(result, SweepResult):
        for i, cell in enumerate(result.cells):
            sub = os.path.join(out_dir, f"cell_{i:03d}")
            if cell.result is not None:
                paths += export(cell.result, sub, formats)
            else:
                os.makedirs(sub, exist_ok=True)
                with open(os.path.join(sub, "error.txt"), "w", encoding="utf-8") as fh:
                    fh.write(cell.error + "\n")
        summary = os.path.join(out_dir, "sweep.json")
        with open(summary, "w", encoding="utf-8") as fh:
            json.dump(result.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
        return paths + [summary]
    for i, (seed, trace) in enumerate(zip(result.seeds, result.traces)):
        stem = os.path.join(out_dir, f"trace_{i:03d}")
        if "csv" in formats:
            paths.append(write_csv(trace, stem + ".csv"))
        if "json" in formats:
            paths.append(write_json(trace, stem + ".json", result.config))
    agg = os.path.join(out_dir, "aggregate.csv")
    with open(agg, "w", encoding="utf-8", newline="") as fh:
        fh.write("round,subopt_mean\n")
        for k, v in zip(result.aggregate["round"], result.aggregate["subopt_mean"]):
            fh.write(f"{int(k)},{float(v)!r}\n")
    return paths + [agg]
