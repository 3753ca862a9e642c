"""Persistence of experiment reports as CSV and JSON, written atomically."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .experiments import ExperimentReport


def _scalar(value):
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.complexfloating):
        return complex(value)
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else float(value)
    return value


def flatten_row(row: dict) -> dict:
    """Complex values become ``<key>_re`` and ``<key>_im``."""
    out = {}
    for key, value in row.items():
        value = _scalar(value)
        if isinstance(value, complex):
            out[f"{key}_re"] = value.real
            out[f"{key}_im"] = value.imag
        else:
            out[key] = value
    return out


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    return str(value)


def csv_text(rows: list[dict]) -> str:
    flat = [flatten_row(r) for r in rows]
    header: list[str] = []
    for r in flat:
        for key in r:
            if key not in header:
                header.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in flat:
        writer.writerow([_cell(r.get(k)) for k in header])
    return buf.getvalue()


def _json_value(value) -> str:
    value = _scalar(value)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        text = "%.17g" % value
        if not any(c in text for c in ".eEn"):
            text += ".0"
        return text
    if isinstance(value, complex):
        return "{" + f'"re": {_json_value(value.real)}, "im": {_json_value(value.imag)}' + "}"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    return json.dumps(str(value))


def json_text(report: ExperimentReport, with_timing: bool = True) -> str:
    """Report as JSON with floats at 17 significant digits; one row per line."""
    lines = [
        "{",
        f'  "experiment": {_json_value(report.experiment)},',
        f'  "params": {_json_value(report.params)},',
        f'  "seed": {report.seed},',
        f'  "version": {_json_value(report.version)},',
    ]
    flat = [flatten_row(r) for r in report.rows]
    if flat:
        lines.append('  "rows": [')
        for i, r in enumerate(flat):
            lines.append("    " + _json_value(r) + ("," if i + 1 < len(flat) else ""))
        lines.append("  ],")
    else:
        lines.append('  "rows": [],')
    tail = f'  "summary": {_json_value(report.summary)}'
    if with_timing:
        lines.append(tail + ",")
        lines.append(f'  "timing": {_json_value(report.timing)}')
    else:
        lines.append(tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: ExperimentReport, out_dir, fmt: str = "csv") -> list[Path]:
    """Write ``<experiment>.csv`` (plus a ``.meta.json`` sidecar) and/or ``<experiment>.json``."""
    out_dir = Path(out_dir)
    written = []
    if fmt in ("csv", "both"):
        p = out_dir / f"{report.experiment}.csv"
        atomic_write(p, csv_text(report.rows))
        written.append(p)
        meta = ExperimentReport(report.experiment, report.params, report.seed, report.version, [], report.summary, report.started, report.finished)
        m = out_dir / f"{report.experiment}.meta.json"
        atomic_write(m, json_text(meta))
        written.append(m)
    if fmt in ("json", "both"):
        p = out_dir / f"{report.experiment}.json"
        atomic_write(p, json_text(report))
        written.append(p)
    return written


def load_schema() -> dict:
    text = resources.files("charlab").joinpath("schema/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_report_json(text: str) -> None:
    import jsonschema

    jsonschema.validate(json.loads(text), load_schema())
