"""Deterministic JSON envelopes and CSV helpers for command output."""

from __future__ import annotations

import csv
import io
import json
import math

from . import __version__

SCHEMA_VERSION = "1.0"


def _clean(obj):
    # JSON has no inf/nan; keep output strictly valid
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def envelope(command: str, config: dict, seed: int, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": config,
        "result": result,
    }


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def rows_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
