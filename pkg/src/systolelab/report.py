"""JSON and CSV emission for command results.

Every document has the same four top-level keys: ``command``,
``config_digest``, ``results`` and ``certificates``.  Keys are sorted and
floats are written by ``repr``, so output is byte-stable for a fixed seed.
Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import is_dataclass

import numpy as np

from .cones import ConeCertificate

SCHEMA_KEYS = ("command", "config_digest", "results", "certificates")


def to_plain(obj):
    """Recursively turn results into JSON-compatible builtins."""
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    if is_dataclass(obj):
        raise TypeError(f"{type(obj).__name__} has no to_json")
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_report(command: str, digest: str, results, certificates: dict | None = None) -> dict:
    return {"command": command, "config_digest": digest, "results": to_plain(results),
            "certificates": to_plain(certificates or {})}


def any_indeterminate(certificates) -> bool:
    """True when some certificate, however deeply nested, carries an indeterminate verdict."""
    if isinstance(certificates, ConeCertificate):
        return certificates.verdict is None
    if isinstance(certificates, dict):
        if certificates.get("verdict") == "indeterminate":
            return True
        return any(any_indeterminate(v) for v in certificates.values())
    if isinstance(certificates, (list, tuple)):
        return any(any_indeterminate(v) for v in certificates)
    return False


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def to_csv(report: dict) -> str:
    """Two-column ``key,value`` table of the flattened report."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(report):
        w.writerow([k, repr(v) if isinstance(v, float) else v])
    return buf.getvalue()
