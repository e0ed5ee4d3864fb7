"""Deterministic report serialization.

Reports are JSON documents whose payload is byte-identical across reruns of
the same resolved configuration; everything run-dependent but irrelevant to
the numbers (wall-clock timestamp, tool version) lives in a separate "meta"
block.  The resolved configuration itself is written next to the outputs
together with a sha256 content hash so a report can always be traced back
to the exact inputs that produced it.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os

from . import __version__

__all__ = ["canonical_json", "config_hash", "write_report", "write_resolved_config"]


def _reject_non_finite(obj):
    if isinstance(obj, float) and obj != obj:
        raise ValueError("NaN is not representable in reports; use null")
    if isinstance(obj, float) and obj in (float("inf"), float("-inf")):
        raise ValueError("infinities are not representable in reports")
    if isinstance(obj, dict):
        for k, v in obj.items():
            if not isinstance(k, str):
                raise ValueError(f"non-string key {k!r} in report payload")
            _reject_non_finite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _reject_non_finite(v)


def canonical_json(obj) -> str:
    """Sorted-key, fixed-separator JSON; floats print via repr (shortest
    round-trip), so equal payloads serialize to equal bytes."""
    _reject_non_finite(obj)
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def config_hash(resolved: dict) -> str:
    return hashlib.sha256(canonical_json(resolved).encode()).hexdigest()


def _meta(resolved_hash: str) -> dict:
    return {
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "tool": f"kdvlab {__version__}",
        "config_hash": resolved_hash,
    }


def write_report(path, payload: dict, resolved_hash: str = "") -> str:
    """Write payload + meta block; returns the serialized text."""
    if "meta" in payload:
        raise ValueError("payload must not carry its own meta block")
    doc = dict(payload)
    doc["meta"] = _meta(resolved_hash)
    text = canonical_json(doc) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return text


def write_resolved_config(out_dir, resolved: dict) -> str:
    """Sidecar with the fully-resolved config and its content hash."""
    h = config_hash(resolved)
    doc = {"config": resolved, "config_hash": h}
    path = os.path.join(out_dir, "resolved_config.json")
    with open(path, "w") as fh:
        fh.write(canonical_json(doc) + "\n")
    return h
