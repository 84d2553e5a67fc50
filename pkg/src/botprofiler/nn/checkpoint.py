"""Versioned JSON checkpoint container for named float64 arrays.

JSON float serialization uses repr, which round-trips IEEE 754 doubles
exactly, so save/load is bit-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import UnreadableFile

FORMAT_TAG = "botprofiler.params.v1"


def save_params(path, params: dict[str, np.ndarray], meta: dict | None = None):
    doc = {
        "format": FORMAT_TAG,
        "meta": meta or {},
        "arrays": {
            name: {"shape": list(arr.shape), "data": arr.reshape(-1).tolist()}
            for name, arr in params.items()
        },
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)


def load_params(path) -> tuple[dict[str, np.ndarray], dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UnreadableFile(f"cannot read checkpoint {path}: {exc}") from None
    if doc.get("format") != FORMAT_TAG:
        raise UnreadableFile(
            f"checkpoint {path} has format {doc.get('format')!r}, expected {FORMAT_TAG!r}"
        )
    params = {}
    for name, entry in doc["arrays"].items():
        arr = np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
        params[name] = arr
    return params, doc.get("meta", {})
