"""On-disk cache of prime coefficient tables.

Records are packed little-endian, 17 bytes each:

    offset 0   uint64   prime p
    offset 8   float64  normalized a_F(p)
    offset 16  uint8    flags (bit 0 set for a bad prime)

A small JSON sidecar stores the cutoff P the file was built for, so a table
computed to P answers every request with cutoff <= P.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

RECORD = np.dtype([("p", "<u8"), ("value", "<f8"), ("flag", "u1")])
ENV_VAR = "SELBERG_LAB_CACHE"


def cache_dir() -> Path:
    root = os.environ.get(ENV_VAR)
    path = Path(root) if root else Path.home() / ".cache" / "selberg_lab"
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_records(path, primes, values, bad) -> None:
    rec = np.empty(len(primes), dtype=RECORD)
    rec["p"] = primes
    rec["value"] = values
    rec["flag"] = np.asarray(bad, dtype=np.uint8)
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    rec.tofile(tmp)
    os.replace(tmp, path)


def read_records(path):
    rec = np.fromfile(path, dtype=RECORD)
    return rec["p"].astype(np.int64), rec["value"].copy(), (rec["flag"] & 1).astype(bool)


def load(key: str, P: int):
    """Cached (primes, values, bad) up to P, or None."""
    base = cache_dir() / key
    meta = base.with_suffix(".json")
    data = base.with_suffix(".bin")
    if not (meta.is_file() and data.is_file()):
        return None
    try:
        stored = json.loads(meta.read_text())["P"]
    except (ValueError, KeyError):
        return None
    if stored < P:
        return None
    primes, values, bad = read_records(data)
    n = int(np.searchsorted(primes, P, side="right"))
    return primes[:n], values[:n], bad[:n]


def store(key: str, P: int, primes, values, bad) -> None:
    """Write the table unless a cache reaching at least as far already exists."""
    base = cache_dir() / key
    try:
        if json.loads(base.with_suffix(".json").read_text())["P"] >= P and base.with_suffix(".bin").is_file():
            return
    except (OSError, ValueError, KeyError):
        pass
    write_records(base.with_suffix(".bin"), primes, values, bad)
    base.with_suffix(".json").write_text(json.dumps({"P": int(P), "records": int(len(primes))}))
