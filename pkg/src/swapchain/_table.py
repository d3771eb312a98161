"""CSV output shared by the benches: optional ``#`` comment line, then a header."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def format_table(columns, rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([cell(x) for x in row])
    return buf.getvalue()


def params_comment(**params) -> str:
    return " ".join(f"{k}={cell(v)}" for k, v in params.items())


def child_seeds(seed: int, count: int) -> list[int]:
    """Independent 63-bit seeds derived from ``seed``; stable across runs and thread counts."""
    kids = np.random.SeedSequence(seed).spawn(count)
    return [int(k.generate_state(1, np.uint64)[0] >> np.uint64(1)) for k in kids]


def pmap(fn, items, threads: int = 1) -> list:
    """``list(map(fn, items))``, optionally on a thread pool; order is preserved."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))
