"""Deterministic realization of a degree sequence, then connection by swaps."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit

from . import _kernels as K
from .errors import FormatError, NotConnectable, Unrealizable
from .graph import Graph, from_edge_list


@dataclass(frozen=True)
class DegreeSequence:
    degrees: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.degrees, dtype=np.int64).reshape(-1)
        if len(d) and d.min() < 0:
            raise ValueError("degrees must be non-negative")
        object.__setattr__(self, "degrees", d)

    def __len__(self):
        return len(self.degrees)

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return int(self.degrees.sum())

    @property
    def even_sum(self) -> bool:
        return self.total % 2 == 0

    @cached_property
    def realizable(self) -> bool:
        return erdos_gallai(self.degrees)


def _as_array(seq) -> np.ndarray:
    if isinstance(seq, DegreeSequence):
        return seq.degrees
    return np.asarray(seq, dtype=np.int64).reshape(-1)


def erdos_gallai(seq) -> bool:
    """True iff ``seq`` is the degree sequence of some simple graph."""
    d = _as_array(seq)
    n = len(d)
    if n == 0:
        return True
    if d.min() < 0 or d.sum() % 2 or d.max() > n - 1:
        return False
    d = np.sort(d)[::-1]
    prefix = np.concatenate([[0], np.cumsum(d)])
    k = np.arange(1, n + 1)
    # how many degrees are >= k, for each k
    at_least = n - np.searchsorted(d[::-1], k, side="left")
    p = np.maximum(k, at_least)
    rhs = k * (k - 1) + k * (p - k) + (prefix[n] - prefix[p])
    return bool(np.all(prefix[1:] <= rhs))


@njit(cache=True)
def _havel_hakimi(deg):
    n = len(deg)
    dmax = 0
    for v in range(n):
        if deg[v] > dmax:
            dmax = deg[v]
    first = np.zeros(dmax + 2, np.int64)
    for v in range(n):
        first[deg[v] + 1] += 1
    for d in range(1, dmax + 2):
        first[d] += first[d - 1]
    order = np.empty(n, np.int64)
    pos = np.empty(n, np.int64)
    fill = first.copy()
    for v in range(n):
        order[fill[deg[v]]] = v
        pos[v] = fill[deg[v]]
        fill[deg[v]] += 1
    r = deg.copy()
    m = np.sum(deg) // 2
    eu = np.empty(m, np.int64)
    ev = np.empty(m, np.int64)
    k = 0
    hi = n - 1
    tgt = np.empty(n, np.int64)
    while hi >= 0:
        v = order[hi]
        d = r[v]
        if d == 0:
            break
        hi -= 1
        r[v] = 0
        if d > hi + 1:
            return eu, ev, False
        for t in range(d):
            w = order[hi - t]
            if r[w] == 0:
                return eu, ev, False
            tgt[t] = w
        for t in range(d):
            w = tgt[t]
            dw = r[w]
            f = first[dw]
            u = order[f]
            pw = pos[w]
            order[f] = w
            pos[w] = f
            order[pw] = u
            pos[u] = pw
            first[dw] += 1
            r[w] = dw - 1
            eu[k] = v
            ev[k] = w
            k += 1
    return eu, ev, k == m


def havel_hakimi(seq) -> Graph:
    """Deterministic simple graph with exactly the given degrees.

    Repeatedly joins the vertex of largest residual degree to the next largest
    ones, using residual-degree buckets for O(n + m) time.
    """
    d = _as_array(seq)
    if not erdos_gallai(d):
        raise Unrealizable("degree sequence is not graphical")
    if len(d) == 0:
        return from_edge_list(0, [])
    eu, ev, ok = _havel_hakimi(d.copy())
    if not ok:  # pragma: no cover - Erdos-Gallai already vouched for it
        raise Unrealizable("degree sequence is not graphical")
    return from_edge_list(len(d), np.stack([eu, ev], axis=1))


def connect(g: Graph, rng: np.random.Generator) -> Graph:
    """Return a connected copy of ``g`` with the same degrees.

    Components are merged one at a time by swapping a cycle edge of the
    growing merged part with an edge of the next component (or the reverse
    when the merged part has run out of cycle edges).
    """
    h = g.copy()
    n, m = h.n, h.m
    if n <= 1:
        return h
    if m < n - 1:
        raise NotConnectable(f"{m} edges cannot connect {n} vertices")
    a = h.arrays
    labels, tree = K.spanning_forest(a, h.work)
    ncomp = int(labels.max()) + 1
    if ncomp == 1:
        return h
    edge_comp = labels[a.rec[:, 0]]
    by_comp = np.argsort(edge_comp, kind="stable")
    bounds = np.searchsorted(edge_comp[by_comp], np.arange(ncomp + 1))
    slots = [by_comp[bounds[c]:bounds[c + 1]] for c in range(ncomp)]
    if any(len(s) == 0 for s in slots):
        raise NotConnectable("an isolated vertex cannot be attached without changing degrees")

    cyclic = [c for c in range(ncomp) if not tree[slots[c]].all()]
    acyclic = [c for c in range(ncomp) if tree[slots[c]].all()]
    order = cyclic + acyclic
    start = order[0]
    pool = [int(s) for s in slots[start][~tree[slots[start]]]]
    anchor = int(slots[start][0])
    for c in order[1:]:
        own = slots[c]
        spare = own[~tree[own]]
        if pool:
            i = pool.pop(int(rng.integers(len(pool))))
            bridges = own[tree[own]]
            j = int(bridges[rng.integers(len(bridges))])
            pool.extend(int(s) for s in spare)
        elif len(spare):
            k = int(rng.integers(len(spare)))
            j = int(spare[k])
            i = anchor
            pool.extend(int(s) for s in np.delete(spare, k))
        else:
            raise NotConnectable("no cycle edge left to merge the remaining trees")
        # i and j sit in different components, so the rewiring is always simple
        K.apply_swap(a, i, j, False)
    return h


def realize(seq, rng: np.random.Generator) -> Graph:
    """Havel-Hakimi followed by :func:`connect`."""
    return connect(havel_hakimi(seq), rng)


def read_degrees(path) -> np.ndarray:
    """One non-negative integer per line; blank trailing lines are ignored."""
    out = []
    with open(path) as fh:
        lines = fh.read().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    for k, ln in enumerate(lines, start=1):
        s = ln.strip()
        try:
            d = int(s)
        except ValueError:
            raise FormatError(f"expected a non-negative integer, got {s!r}", k) from None
        if d < 0:
            raise FormatError("degree must be non-negative", k)
        out.append(d)
    return np.asarray(out, dtype=np.int64)


def write_degrees(degrees, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.writelines(f"{int(d)}\n" for d in degrees)
