"""Simple undirected graphs with O(1) expected edge swaps.

Vertices are dense ids ``0..n-1``.  Edge membership goes through a hashed
edge table, adjacency is a CSR array whose row sizes stay fixed (swaps never
change degrees), and the flat edge index allows uniform edge sampling.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import BadVertex, DuplicateEdge, FormatError, LoopEdge, StaleSwap, TooFewEdges


def _table_size(m: int) -> int:
    size = 8
    while size < 2 * m:
        size *= 2
    return size


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Build with :func:`from_edge_list`.  Mutation happens only through swaps.
    """

    def __init__(self, arrays: K.GraphArrays):
        self.arrays = arrays
        self.work = K.Work(
            np.zeros(arrays.n + 1, np.int64),
            np.zeros(max(arrays.n, 1), np.int64),
            np.zeros(max(arrays.n, 1), np.int64),
        )

    @property
    def n(self) -> int:
        return self.arrays.n

    @property
    def m(self) -> int:
        return self.arrays.m

    @property
    def degree(self) -> np.ndarray:
        return self.arrays.deg

    @property
    def z(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def neighbors(self, v: int) -> np.ndarray:
        a = self.arrays
        return a.adj[a.off[v]:a.off[v + 1], 0]

    def adjacency(self, v: int) -> set[int]:
        return set(self.neighbors(v).tolist())

    def has_edge(self, u: int, v: int) -> bool:
        return bool(K.has_edge(self.arrays, u, v))

    def edge_slot(self, u: int, v: int) -> int:
        """Position of edge {u,v} in the flat edge index, -1 if absent."""
        if not (0 <= u < self.n and 0 <= v < self.n):
            return -1
        return int(K.edge_slot(self.arrays, u, v))

    def edge(self, i: int) -> tuple[int, int]:
        r = self.arrays.rec[i]
        return int(r[0]), int(r[1])

    def edge_array(self) -> np.ndarray:
        """(m, 2) array of edges, each row sorted, rows in lexicographic order."""
        rec = self.arrays.rec
        e = np.sort(rec[:, :2].astype(np.int64), axis=1)
        if len(e):
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
        return e

    def edges(self) -> list[tuple[int, int]]:
        return [tuple(r) for r in self.edge_array().tolist()]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def copy(self) -> "Graph":
        a = self.arrays
        return Graph(K.GraphArrays(a.n, a.m, *(x.copy() for x in a[2:-1]), a.mask))

    def same_state(self, other: "Graph") -> bool:
        """Structural equality including edge-slot layout (hash table internals excluded)."""
        a, b = self.arrays, other.arrays
        if a.n != b.n or a.m != b.m:
            return False
        if not np.array_equal(np.sort(a.hkeys), np.sort(b.hkeys)):
            return False
        fields = ("deg", "off", "adj", "rec")
        return all(np.array_equal(getattr(a, f), getattr(b, f)) for f in fields)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.m == other.m and np.array_equal(
            self.edge_array(), other.edge_array()
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def check(self) -> None:
        """Assert every structural invariant; meant for tests and debugging."""
        a = self.arrays
        assert a.rec.shape == (a.m, 4)
        seen = set()
        for i in range(a.m):
            u, v, su, sv = (int(x) for x in a.rec[i])
            assert u != v, "loop"
            key = (min(u, v), max(u, v))
            assert key not in seen, "multi-edge"
            seen.add(key)
            assert a.off[u] <= su < a.off[u + 1] and a.off[v] <= sv < a.off[v + 1]
            assert a.adj[su, 0] == v and a.adj[sv, 0] == u
            assert a.adj[su, 1] == i and a.adj[sv, 1] == i
            assert a.adj[su, 2] == a.deg[v] and a.adj[sv, 2] == a.deg[u]
            assert K.has_edge(a, u, v) and K.edge_slot(a, u, v) == i
        assert int(np.sum(a.deg)) == 2 * a.m
        assert np.array_equal(np.diff(a.off), a.deg)
        assert int(np.sum(a.hkeys >= 0)) == a.m
        for v in range(a.n):
            row = a.adj[a.off[v]:a.off[v + 1], 0].tolist()
            assert len(set(row)) == len(row)
            for w in row:
                assert v in a.adj[a.off[w]:a.off[w + 1], 0]


def from_edge_list(n: int, edges: Iterable[Sequence[int]] | np.ndarray) -> Graph:
    """Build a :class:`Graph`; raises on loops, duplicates or out-of-range ids."""
    e = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
    if e.size == 0:
        e = e.reshape(0, 2)
    if e.ndim != 2 or e.shape[1] != 2:
        raise ValueError("edges must be pairs")
    m = len(e)
    if m and (e.min() < 0 or e.max() >= n):
        bad = int(np.flatnonzero((e < 0) | (e >= n))[0] // 2)
        raise BadVertex(f"edge {tuple(e[bad].tolist())} has an endpoint outside 0..{n - 1}")
    eu = e[:, 0].copy()
    ev = e[:, 1].copy()
    loops = np.flatnonzero(eu == ev)
    if len(loops):
        raise LoopEdge(f"loop on vertex {int(eu[loops[0]])}")
    keys = np.minimum(eu, ev) * n + np.maximum(eu, ev)
    uniq, counts = np.unique(keys, return_counts=True)
    if len(uniq) < m:
        k = int(uniq[np.argmax(counts > 1)])
        raise DuplicateEdge(f"edge ({k // n}, {k % n}) appears more than once")

    if n >= 2**31 or 2 * m >= 2**31:
        raise ValueError("graph too large for 32-bit vertex and slot ids")
    ends = np.concatenate([eu, ev])
    deg = np.bincount(ends, minlength=n).astype(np.int32)
    off = np.zeros(n + 1, np.int64)
    np.cumsum(deg, out=off[1:])
    order = np.argsort(ends, kind="stable")
    slots = np.empty(2 * m, np.int64)
    slots[order] = np.arange(2 * m)
    rec = np.empty((m, 4), np.int32)
    rec[:, 0] = eu
    rec[:, 1] = ev
    rec[:, 2] = slots[:m]
    rec[:, 3] = slots[m:]
    adj = np.empty((2 * m, 3), np.int32)
    adj[slots[:m], 0] = ev
    adj[slots[m:], 0] = eu
    adj[slots[:m], 1] = np.arange(m)
    adj[slots[m:], 1] = np.arange(m)
    adj[:, 2] = deg[adj[:, 0]]
    size = _table_size(m)
    arrays = K.GraphArrays(n, m, deg, off, adj, rec, np.full(size, -1, np.int64), size - 1)
    K.build_table(arrays)
    return Graph(arrays)


@dataclass(frozen=True)
class EdgeSwap:
    """Candidate rewiring of ``e1=(a,b)`` and ``e2=(c,d)``.

    ``pairing`` 0 yields (a,d),(c,b); ``pairing`` 1 yields (a,c),(b,d).
    """

    e1: tuple[int, int]
    e2: tuple[int, int]
    pairing: int

    def targets(self) -> tuple[tuple[int, int], tuple[int, int]]:
        (a, b), (c, d) = self.e1, self.e2
        if self.pairing == 0:
            return (a, d), (c, b)
        return (a, c), (b, d)

    def inverse(self) -> "EdgeSwap":
        """Swap that undoes this one once applied."""
        (a, b), (c, d) = self.e1, self.e2
        if self.pairing == 0:
            # (a,d),(c,b) -> (a,b),(c,d)
            return EdgeSwap((a, d), (c, b), 0)
        # (a,c),(b,d) -> (a,b),(c,d)
        return EdgeSwap((a, c), (b, d), 1)


class SwapStatus(enum.Enum):
    APPLIED = "applied"
    REJECTED_SIMPLICITY = "rejected_simplicity"
    REJECTED_ISOLATION = "rejected_isolation"


@dataclass(frozen=True)
class SwapOutcome:
    status: SwapStatus
    isolated_component_size: int | None = None

    @property
    def applied(self) -> bool:
        return self.status is SwapStatus.APPLIED


def sample_swap(g: Graph, rng: np.random.Generator) -> EdgeSwap:
    """Uniform ordered pair of distinct edges and a uniform pairing."""
    if g.m < 2:
        raise TooFewEdges(f"need at least 2 edges, graph has {g.m}")
    i, j, f = K.draw_swap(g.arrays, rng)
    return EdgeSwap(g.edge(i), g.edge(j), int(f))


def _resolve(g: Graph, s: EdgeSwap) -> tuple[int, int, bool]:
    """Map an EdgeSwap onto (slot i, slot j, flip) for the kernels."""
    i = g.edge_slot(*s.e1)
    j = g.edge_slot(*s.e2)
    if i < 0 or j < 0:
        raise StaleSwap(f"swap {s} refers to an edge not in the graph")
    if i == j:
        raise StaleSwap("swap uses the same edge twice")
    (t1, t2) = s.targets()
    want = {frozenset(t1), frozenset(t2)}
    p, q = g.edge(i)
    r, w = g.edge(j)
    if {frozenset((p, w)), frozenset((r, q))} == want:
        return i, j, False
    return i, j, True


def try_swap(g: Graph, s: EdgeSwap) -> SwapOutcome:
    """Apply ``s`` if the result stays simple; connectivity is not checked."""
    i, j, f = _resolve(g, s)
    if not K.swap_is_simple(g.arrays, i, j, f):
        return SwapOutcome(SwapStatus.REJECTED_SIMPLICITY)
    K.apply_swap(g.arrays, i, j, f)
    return SwapOutcome(SwapStatus.APPLIED)


def is_connected(g: Graph) -> bool:
    return bool(K.is_connected(g.arrays, g.work))


def component_labels(g: Graph) -> np.ndarray:
    return K.component_labels(g.arrays, g.work)


@dataclass(frozen=True)
class Isolation:
    isolated: bool
    size: int | None = None

    def __bool__(self):
        return self.isolated


def isolation_test(g: Graph, v: int, width: int, degree_stop: bool | int = False) -> Isolation:
    """Does ``v`` sit in a component of at most ``width`` vertices?

    A component spanning the whole graph never counts as isolated.
    ``degree_stop`` may be ``2`` to explore high-degree vertices first.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    if not 0 <= v < g.n:
        raise BadVertex(f"vertex {v} outside 0..{g.n - 1}")
    size = K.isolation(g.arrays, g.work, v, width, int(degree_stop))
    if size < 0:
        return Isolation(False)
    return Isolation(True, int(size))


def _distances_from(g: Graph, s: int) -> np.ndarray:
    dist = np.full(g.n, -1, np.int64)
    dist[s] = 0
    q = deque([s])
    while q:
        x = q.popleft()
        for w in g.neighbors(x):
            if dist[w] < 0:
                dist[w] = dist[x] + 1
                q.append(w)
    return dist


def rho(g: Graph) -> float:
    """Fraction of ordered vertex pairs at distance >= 3 (unreachable counts as far)."""
    n = g.n
    if n < 2:
        raise ValueError("rho needs at least two vertices")
    far = 0
    for s in range(n):
        d = _distances_from(g, s)
        far += int(np.sum((d >= 3) | (d < 0)))
    return far / (n * (n - 1))


def _candidates(g: Graph):
    for i in range(g.m):
        for j in range(g.m):
            if i != j:
                yield i, j, False
                yield i, j, True


def valid_swap_fraction(g: Graph) -> float:
    """Exhaustive share of candidate swaps that keep the graph simple and connected."""
    if g.m < 2:
        raise TooFewEdges(f"need at least 2 edges, graph has {g.m}")
    h = g.copy()
    a = h.arrays
    good = total = 0
    for i, j, f in _candidates(h):
        total += 1
        if not K.swap_is_simple(a, i, j, f):
            continue
        K.apply_swap(a, i, j, f)
        if K.is_connected(a, h.work):
            good += 1
        K.undo_swap(a, i, j, f)
    return good / total


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the biggest component, relabelled in increasing id order.

    Ties go to the component holding the smallest vertex id.
    """
    if g.n == 0:
        return g.copy()
    labels = component_labels(g)
    sizes = np.bincount(labels)
    # labels are numbered by smallest member, so argmax already honours the tie rule
    keep = labels == int(np.argmax(sizes))
    return induced_subgraph(g, np.flatnonzero(keep))


def induced_subgraph(g: Graph, vertices: np.ndarray) -> Graph:
    vertices = np.asarray(vertices, np.int64)
    remap = np.full(g.n, -1, np.int64)
    remap[vertices] = np.arange(len(vertices))
    e = g.edge_array()
    inside = (remap[e[:, 0]] >= 0) & (remap[e[:, 1]] >= 0)
    return from_edge_list(len(vertices), remap[e[inside]])


def connected_graphs(n: int):
    """Every labelled connected simple graph on ``n`` vertices (exhaustive, small n only)."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        if n > 1 and len(edges) < n - 1:
            continue
        g = from_edge_list(n, edges)
        if is_connected(g):
            yield g


@dataclass(frozen=True)
class BoundScan:
    """Outcome of checking the valid-swap lower bound on every connected graph of one size."""

    n: int
    graphs: int
    violations: int
    rho_positive: int
    min_ratio: float


def swap_bound_scan(n: int) -> BoundScan:
    """Exhaustive check of valid_swap_fraction >= rho / (2 z (z + 1)) for ``n <= 8``.

    Bitmask re-implementation of :func:`rho` and :func:`valid_swap_fraction`,
    fast enough for the ~1.9 million connected graphs on seven vertices.
    """
    if not 1 <= n <= 8:
        raise ValueError("exhaustive scan supports 1 <= n <= 8")
    pairs = np.array(list(combinations(range(n), 2)), np.int64).reshape(-1, 2)
    out = np.zeros(3, np.int64)
    worst = K.bound_scan(n, pairs[:, 0].copy(), pairs[:, 1].copy(), out)
    return BoundScan(n, int(out[0]), int(out[1]), int(out[2]), float(worst))


def read_edge_list(path) -> Graph:
    """Parse the ``n m`` header + ``u v`` lines format."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty file", 1)
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("header must be 'n m'", 1)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError("header must hold two integers", 1) from None
    if n < 0 or m < 0:
        raise FormatError("negative count in header", 1)
    body = [ln for ln in lines[1:]]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != m:
        raise FormatError(f"header announces {m} edges, found {len(body)}", len(lines) if body else 1)
    edges = np.empty((m, 2), np.int64)
    for k, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError("expected 'u v'", k + 2)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError("vertex ids must be integers", k + 2) from None
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"vertex id outside 0..{n - 1}", k + 2)
        edges[k] = u, v
    try:
        return from_edge_list(n, edges)
    except (LoopEdge, DuplicateEdge) as exc:
        raise FormatError(str(exc)) from None


def format_edge_list(g: Graph) -> str:
    e = g.edge_array()
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in e.tolist())
    return "\n".join(out) + "\n"


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_edge_list(g))
