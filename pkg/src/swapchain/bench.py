"""Measurement harness: speed-up factors, p(K) decay, timings, uniformity.

Every experiment is driven by one integer seed.  Repetitions draw their own
seeds from it through ``SeedSequence.spawn``, so results do not depend on
the thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.stats import chisquare

from ._table import child_seeds, pmap
from .degree_model import PowerLawSpec, power_law, sample_sequence
from .errors import BadInput, Unrealizable
from .graph import Graph, from_edge_list
from .realization import _as_array, realize
from .shuffle import (
    FINAL, GEOMETRIC, GKANTSIDIS, HEURISTICS, NAIVE, Heuristic, ReferenceConfig,
    ShuffleConfig, Shuffler, disconnection_counts, optimal_reference_shuffle, run_shuffle,
)


def warm_up() -> None:
    """Compile every kernel on a toy graph so timings exclude the JIT."""
    g = from_edge_list(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    for h in HEURISTICS.values():
        run_shuffle(g, ShuffleConfig(heuristic=h, gamma=2))
    optimal_reference_shuffle(g, ShuffleConfig(gamma=1))
    disconnection_counts(g, 2, 4, np.random.default_rng(0))
    disconnection_counts(g, None, 4, np.random.default_rng(0), exact=True)


def _sequence(spec: PowerLawSpec, rng) -> np.ndarray:
    return sample_sequence(spec, rng, connectable=True)


# p(K)

@dataclass(frozen=True)
class PKPoint:
    K: int
    p: float
    samples: int
    events: int
    std_error: float


@dataclass
class PKCurve:
    """Disconnection probability against isolation width.

    ``decay`` is the fitted rate lambda in p(K) ~ exp(-lambda K); it is nan
    when fewer than two points carry enough events.
    """

    points: list[PKPoint]
    decay: float = math.nan
    intercept: float = math.nan
    min_events: int = 10

    @property
    def K(self) -> np.ndarray:
        return np.array([pt.K for pt in self.points])

    @property
    def p(self) -> np.ndarray:
        return np.array([pt.p for pt in self.points])

    @property
    def std_error(self) -> np.ndarray:
        return np.array([pt.std_error for pt in self.points])

    def monotone(self, sigmas: float = 3.0) -> bool:
        """p(K) never rises by more than ``sigmas`` combined standard errors."""
        pts = self.points
        for a, b in zip(pts, pts[1:]):
            if b.p - a.p > sigmas * math.hypot(a.std_error, b.std_error):
                return False
        return True


def fit_decay(points: Sequence[PKPoint], min_events: int = 10) -> tuple[float, float]:
    """Weighted least squares of log p on K, weights = event counts.

    Returns (lambda, intercept) with log p ~ intercept - lambda K.
    """
    use = [pt for pt in points if pt.events >= min_events and pt.p > 0]
    if len(use) < 2:
        return math.nan, math.nan
    k = np.array([pt.K for pt in use], float)
    y = np.log([pt.p for pt in use])
    # polyfit squares w, so pass the square root of the desired weight
    w = np.sqrt([pt.events for pt in use])
    slope, intercept = np.polyfit(k, y, 1, w=w)
    return float(-slope), float(intercept)


def pk_on_graph(g: Graph, widths: Sequence[int], samples: int, rng,
                degree_stop: int = 1, min_events: int = 10) -> PKCurve:
    """Estimate p(K) on one graph for each width in increasing order."""
    widths = [int(k) for k in widths]
    if any(k < 0 for k in widths) or any(b <= a for a, b in zip(widths, widths[1:])):
        raise BadInput("widths must be non-negative and strictly increasing")
    pts = []
    for k in widths:
        applied, split = disconnection_counts(g, k, samples, rng, degree_stop)
        p = split / applied if applied else 0.0
        se = math.sqrt(p * (1 - p) / applied) if applied else 0.0
        pts.append(PKPoint(k, p, applied, split, se))
    decay, icpt = fit_decay(pts, min_events)
    return PKCurve(pts, decay, icpt, min_events)


def measure_pk(source, widths: Sequence[int], samples: int, seed: int = 0,
               gamma: float = 10.0, degree_stop: int = 1) -> tuple[PKCurve, Graph]:
    """Build a shuffled random graph, then estimate p(K) on it.

    ``source`` is a :class:`PowerLawSpec` (a sequence gets drawn) or an
    explicit degree sequence.
    """
    rng = np.random.default_rng(seed)
    degrees = _sequence(source, rng) if isinstance(source, PowerLawSpec) else _as_array(source)
    g = realize(degrees, rng)
    g, _ = run_shuffle(g, ShuffleConfig(gamma=gamma, seed=int(rng.integers(2**63))))
    return pk_on_graph(g, widths, samples, rng, degree_stop), g


def isolated_size_distribution(curve: PKCurve) -> np.ndarray:
    """s_i = (p(i) - p(i+1)) / (p(0) - p(K+1)) for i = 0..K.

    Needs consecutive widths 0..K+1.  ``s_i`` is the share of caught
    disconnections whose isolated side has exactly i+1 vertices, since a
    width-i test flags components of at most i vertices.
    """
    k = curve.K
    if len(k) < 2 or k[0] != 0 or np.any(np.diff(k) != 1):
        raise BadInput("need p(K) at K = 0, 1, ..., K+1")
    p = curve.p
    caught = p[0] - p[-1]
    if caught <= 0:
        return np.zeros(len(p) - 1)
    return (p[:-1] - p[1:]) / caught


def expected_isolated_size(curve: PKCurve) -> float:
    s = isolated_size_distribution(curve)
    return float(np.sum((np.arange(len(s)) + 1) * s))


# speed-up factors

@dataclass(frozen=True)
class HeuristicComparison:
    """Mean committed swaps per connectivity test, averaged over sequences."""

    alpha: float
    z: float
    n: int
    theta_gkan: float
    theta_new: float
    theta_max: float
    sequences: int
    gamma: float
    runs: tuple = field(default=(), repr=False)

    def row(self) -> list:
        return [self.alpha, self.z, self.n, self.sequences, self.gamma,
                self.theta_gkan, self.theta_new, self.theta_max]


COMPARISON_COLUMNS = ["alpha", "z", "n", "sequences", "gamma",
                      "theta_gkan", "theta_new", "theta_max"]


def compare_heuristics(alpha: float, z: float, n: int, seed: int = 0, sequences: int = 10,
                       gamma: float = 10.0, threads: int = 1,
                       reference: ReferenceConfig = ReferenceConfig(),
                       new: Heuristic = GEOMETRIC) -> HeuristicComparison:
    """Gkantsidis, geometric and best-window runs on identical sequences and seeds."""
    spec = power_law(alpha, z, n)

    def one(s):
        rng = np.random.default_rng(s)
        g = realize(_sequence(spec, rng), rng)
        th = []
        for h in (GKANTSIDIS, new):
            _, st = run_shuffle(g, ShuffleConfig(gamma=gamma, heuristic=h, seed=s))
            th.append(st.realized_theta)
        _, st = optimal_reference_shuffle(g, ShuffleConfig(gamma=gamma, seed=s), reference)
        th.append(st.realized_theta)
        return (g.m, *th)

    runs = pmap(one, child_seeds(seed, sequences), threads)
    arr = np.array([r[1:] for r in runs], float)
    means = arr.mean(axis=0)
    return HeuristicComparison(alpha, z, n, *map(float, means), sequences, gamma, tuple(runs))


# timing

VARIANTS = ("naive", "gkantsidis", "geometric", "final")
# beyond these sizes the variant takes hours (naive is quadratic)
DEFAULT_MAX_M = {"naive": 10**4, "gkantsidis": 10**5, "geometric": 10**5, "final": None}


@dataclass(frozen=True)
class TimingRow:
    m_target: int
    n: int
    m: int
    variant: str
    wall_time: float
    valid_swaps: int
    theta: float


TIMING_COLUMNS = ["m_target", "n", "m", "variant", "wall_time", "valid_swaps", "theta"]


def timing_scan(m_list: Sequence[int], alpha: float = 2.5, z: float = 6.7, seed: int = 0,
                variants: Sequence[str] = VARIANTS, max_m: dict | None = None,
                gamma: float = 10.0, repeats: int = 1) -> list[TimingRow]:
    """Shuffle wall time per size and variant, on one shared graph per size.

    Every variant starts from the same realized graph with the same seed.
    With ``repeats`` > 1 the run is repeated and the median time reported.
    """
    limits = DEFAULT_MAX_M if max_m is None else max_m
    warm_up()
    rows = []
    for m_target, s in zip(m_list, child_seeds(seed, len(m_list))):
        n = max(2, int(round(2 * m_target / z)))
        rng = np.random.default_rng(s)
        g = realize(_sequence(power_law(alpha, z, n), rng), rng)
        for v in variants:
            cap = limits.get(v)
            if cap is not None and m_target > cap:
                continue
            times = []
            for _ in range(repeats):
                _, st = run_shuffle(g, ShuffleConfig(gamma=gamma, heuristic=HEURISTICS[v], seed=s))
                times.append(st.wall_time)
            rows.append(TimingRow(m_target, n, g.m, v, float(np.median(times)),
                                  st.valid_swaps, st.realized_theta))
    return rows


def decade_growth(rows: Sequence[TimingRow], variant: str = "final") -> list[float]:
    """Time growth per tenfold increase in m between consecutive sizes.

    The ratio is rescaled by the actual edge counts, which differ a little
    from the targets.
    """
    pts = sorted((r.m, r.wall_time) for r in rows if r.variant == variant)
    out = []
    for (m1, t1), (m2, t2) in zip(pts, pts[1:]):
        out.append((t2 / t1) ** (1.0 / math.log10(m2 / m1)))
    return out


# uniformity

MAX_ENUM_N = 8


def _is_connected(n: int, edges) -> bool:
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def enumerate_realizations(degrees, connected: bool = True) -> list[tuple]:
    """Every labelled simple graph with these degrees, by backtracking.

    Vertex v picks its neighbours above v from those with residual degree
    left, so each edge set comes out exactly once.  Graphs are sorted edge
    tuples.  Limited to ``MAX_ENUM_N`` vertices.
    """
    d = [int(x) for x in _as_array(degrees)]
    n = len(d)
    if n > MAX_ENUM_N:
        raise BadInput(f"enumeration is limited to {MAX_ENUM_N} vertices")
    if sum(d) % 2 or any(x < 0 for x in d):
        return []
    res = d[:]
    edges: list[tuple[int, int]] = []
    out = []

    def rec(v):
        while v < n and res[v] == 0:
            v += 1
        if v == n:
            if not connected or n <= 1 or _is_connected(n, edges):
                out.append(tuple(sorted(edges)))
            return
        need = res[v]
        cands = [w for w in range(v + 1, n) if res[w] > 0]
        if len(cands) < need:
            return
        res[v] = 0
        for combo in combinations(cands, need):
            for w in combo:
                res[w] -= 1
                edges.append((v, w))
            rec(v + 1)
            for w in combo:
                res[w] += 1
                edges.pop()
        res[v] = need

    rec(0)
    return sorted(out)


@dataclass(frozen=True)
class UniformityReport:
    degrees: tuple
    heuristic: str
    runs: int
    spacing: int
    counts: tuple
    chi2: float
    p_value: float
    jitter: int = 0

    @property
    def realizations(self) -> int:
        return len(self.counts)

    def passed(self, level: float = 0.01) -> bool:
        return self.p_value > level


UNIFORMITY_COLUMNS = ["degrees", "heuristic", "runs", "spacing", "jitter", "realizations",
                      "chi2", "p_value", "min_count", "max_count"]


def uniformity_row(r: UniformityReport) -> list:
    return [" ".join(map(str, r.degrees)), r.heuristic, r.runs, r.spacing, r.jitter, r.realizations,
            r.chi2, r.p_value, min(r.counts), max(r.counts)]


def uniformity_suite(degrees, runs: int, spacing: int | None = None,
                     heuristic: Heuristic = FINAL, seed: int = 0,
                     burn_in: int | None = None, jitter: int = 0) -> UniformityReport:
    """Chi-square test of sampled graphs against the exhaustive list of realizations.

    One chain is run; after ``burn_in`` valid swaps (default 10 m) a snapshot
    is taken every ``spacing`` valid swaps (default 3 m).  With ``jitter > 0``
    each gap gets an extra uniform 0..jitter swaps.  A chain counted in valid
    swaps can be periodic: on [2,2,1,1] every valid swap flips between the two
    paths, so fixed spacing yields a strict alternation.
    """
    d = _as_array(degrees)
    graphs = enumerate_realizations(d)
    if not graphs:
        raise Unrealizable("no connected simple graph has these degrees")
    index = {gr: i for i, gr in enumerate(graphs)}
    m = int(d.sum()) // 2
    spacing = 3 * m if spacing is None else spacing
    burn_in = 10 * m if burn_in is None else burn_in
    rng = np.random.default_rng(seed)
    g = realize(d, rng)
    sh = Shuffler(g, ShuffleConfig(heuristic=heuristic, seed=seed), rng=rng)
    sh.advance(burn_in)
    counts = np.zeros(len(graphs), np.int64)
    gaps = spacing + (rng.integers(0, jitter + 1, size=runs) if jitter > 0 else np.zeros(runs, np.int64))
    for gap in gaps:
        sh.advance(int(gap))
        key = tuple(map(tuple, sh.graph.edge_array().tolist()))
        counts[index[key]] += 1
    if len(graphs) == 1:
        chi2, p = 0.0, 1.0
    else:
        res = chisquare(counts)
        chi2, p = float(res.statistic), float(res.pvalue)
    return UniformityReport(tuple(int(x) for x in d), str(heuristic), runs, spacing,
                            tuple(int(c) for c in counts), chi2, p, jitter)


__all__ = [
    "warm_up", "PKPoint", "PKCurve", "fit_decay", "pk_on_graph", "measure_pk",
    "isolated_size_distribution", "expected_isolated_size",
    "HeuristicComparison", "COMPARISON_COLUMNS", "compare_heuristics",
    "VARIANTS", "DEFAULT_MAX_M", "TimingRow", "TIMING_COLUMNS", "timing_scan", "decade_growth",
    "enumerate_realizations", "UniformityReport", "UNIFORMITY_COLUMNS", "uniformity_row",
    "uniformity_suite",
]
