"""The edge-swap Markov chain and its speed-up strategies.

Four engines share one resumable driver, :class:`Shuffler`:

* ``naive``       full connectivity test after every applied swap
* ``gkantsidis``  windows of ceil(T) swaps, T <- T/2 on failure, T+1 on success
* ``geometric``   windows with T <- T(1-q-) / T(1+q+)
* ``final``       windows with per-swap isolation tests of width K; K doubles
                  when a window still disconnects the graph

A swap counts as valid once it passes the simplicity test (and the isolation
test for ``final``).  Valid swaps inside a window that ends disconnected are
cancelled together with the window.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .errors import BadInput, DegenerateP, NoValidSwaps, WrongHeuristic
from .graph import Graph, is_connected
from .realization import realize

E = math.e
DEFAULT_Q_MINUS = 0.1
T_LIMIT = float(2**53)


@dataclass(frozen=True)
class Heuristic:
    """Strategy selector.  ``q_minus``/``q_plus`` matter for geometric and final."""

    name: str
    q_minus: float = DEFAULT_Q_MINUS
    q_plus: float = DEFAULT_Q_MINUS * (E - 1)

    def __post_init__(self):
        if self.name not in ("naive", "gkantsidis", "geometric", "final"):
            raise ValueError(f"unknown heuristic {self.name!r}")
        if not 0 < self.q_minus < 1:
            raise ValueError("q_minus must lie in (0, 1)")
        if self.q_plus <= 0:
            raise ValueError("q_plus must be positive")

    def __str__(self):
        if self.name == "geometric":
            return f"geometric(q-={self.q_minus:g},q+={self.q_plus:g})"
        return self.name


NAIVE = Heuristic("naive")
GKANTSIDIS = Heuristic("gkantsidis")
FINAL = Heuristic("final")


def geometric(q_minus: float = DEFAULT_Q_MINUS, q_plus: float | None = None) -> Heuristic:
    """Geometric window rule; ``q_plus`` defaults to the optimal ``q_minus * (e - 1)``."""
    if q_plus is None:
        q_plus = q_minus * (E - 1)
    return Heuristic("geometric", q_minus, q_plus)


GEOMETRIC = geometric()

HEURISTICS = {"naive": NAIVE, "gkantsidis": GKANTSIDIS, "geometric": GEOMETRIC, "final": FINAL}


@dataclass(frozen=True)
class ShuffleConfig:
    """``gamma`` scales the swap budget: ceil(gamma * m) valid swaps get committed."""

    gamma: float = 10.0
    heuristic: Heuristic = FINAL
    initial_T: float = 1.0
    initial_K: int = 1
    degree_stop: int = 1
    seed: int = 0
    progress: Optional[Callable[[int, int], None]] = field(default=None, compare=False)
    progress_every: int = 0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.initial_T < 1:
            raise ValueError("initial_T must be >= 1")
        if self.initial_K < 1:
            raise ValueError("initial_K must be >= 1")


@dataclass
class ShuffleStats:
    transitions_attempted: int = 0
    valid_swaps: int = 0
    simplicity_rejections: int = 0
    isolation_rejections: int = 0
    disconnection_rollbacks: int = 0
    windows_tested: int = 0
    windows_succeeded: int = 0
    realized_theta: float = 0.0
    final_T: float = 0.0
    final_K: int = 0
    wall_time: float = 0.0
    frozen: bool = False

    @property
    def success_rate(self) -> float:
        return self.windows_succeeded / self.windows_tested if self.windows_tested else 0.0


def theta(T: float, p: float) -> float:
    """Expected committed swaps per connectivity test for a window of T swaps."""
    return T * (1.0 - p) ** T


def theta_max(p: float) -> tuple[float, float]:
    """Optimal window ``1/p`` and the speed-up ``1/(p e)`` it achieves."""
    if p <= 0:
        raise DegenerateP("p = 0: the speed-up is unbounded")
    if p > 1:
        raise ValueError("p must be a probability")
    return 1.0 / p, 1.0 / (p * E)


def update_window(h: Heuristic, T: float, window_connected: bool) -> float:
    if h.name == "gkantsidis":
        T = T + 1.0 if window_connected else T / 2.0
    elif h.name == "geometric":
        T = T * (1.0 + h.q_plus) if window_connected else T * (1.0 - h.q_minus)
    else:
        raise WrongHeuristic(f"{h.name} does not use a window update rule")
    return max(T, 1.0)


def _final_floor(m: int) -> float:
    return float(m) if m < 10 else m / 10.0


class Shuffler:
    """Resumable shuffle state: graph, window, isolation width, counters.

    ``advance(k)`` commits ``k`` more valid swaps, so snapshots can be taken
    at any spacing without disturbing the window dynamics.
    """

    def __init__(self, g: Graph, cfg: ShuffleConfig = ShuffleConfig(), rng=None):
        if not is_connected(g):
            raise BadInput("input graph must be connected")
        self.cfg = cfg
        self.graph = g.copy()
        self.rng = rng if rng is not None else np.random.default_rng(cfg.seed)
        h = cfg.heuristic
        m = self.graph.m
        if h.name == "final":
            self.t_floor = max(1.0, _final_floor(m))
            self.t_cap = max(float(m), 1.0)
            T0 = max(cfg.initial_T, self.t_floor)
        else:
            self.t_floor = 1.0
            # unbounded in practice; keeps ceil(T) inside int64 when p is 0
            self.t_cap = T_LIMIT
            T0 = cfg.initial_T
        self.state = np.array([T0, float(cfg.initial_K), 0.0])
        self.ctr = np.zeros(K.N_COUNTERS, np.int64)
        self.committed = 0
        self.frozen = m < 2
        self.wall_time = 0.0
        self.stall_limit = 2000 + 50 * m
        size = 1024
        self._log = (np.empty(size, np.int64), np.empty(size, np.int64), np.empty(size, np.bool_))

    def _grow_log(self, need: int) -> None:
        size = len(self._log[0])
        while size < need:
            size *= 2
        self._log = (np.empty(size, np.int64), np.empty(size, np.int64), np.empty(size, np.bool_))

    def _check_frozen(self) -> bool:
        """True when no swap at all keeps the graph simple and connected."""
        self.frozen = not K.has_valid_swap(self.graph.arrays, self.graph.work)
        return self.frozen

    def _run(self, budget: int) -> tuple[int, int]:
        g = self.graph
        h = self.cfg.heuristic
        if h.name == "naive":
            done = K.naive_run(g.arrays, g.work, self.rng, budget, self.ctr, self.stall_limit)
            return done, (K.DONE if done == budget else K.STALLED)
        rule = {"gkantsidis": K.RULE_GKANTSIDIS, "geometric": K.RULE_GEOMETRIC,
                "final": K.RULE_FINAL}[h.name]
        while True:
            done, code = K.windowed_run(
                g.arrays, g.work, self.rng, budget, self.state, rule, h.q_minus, h.q_plus,
                self.t_floor, self.t_cap, int(self.cfg.degree_stop), *self._log, self.ctr,
                self.stall_limit,
            )
            if code != K.NEED_LOG:
                return done, code
            self.committed += done
            budget -= done
            self._grow_log(min(budget, int(math.ceil(self.state[0]))))

    def advance(self, budget: int) -> int:
        """Commit up to ``budget`` valid swaps; returns how many were committed."""
        t0 = time.perf_counter()
        start = self.committed
        goal = start + budget
        every = self.cfg.progress_every or budget
        while self.committed < goal and not self.frozen:
            chunk = min(every, goal - self.committed)
            before = self.committed
            done, code = self._run(chunk)
            self.committed += done
            if code == K.STALLED and self.committed - before < chunk:
                if self._check_frozen():
                    break
            if self.cfg.progress is not None:
                self.cfg.progress(self.committed, goal)
        self.wall_time += time.perf_counter() - t0
        return self.committed - start

    def stats(self) -> ShuffleStats:
        c = self.ctr
        tests = int(c[K.CONN_TESTS])
        return ShuffleStats(
            transitions_attempted=int(c[K.ATTEMPTS]),
            valid_swaps=self.committed,
            simplicity_rejections=int(c[K.SIMPLICITY]),
            isolation_rejections=int(c[K.ISOLATION]),
            disconnection_rollbacks=int(c[K.DISCONNECTIONS]),
            windows_tested=tests,
            windows_succeeded=int(c[K.WINDOWS_OK]),
            realized_theta=self.committed / tests if tests else 0.0,
            final_T=float(self.state[0]),
            final_K=int(self.state[1]),
            wall_time=self.wall_time,
            frozen=self.frozen,
        )


def swap_budget(g: Graph, cfg: ShuffleConfig) -> int:
    return int(math.ceil(cfg.gamma * g.m))


def run_shuffle(g: Graph, cfg: ShuffleConfig = ShuffleConfig()) -> tuple[Graph, ShuffleStats]:
    """Shuffle a connected simple graph with the configured heuristic.

    Returns a new graph with the same degrees and the run's statistics.
    """
    s = Shuffler(g, cfg)
    s.advance(swap_budget(g, cfg))
    return s.graph, s.stats()


def run_shuffle_final(g: Graph, cfg: ShuffleConfig = ShuffleConfig()) -> tuple[Graph, ShuffleStats]:
    if cfg.heuristic.name != "final":
        cfg = replace(cfg, heuristic=FINAL)
    return run_shuffle(g, cfg)


def generate(degrees, cfg: ShuffleConfig = ShuffleConfig()) -> tuple[Graph, ShuffleStats]:
    """Realize, connect and shuffle: a random connected simple graph with these degrees."""
    rng = np.random.default_rng(cfg.seed)
    g = realize(degrees, rng)
    s = Shuffler(g, cfg, rng=rng)
    s.advance(swap_budget(g, cfg))
    return s.graph, s.stats()


def disconnection_counts(g: Graph, width: int | None, samples: int, rng,
                         degree_stop: int = 1, exact: bool = False) -> tuple[int, int]:
    """(applied swaps, disconnecting swaps) over ``samples`` applied swaps.

    ``width=None`` skips the isolation filter.  With ``exact`` every sample is
    checked by a full traversal instead of the two-sided search.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if g.m < 2:
        raise NoValidSwaps("graph has fewer than two edges")
    k = -1 if width is None else int(width)
    max_attempts = 1000 + 200 * samples
    return K.sample_disconnections(g.arrays, g.work, rng, k, int(degree_stop), samples,
                                   max_attempts, exact)


def estimate_p(g: Graph, width: int | None, samples: int, rng, degree_stop: int = 1,
               exact: bool = False) -> float:
    """Monte-Carlo disconnection probability of one random valid swap."""
    applied, split = disconnection_counts(g, width, samples, rng, degree_stop, exact)
    if applied == 0:
        raise NoValidSwaps("no swap passed the simplicity/isolation filters")
    return split / applied


@dataclass(frozen=True)
class ReferenceConfig:
    """Sampling policy for the optimal-window reference.

    Before each window disconnections are sampled until ``min_events`` are
    seen or ``max_samples`` swaps were tried.
    """

    min_events: int = 30
    chunk: int = 16
    max_samples: int = 0  # 0 means 20 * m


def _reference_window(g: Graph, rng, rc: ReferenceConfig) -> tuple[float, int, int]:
    cap = rc.max_samples or 20 * g.m
    applied = split = 0
    while split < rc.min_events and applied < cap:
        a, s = K.sample_disconnections(g.arrays, g.work, rng, -1, 0, rc.chunk,
                                       1000 + 200 * rc.chunk, False)
        if a == 0:
            break
        applied += a
        split += s
    if split == 0:
        return float(g.m), applied, split
    return float(best_window(split / applied)), applied, split


def best_window(p: float) -> int:
    """Integer window maximizing w (1-p)^w.

    The continuous optimum -1/ln(1-p) is close to 1/p, but at large p rounding
    it the wrong way costs a lot, so both neighbours are compared.
    """
    if p <= 0:
        raise DegenerateP("p = 0: any window is optimal")
    if p >= 1:
        return 1
    t = -1.0 / math.log1p(-p)
    lo = max(1, int(math.floor(t)))
    hi = lo + 1
    # at p = 1/(k+1) the two are exactly tied; prefer the larger, i.e. 1/p
    return lo if lo * (1 - p) ** lo > hi * (1 - p) ** hi * (1 + 1e-12) else hi


def optimal_reference_shuffle(g: Graph, cfg: ShuffleConfig = ShuffleConfig(),
                              rc: ReferenceConfig = ReferenceConfig()
                              ) -> tuple[Graph, ShuffleStats]:
    """Best window for p-hat before every window, p-hat measured on the current graph.

    Expensive; meant as the best-window baseline for comparisons.  When no
    disconnection is observed the window falls back to m.
    """
    if not is_connected(g):
        raise BadInput("input graph must be connected")
    t0 = time.perf_counter()
    h = g.copy()
    rng = np.random.default_rng(cfg.seed)
    target = swap_budget(h, cfg)
    ctr = np.zeros(K.N_COUNTERS, np.int64)
    log = (np.empty(1024, np.int64), np.empty(1024, np.int64), np.empty(1024, np.bool_))
    committed = 0
    T = 1.0
    idle = 0
    frozen = h.m < 2
    while committed < target and not frozen:
        T, _, _ = _reference_window(h, rng, rc)
        w = min(int(math.ceil(T)), target - committed)
        if w > len(log[0]):
            size = 1 << (w - 1).bit_length()
            log = (np.empty(size, np.int64), np.empty(size, np.int64), np.empty(size, np.bool_))
        before = ctr[K.ATTEMPTS]
        done = K.plain_window(h.arrays, rng, w, *log, ctr, 2000 + 50 * h.m)
        idle += int(ctr[K.ATTEMPTS] - before)
        if done == 0:
            frozen = not K.has_valid_swap(h.arrays, h.work)
            continue
        ctr[K.CONN_TESTS] += 1
        if K.is_connected(h.arrays, h.work):
            committed += done
            ctr[K.WINDOWS_OK] += 1
            idle = 0
        else:
            K.rollback(h.arrays, *log, done)
            ctr[K.DISCONNECTIONS] += 1
            if idle > 2000 + 50 * h.m:
                frozen = not K.has_valid_swap(h.arrays, h.work)
                idle = 0
    tests = int(ctr[K.CONN_TESTS])
    stats = ShuffleStats(
        transitions_attempted=int(ctr[K.ATTEMPTS]),
        valid_swaps=committed,
        simplicity_rejections=int(ctr[K.SIMPLICITY]),
        disconnection_rollbacks=int(ctr[K.DISCONNECTIONS]),
        windows_tested=tests,
        windows_succeeded=int(ctr[K.WINDOWS_OK]),
        realized_theta=committed / tests if tests else 0.0,
        final_T=T,
        final_K=0,
        wall_time=time.perf_counter() - t0,
        frozen=frozen,
    )
    return h, stats


@dataclass
class WindowTrace:
    """Window sizes and outcomes of a synthetic run."""

    T: np.ndarray
    success: np.ndarray

    def tail(self, fraction: float = 0.9) -> "WindowTrace":
        """Drop the leading transient, keeping the last ``fraction`` of windows."""
        k = int(len(self.T) * (1 - fraction))
        return WindowTrace(self.T[k:], self.success[k:])

    @property
    def mean_T(self) -> float:
        return float(np.mean(self.T))

    @property
    def success_rate(self) -> float:
        return float(np.mean(self.success))

    @property
    def theta(self) -> float:
        return float(np.mean(np.ceil(self.T) * self.success))


def simulate_heuristic(h: Heuristic, p: float, steps: int, rng, T0: float = 1.0) -> WindowTrace:
    """Window dynamics without a graph: each window of ceil(T) swaps survives w.p. (1-p)^ceil(T)."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if h.name == "gkantsidis":
        rule = 0
    elif h.name == "geometric":
        rule = 1
    else:
        raise WrongHeuristic(f"{h.name} has no synthetic window model")
    T = np.empty(steps)
    ok = np.empty(steps, np.bool_)
    K.simulate_windows(rule, p, steps, float(T0), h.q_minus, h.q_plus, rng, T, ok)
    return WindowTrace(T, ok)
