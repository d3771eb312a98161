import math
from dataclasses import asdict

import numpy as np
import pytest

from conftest import assert_valid, py_connected
from swapchain import _kernels as K
from swapchain.degree_model import power_law, sample_sequence
from swapchain.errors import BadInput, DegenerateP, NoValidSwaps, WrongHeuristic
from swapchain.graph import from_edge_list, is_connected
from swapchain.realization import havel_hakimi, realize
from swapchain.shuffle import (
    FINAL, GEOMETRIC, GKANTSIDIS, HEURISTICS, NAIVE, Heuristic, ReferenceConfig, ShuffleConfig,
    Shuffler, best_window, disconnection_counts, estimate_p, generate, geometric,
    optimal_reference_shuffle, run_shuffle, run_shuffle_final, simulate_heuristic, theta,
    theta_max, update_window,
)


def cycle(n):
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def clique(n):
    return havel_hakimi([n - 1] * n)


def heavy_graph(n=400, alpha=2.5, z=3.0, seed=0):
    rng = np.random.default_rng(seed)
    return realize(sample_sequence(power_law(alpha, z, n), rng, connectable=True), rng)


# formulas

def test_theta_examples():
    assert theta(10, 0) == 10
    assert theta(10, 0.1) == pytest.approx(3.4868, abs=1e-4)
    assert theta(2, 1) == 0


def test_theta_max_examples():
    assert theta_max(0.1) == pytest.approx((10, 3.6788), abs=1e-4)
    assert theta_max(0.5) == pytest.approx((2, 0.7358), abs=1e-4)
    assert theta_max(1 / math.e) == pytest.approx((math.e, 1.0))
    with pytest.raises(DegenerateP):
        theta_max(0)


def test_theta_max_is_the_maximum():
    for p in (0.3, 0.05, 0.001):
        T_opt, best = theta_max(p)
        grid = np.linspace(1, 10 / p, 20001)
        # continuous optimum of T (1-p)^T sits at -1/ln(1-p), close to 1/p
        assert best == pytest.approx(np.max(grid * np.exp(-p * grid)), rel=1e-3)


def test_best_window_brute_force():
    for p in (0.9, 0.5, 1 / 3, 0.33, 0.1, 0.07, 0.01, 0.0013):
        ws = np.arange(1, int(20 / p) + 2)
        vals = ws * (1 - p) ** ws
        w = best_window(p)
        assert vals[w - 1] >= vals.max() * (1 - 1e-12)
    assert best_window(0.1) == 10
    assert best_window(1.0) == 1
    with pytest.raises(DegenerateP):
        best_window(0.0)


def test_update_window_examples():
    assert update_window(GKANTSIDIS, 8, False) == 4
    assert update_window(GKANTSIDIS, 8, True) == 9
    h = geometric(0.1, 0.1718)
    assert update_window(h, 100, True) == pytest.approx(117.18)
    assert update_window(h, 100, False) == pytest.approx(90)
    assert update_window(GKANTSIDIS, 1, False) == 1
    for h in (NAIVE, FINAL):
        with pytest.raises(WrongHeuristic):
            update_window(h, 4, True)


def test_heuristic_validation():
    assert GEOMETRIC.q_plus / GEOMETRIC.q_minus == pytest.approx(math.e - 1)
    for bad in (dict(name="fast"), dict(name="geometric", q_minus=1.0),
                dict(name="geometric", q_plus=0.0)):
        with pytest.raises(ValueError):
            Heuristic(**bad)
    with pytest.raises(ValueError):
        ShuffleConfig(initial_T=0.5)
    with pytest.raises(ValueError):
        ShuffleConfig(initial_K=0)


# full runs

@pytest.mark.parametrize("name", list(HEURISTICS))
def test_outputs_valid(name):
    rng = np.random.default_rng(11)
    for alpha, z, n in [(2.1, 2.05, 300), (2.5, 3.0, 500), (3.0, 6.0, 200)]:
        d = sample_sequence(power_law(alpha, z, n), rng, connectable=True)
        g = realize(d, rng)
        out, st = run_shuffle(g, ShuffleConfig(heuristic=HEURISTICS[name], seed=int(rng.integers(1 << 32))))
        out.check()
        assert_valid(out, d)
        assert st.valid_swaps == math.ceil(10 * g.m)
        assert st.windows_succeeded <= st.windows_tested
        assert st.realized_theta >= 0
        assert out != g


def test_zero_budget_returns_input():
    g = from_edge_list(4, [(0, 1), (1, 2), (2, 3)])
    out, st = run_shuffle(g, ShuffleConfig(gamma=0))
    assert out == g and st.valid_swaps == 0


def test_six_cycle_stays_a_cycle():
    for h in HEURISTICS.values():
        out, _ = run_shuffle(cycle(6), ShuffleConfig(heuristic=h, seed=2))
        assert_valid(out, [2] * 6)


def test_rejects_disconnected_input():
    with pytest.raises(BadInput):
        run_shuffle(from_edge_list(4, [(0, 1), (2, 3)]))


def test_frozen_graphs_returned_unchanged():
    star = from_edge_list(6, [(0, i) for i in range(1, 6)])
    for h in HEURISTICS.values():
        out, st = run_shuffle(star, ShuffleConfig(heuristic=h))
        assert out == star and st.frozen and st.valid_swaps == 0
    one = from_edge_list(2, [(0, 1)])
    out, st = run_shuffle(one)
    assert out == one and st.frozen


@pytest.mark.parametrize("name", list(HEURISTICS))
def test_seed_reproducible(name):
    g = heavy_graph(300)
    cfg = ShuffleConfig(heuristic=HEURISTICS[name], seed=99)
    a, sa = run_shuffle(g, cfg)
    b, sb = run_shuffle(g, cfg)
    assert a.same_state(b)
    da, db = asdict(sa), asdict(sb)
    da.pop("wall_time"), db.pop("wall_time")
    assert da == db
    c, _ = run_shuffle(g, ShuffleConfig(heuristic=HEURISTICS[name], seed=100))
    assert c != a


def test_generate_pipeline():
    d = [3, 3, 2, 2, 2, 1, 1]
    g, st = generate(d, ShuffleConfig(seed=4))
    assert_valid(g, d)
    g2, _ = generate(d, ShuffleConfig(seed=4))
    assert g2 == g


def test_run_shuffle_final_forces_final():
    g = heavy_graph(200)
    _, st = run_shuffle_final(g, ShuffleConfig(heuristic=GKANTSIDIS, seed=1))
    assert st.final_K >= 1 and st.final_T >= g.m / 10


def test_final_window_floor_and_cap():
    g = heavy_graph(500)
    sh = Shuffler(g, ShuffleConfig(heuristic=FINAL, seed=3))
    sh.advance(5 * g.m)
    assert g.m / 10 <= sh.state[0] <= g.m
    small = cycle(7)
    sh = Shuffler(small, ShuffleConfig(heuristic=FINAL))
    assert sh.t_floor == sh.t_cap == 7


def test_final_wide_isolation_never_rolls_back():
    for seed in range(3):
        g = heavy_graph(300, alpha=2.1, z=2.05, seed=seed)
        cfg = ShuffleConfig(heuristic=FINAL, initial_K=4 * g.n, seed=seed)
        _, st = run_shuffle(g, cfg)
        assert st.disconnection_rollbacks == 0
        assert st.isolation_rejections > 0


def test_naive_never_commits_disconnected():
    g = heavy_graph(150, alpha=2.1, z=2.05)
    sh = Shuffler(g, ShuffleConfig(heuristic=NAIVE, seed=5))
    for _ in range(500):
        assert sh.advance(1) == 1
        assert py_connected(sh.graph.n, sh.graph.edges())


def test_window_rollback_exact():
    g = heavy_graph(300, alpha=2.1, z=2.05)
    rng = np.random.default_rng(8)
    ctr = np.zeros(K.N_COUNTERS, np.int64)
    log = (np.empty(400, np.int64), np.empty(400, np.int64), np.empty(400, np.bool_))
    failed = 0
    for _ in range(40):
        before = g.copy()
        done = K.plain_window(g.arrays, rng, 200, *log, ctr, 10**6)
        if not is_connected(g):
            failed += 1
        K.rollback(g.arrays, *log, done)
        assert g.same_state(before)
    assert failed > 0


def test_resumable_advance_counts():
    g = heavy_graph(300)
    sh = Shuffler(g, ShuffleConfig(heuristic=GEOMETRIC, seed=1))
    assert sh.advance(100) + sh.advance(250) == 350
    assert sh.stats().valid_swaps == 350
    calls = []
    cfg = ShuffleConfig(heuristic=FINAL, progress=lambda d, t: calls.append((d, t)), progress_every=100)
    sh = Shuffler(g, cfg)
    sh.advance(450)
    assert calls[-1] == (450, 450) and len(calls) == 5


def test_geometric_with_zero_p_terminates():
    # every valid swap on the 4-path keeps it connected, so T grows without bound
    g = from_edge_list(4, [(0, 2), (0, 1), (1, 3)])
    sh = Shuffler(g, ShuffleConfig(heuristic=GEOMETRIC))
    assert sh.advance(20_000) == 20_000
    assert math.isfinite(sh.state[0])


# disconnection probability

def exhaustive_p(g, width=None):
    """Share of simple candidates that disconnect (after the isolation filter)."""
    h = g.copy()
    a = h.arrays
    applied = split = 0
    for i in range(h.m):
        for j in range(h.m):
            if i == j:
                continue
            for f in (False, True):
                if not K.swap_is_simple(a, i, j, f):
                    continue
                K.apply_swap(a, i, j, f)
                ends = (int(a.rec[i, 0]), int(a.rec[j, 1]))
                caught = width is not None and any(
                    K.isolation(a, h.work, v, width, 0) >= 0 for v in ends)
                if not caught:
                    applied += 1
                    split += not py_connected(h.n, h.edges())
                K.undo_swap(a, i, j, f)
    return split / applied


def test_estimate_p_matches_exhaustive():
    rng = np.random.default_rng(2)
    g = cycle(6)
    exact = exhaustive_p(g)
    N = 40_000
    for flag in (False, True):
        est = estimate_p(g, None, N, rng, exact=flag)
        assert abs(est - exact) < 5 * math.sqrt(exact * (1 - exact) / N)
    h = heavy_graph(40, alpha=2.1, z=2.05)
    for width in (None, 1, 2):
        exact = exhaustive_p(h, width)
        est = estimate_p(h, width, N, rng)
        assert abs(est - exact) < 5 * math.sqrt(max(exact * (1 - exact), 1e-4) / N)


def test_estimate_p_zero_cases():
    rng = np.random.default_rng(3)
    # K6 has no simple swap at all; K6 minus a perfect matching is 4-regular,
    # so every component needs 5 vertices and no swap can split it
    with pytest.raises(NoValidSwaps):
        estimate_p(clique(6), None, 100, rng)
    dense = from_edge_list(6, [e for e in clique(6).edges() if e not in {(0, 1), (2, 3), (4, 5)}])
    assert estimate_p(dense, None, 2000, rng) == 0
    g = heavy_graph(200, alpha=2.1, z=2.05)
    assert estimate_p(g, g.n, 2000, rng) == 0
    with pytest.raises(NoValidSwaps):
        estimate_p(from_edge_list(2, [(0, 1)]), None, 10, rng)
    with pytest.raises(NoValidSwaps):
        estimate_p(from_edge_list(6, [(0, i) for i in range(1, 6)]), None, 10, rng)


def test_p_decreases_with_width():
    g = heavy_graph(2000, alpha=2.1, z=2.05)
    rng = np.random.default_rng(4)
    prev = None
    for width in (None, 1, 2, 4, 8):
        a, s = disconnection_counts(g, width, 20_000, rng)
        p, se = s / a, math.sqrt(s * (a - s) / a) / a
        if prev is not None:
            assert p <= prev[0] + 3 * math.hypot(se, prev[1])
        prev = (p, se)


# optimal-window reference

def test_reference_on_clique_uses_m():
    g = clique(6)
    _, st = optimal_reference_shuffle(g, ShuffleConfig(gamma=3))
    assert st.final_T == g.m and st.disconnection_rollbacks == 0


def test_reference_success_rate():
    g = heavy_graph(3000, alpha=2.5, z=2.1, seed=5)
    out, st = optimal_reference_shuffle(g, ShuffleConfig(gamma=10, seed=5), ReferenceConfig())
    assert_valid(out, g.degree)
    assert 0.30 <= st.success_rate <= 0.44


# graph-free window model

def test_gkantsidis_window_size():
    rng = np.random.default_rng(6)
    for p in (1e-2, 1e-3, 2e-4):
        tr = simulate_heuristic(GKANTSIDIS, p, 10**6, rng).tail()
        assert tr.mean_T == pytest.approx(math.sqrt(2 / p), rel=0.2)


def test_geometric_success_rate_and_window():
    rng = np.random.default_rng(7)
    tr = simulate_heuristic(geometric(0.02), 0.01, 10**6, rng).tail()
    assert tr.success_rate == pytest.approx(1 / math.e, abs=0.03)
    assert tr.mean_T == pytest.approx(100, rel=0.15)


def test_gkantsidis_versus_optimum():
    rng = np.random.default_rng(8)
    ratios = []
    for p in (0.1, 0.01, 0.001):
        tr = simulate_heuristic(GKANTSIDIS, p, 10**6, rng).tail()
        ratios.append(tr.theta / math.sqrt(2 * math.e * theta_max(p)[1]))
    assert abs(ratios[-1] - 1) <= 0.25
    assert abs(ratios[-1] - 1) <= abs(ratios[0] - 1)


def test_simulate_rejects_bad_input():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        simulate_heuristic(GKANTSIDIS, 0.0, 10, rng)
    with pytest.raises(WrongHeuristic):
        simulate_heuristic(FINAL, 0.1, 10, rng)
