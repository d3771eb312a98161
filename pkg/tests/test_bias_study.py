from collections import Counter

import numpy as np
import pytest

from swapchain.bias_study import (
    CSV_COLUMNS, MultiGraph, bias_grid, bias_report, format_csv, molloy_reed, report_row,
    simplify, single_report,
)
from swapchain.degree_model import power_law, sample_sequence
from swapchain.errors import OddSum
from swapchain.graph import from_edge_list, is_connected


def test_single_vertex_loop(rng):
    g = molloy_reed([2], rng)
    assert g.edges.tolist() == [[0, 0]]
    assert g.loops == 1 and not g.is_simple()
    s = simplify(g)
    assert (s.n, s.m) == (1, 0)


def test_single_edge(rng):
    g = molloy_reed([1, 1], rng)
    assert sorted(g.edges[0].tolist()) == [0, 1]
    assert g.is_simple()


def test_odd_sum(rng):
    with pytest.raises(OddSum):
        molloy_reed([1, 2], rng)


def test_two_two_outcomes():
    # stubs a a b b: of the 3 matchings, 2 pair a with b (double edge), 1 gives two loops
    rng = np.random.default_rng(1)
    N = 100_000
    kinds = Counter()
    for _ in range(N):
        g = molloy_reed([2, 2], rng)
        kinds["loops" if g.loops else "double"] += 1
    assert kinds["double"] / N == pytest.approx(2 / 3, abs=0.01)
    assert kinds["loops"] / N == pytest.approx(1 / 3, abs=0.01)


def test_degrees_preserved(rng):
    d = sample_sequence(power_law(2.1, 3.0, 2000), rng)
    g = molloy_reed(d, rng)
    assert np.array_equal(g.degree, d)
    assert g.degree.sum() == 2 * g.m
    s = simplify(g)
    assert s.n == g.n and s.m <= g.m
    assert np.all(s.degree <= g.degree)


def test_simplify_examples():
    simple = MultiGraph(4, [(0, 1), (1, 2), (2, 3)])
    assert simplify(simple) == from_edge_list(4, [(0, 1), (1, 2), (2, 3)])
    double = MultiGraph(2, [(0, 1), (1, 0)])
    assert simplify(double).edges() == [(0, 1)]


def test_identity_on_simple_connected_draws():
    rng = np.random.default_rng(2)
    seen = 0
    for _ in range(200):
        g = molloy_reed([3, 3, 3, 3], rng)
        r = single_report(g)
        if g.is_simple() and is_connected(simplify(g)):
            seen += 1
            for part in (r.S, r.C, r.CS):
                assert (part.n_norm, part.m_norm, part.z_norm) == (1.0, 1.0, 1.0)
    assert seen > 0


def test_one_one_one_one_half():
    # every loop-free matching of [1,1,1,1] is two disjoint edges
    r = bias_report([1, 1, 1, 1], 50, np.random.default_rng(3))
    assert r.C.n_norm == 0.5 and r.CS.n_norm == 0.5


def test_report_invariants(rng):
    d = sample_sequence(power_law(2.1, 2.0, 3000), rng)
    for _ in range(5):
        g = molloy_reed(d, rng)
        r = single_report(g)
        assert r.S.n == r.N
        assert r.C.n == r.CS.n
        assert r.S.m <= r.M
        assert r.CS.m <= min(r.S.m, r.C.m)
        for part in (r.S, r.C, r.CS):
            assert min(part.n_norm, part.m_norm, part.z_norm) >= 0


def test_giant_grows_with_z():
    rows = bias_grid(2.1, 10**4, [1.5, 2.0, 3.0, 4.0], 3, np.random.default_rng(4))
    nc = [row[CSV_COLUMNS.index("C_n_norm")] for row in rows]
    assert all(a < b for a, b in zip(nc, nc[1:]))
    assert nc[0] < 0.9


def test_steeper_tail_less_bias():
    lo = bias_grid(2.1, 10**4, [3.0], 3, np.random.default_rng(5))[0]
    hi = bias_grid(2.5, 10**4, [3.0], 3, np.random.default_rng(5))[0]
    for col in ("S_m_norm", "C_n_norm", "CS_m_norm"):
        i = CSV_COLUMNS.index(col)
        assert abs(1 - hi[i]) < abs(1 - lo[i])


def test_csv_layout():
    r = bias_report([1, 1, 1, 1], 2, np.random.default_rng(0))
    text = format_csv([report_row(2.5, 4, 1.0, r)], "alpha=2.5")
    lines = text.splitlines()
    assert lines[0] == "# alpha=2.5"
    assert lines[1].split(",") == CSV_COLUMNS
    assert lines[1].startswith("alpha,n,z_target,trials,N,M,Z,S_n,S_m,S_z,S_n_norm")
    assert len(lines[2].split(",")) == len(CSV_COLUMNS)
