"""Compiled inner loops.

Everything here works on plain arrays bundled in two namedtuples:

``GraphArrays``
    ``rec``            (m, 4) int32 edge records ``[u, v, su, sv]``: the flat edge
                       index plus the CSR positions of the edge in the rows of u and v
    ``off, adj``       CSR adjacency; row sizes never change because swaps preserve
                       degrees.  ``adj`` is (2m, 3) int32, one row per CSR position:
                       ``[neighbor, edge slot, degree of neighbor]``.  Keeping the
                       neighbor degree inline lets the degree-stop search reject a
                       row without touching ``deg`` at random
    ``hkeys``          open addressing set of ``min*n+max`` keys (linear probing,
                       backward-shift deletion so long runs leave no tombstones)

Arrays are int32 where the range allows; at a million edges the hot loop is
bound by cache misses, so the footprint matters more than anything else.

``Work``
    ``stamp``          visit marks; ``stamp[n]`` holds the current generation
    ``queue, queue2``  BFS buffers of length n

Swap convention: on slots ``i=(p,q)`` and ``j=(r,s)`` the rewiring produces
``(p,s)`` and ``(r,q)``; with ``flip`` the stored orientation of ``j`` is
reversed first, giving ``(p,r)`` and ``(s,q)``.
"""

from collections import namedtuple

import numpy as np
from numba import njit

GraphArrays = namedtuple(
    "GraphArrays", ["n", "m", "deg", "off", "adj", "rec", "hkeys", "mask"]
)
Work = namedtuple("Work", ["stamp", "queue", "queue2"])

# counter slots shared by every engine
ATTEMPTS = 0
SIMPLICITY = 1
ISOLATION = 2
DISCONNECTIONS = 3
CONN_TESTS = 4
WINDOWS_OK = 5
N_COUNTERS = 6

# window update rules understood by ``windowed_run``
RULE_GKANTSIDIS = 0
RULE_GEOMETRIC = 1
RULE_FINAL = 2
# ``windowed_run`` exit codes
DONE = 0
NEED_LOG = 1
STALLED = 2

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SHIFT = np.uint64(28)


@njit(inline="always", cache=True)
def _home(key, mask):
    h = np.uint64(key) * _GOLDEN
    return np.int64(h >> _SHIFT) & mask


@njit(inline="always", cache=True)
def edge_key(u, v, n):
    if u < v:
        return u * n + v
    return v * n + u


@njit(cache=True)
def hash_find(keys, mask, key):
    i = _home(key, mask)
    while True:
        k = keys[i]
        if k == key:
            return i
        if k == -1:
            return -1
        i = (i + 1) & mask


@njit(cache=True)
def hash_insert(keys, mask, key):
    i = _home(key, mask)
    while keys[i] != -1:
        i = (i + 1) & mask
    keys[i] = key


@njit(cache=True)
def hash_delete(keys, mask, key):
    i = hash_find(keys, mask, key)
    if i < 0:
        return
    j = i
    while True:
        j = (j + 1) & mask
        k = keys[j]
        if k == -1:
            break
        h = _home(k, mask)
        # entry at j may move into the hole at i only if its home is not in (i, j]
        if i <= j:
            if i < h <= j:
                continue
        elif h > i or h <= j:
            continue
        keys[i] = k
        i = j
    keys[i] = -1


@njit(cache=True)
def build_table(g):
    rec = g.rec
    for i in range(g.m):
        hash_insert(g.hkeys, g.mask, edge_key(np.int64(rec[i, 0]), np.int64(rec[i, 1]), g.n))


@njit(cache=True)
def has_edge(g, u, v):
    return hash_find(g.hkeys, g.mask, edge_key(np.int64(u), np.int64(v), g.n)) >= 0


@njit(cache=True)
def edge_slot(g, u, v):
    """Edge slot of {u, v} by scanning the shorter CSR row; -1 if absent."""
    if g.deg[v] < g.deg[u]:
        u, v = v, u
    adj = g.adj
    for k in range(g.off[u], g.off[u + 1]):
        if adj[k, 0] == v:
            return adj[k, 1]
    return -1


@njit(inline="always", cache=True)
def _targets(g, i, j, flip):
    rec = g.rec
    p = np.int64(rec[i, 0])
    q = np.int64(rec[i, 1])
    if flip:
        r = np.int64(rec[j, 1])
        s = np.int64(rec[j, 0])
    else:
        r = np.int64(rec[j, 0])
        s = np.int64(rec[j, 1])
    return p, q, r, s


@njit(cache=True)
def swap_is_simple(g, i, j, flip):
    p, q, r, s = _targets(g, i, j, flip)
    if p == s or r == q:
        return False
    if hash_find(g.hkeys, g.mask, edge_key(p, s, g.n)) >= 0:
        return False
    if hash_find(g.hkeys, g.mask, edge_key(r, q, g.n)) >= 0:
        return False
    return True


@njit(cache=True)
def _flip_slot(g, j):
    rec = g.rec
    t = rec[j, 0]
    rec[j, 0] = rec[j, 1]
    rec[j, 1] = t
    t = rec[j, 2]
    rec[j, 2] = rec[j, 3]
    rec[j, 3] = t


@njit(cache=True)
def _rewire(g, i, j):
    rec = g.rec
    n = g.n
    p = np.int64(rec[i, 0])
    q = np.int64(rec[i, 1])
    sp = rec[i, 2]
    sq = rec[i, 3]
    r = np.int64(rec[j, 0])
    s = np.int64(rec[j, 1])
    sr = rec[j, 2]
    ss = rec[j, 3]
    hash_delete(g.hkeys, g.mask, edge_key(p, q, n))
    hash_delete(g.hkeys, g.mask, edge_key(r, s, n))
    rec[i, 1] = s
    rec[i, 3] = ss
    rec[j, 1] = q
    rec[j, 3] = sq
    # the four CSR positions trade (neighbor, degree) pairs: sp<->sr, ss<->sq
    adj = g.adj
    dq = adj[sp, 2]
    dp = adj[sq, 2]
    adj[sp, 0] = s
    adj[sp, 2] = adj[sr, 2]
    adj[sr, 0] = q
    adj[sr, 2] = dq
    adj[sq, 0] = r
    adj[sq, 1] = j
    adj[sq, 2] = adj[ss, 2]
    adj[ss, 0] = p
    adj[ss, 1] = i
    adj[ss, 2] = dp
    hash_insert(g.hkeys, g.mask, edge_key(p, s, n))
    hash_insert(g.hkeys, g.mask, edge_key(r, q, n))


@njit(cache=True)
def apply_swap(g, i, j, flip):
    if flip:
        _flip_slot(g, j)
    _rewire(g, i, j)


@njit(cache=True)
def undo_swap(g, i, j, flip):
    # the plain rewiring is an involution on (i, j)
    _rewire(g, i, j)
    if flip:
        _flip_slot(g, j)


@njit(cache=True)
def rollback(g, log_i, log_j, log_f, count):
    for t in range(count - 1, -1, -1):
        undo_swap(g, log_i[t], log_j[t], log_f[t])


@njit(inline="always", cache=True)
def _next_gen(work):
    n = work.stamp.shape[0] - 1
    work.stamp[n] += 1
    return work.stamp[n]


@njit(cache=True)
def reach_count(g, work, src):
    """Number of vertices reachable from ``src`` (iterative BFS)."""
    gen = _next_gen(work)
    stamp = work.stamp
    queue = work.queue
    stamp[src] = gen
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(g.off[x], g.off[x + 1]):
            w = g.adj[k, 0]
            if stamp[w] != gen:
                stamp[w] = gen
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True)
def is_connected(g, work):
    if g.n <= 1:
        return True
    return reach_count(g, work, 0) == g.n


@njit(cache=True)
def component_labels(g, work):
    """Component id per vertex, ids assigned in order of smallest vertex."""
    labels = np.full(g.n, -1, np.int64)
    queue = work.queue
    c = 0
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        labels[s] = c
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            x = queue[head]
            head += 1
            for k in range(g.off[x], g.off[x + 1]):
                w = g.adj[k, 0]
                if labels[w] < 0:
                    labels[w] = c
                    queue[tail] = w
                    tail += 1
        c += 1
    return labels


@njit(cache=True)
def spanning_forest(g, work):
    """Component labels plus a flag per edge slot telling whether it is a BFS tree edge."""
    labels = np.full(g.n, -1, np.int64)
    tree = np.zeros(g.m, np.bool_)
    queue = work.queue
    c = 0
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        labels[s] = c
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            x = queue[head]
            head += 1
            for k in range(g.off[x], g.off[x + 1]):
                w = g.adj[k, 0]
                if labels[w] < 0:
                    labels[w] = c
                    tree[g.adj[k, 1]] = True
                    queue[tail] = w
                    tail += 1
        c += 1
    return labels, tree


@njit(cache=True)
def isolation(g, work, v, K, mode):
    """Bounded search from ``v``.

    Returns the component size when it is at most ``min(K, n-1)``, else -1.
    ``mode`` 0: plain BFS; 1: stop on any vertex of degree > K;
    2: as 1, exploring the highest-degree frontier vertex first.
    """
    limit = K
    if limit > g.n - 1:
        limit = g.n - 1
    if limit < 1:
        # every component holds at least one vertex
        return -1
    lo = g.off[v]
    hi = g.off[v + 1]
    # degree from the row bounds: same cache line as the row start we need anyway
    if mode >= 1 and hi - lo > limit:
        return -1
    gen = _next_gen(work)
    stamp = work.stamp
    queue = work.queue
    adj = g.adj
    stamp[v] = gen
    queue[0] = v
    tail = 1
    if mode == 2:
        # best-first: queue[0:tail] holds all seen vertices, queue2 their
        # degree, or -1 once expanded
        dq = work.queue2
        dq[0] = hi - lo
        expanded = 0
        while expanded < tail:
            best = 0
            bd = -1
            for t in range(tail):
                if dq[t] > bd:
                    bd = dq[t]
                    best = t
            dq[best] = -1
            expanded += 1
            x = queue[best]
            for k in range(g.off[x], g.off[x + 1]):
                if adj[k, 2] > limit:
                    return -1
                w = adj[k, 0]
                if stamp[w] != gen:
                    if tail == limit:
                        return -1
                    stamp[w] = gen
                    queue[tail] = w
                    dq[tail] = adj[k, 2]
                    tail += 1
        return tail
    head = 0
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(g.off[x], g.off[x + 1]):
            if mode >= 1 and adj[k, 2] > limit:
                return -1
            w = adj[k, 0]
            if stamp[w] != gen:
                if tail == limit:
                    return -1
                stamp[w] = gen
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True)
def separated(g, work, a, b):
    """True iff ``a`` and ``b`` lie in different components.

    Two searches advance in lockstep one vertex at a time; the first one to
    run dry proves the split, a meeting proves connection.  Cost is bounded
    by twice the smaller side when split.
    """
    if a == b:
        return False
    ga = _next_gen(work)
    gb = _next_gen(work)
    stamp = work.stamp
    qa = work.queue
    qb = work.queue2
    stamp[a] = ga
    stamp[b] = gb
    qa[0] = a
    qb[0] = b
    ha = 0
    ta = 1
    hb = 0
    tb = 1
    while True:
        if ha == ta:
            return True
        x = qa[ha]
        ha += 1
        for k in range(g.off[x], g.off[x + 1]):
            w = g.adj[k, 0]
            s = stamp[w]
            if s == gb:
                return False
            if s != ga:
                stamp[w] = ga
                qa[ta] = w
                ta += 1
        if hb == tb:
            return True
        x = qb[hb]
        hb += 1
        for k in range(g.off[x], g.off[x + 1]):
            w = g.adj[k, 0]
            s = stamp[w]
            if s == ga:
                return False
            if s != gb:
                stamp[w] = gb
                qb[tb] = w
                tb += 1


@njit(inline="always", cache=True)
def _draw(g, rng):
    m = g.m
    i = np.int64(rng.random() * m)
    j = np.int64(rng.random() * (m - 1))
    if j >= i:
        j += 1
    f = rng.random() < 0.5
    return i, j, f


@njit(cache=True)
def draw_swap(g, rng):
    return _draw(g, rng)


_NEVER = np.int64(0x7FFFFFFFFFFFFFFF)


@njit(inline="always", cache=True)
def _touch(g, i, j, f):
    """Load every cache line the swap on (i, j) will need, all at once.

    At a million edges each of these is a miss; issued together they overlap
    instead of queueing behind the branches of the simplicity test.  The XOR
    of the loaded words is returned so the loads are not optimised away.
    """
    p, q, r, s = _targets(g, i, j, f)
    n = g.n
    mask = g.mask
    hk = g.hkeys
    adj = g.adj
    rec = g.rec
    acc = hk[_home(edge_key(p, s, n), mask)] ^ hk[_home(edge_key(r, q, n), mask)]
    acc ^= hk[_home(edge_key(p, q, n), mask)] ^ hk[_home(edge_key(r, s, n), mask)]
    acc ^= adj[rec[i, 2], 0] ^ adj[rec[i, 3], 0] ^ adj[rec[j, 2], 0] ^ adj[rec[j, 3], 0]
    acc ^= g.off[p] ^ g.off[q]
    # every word is -1 or in [0, 2**62), so the XOR never equals _NEVER
    return acc


@njit(cache=True)
def plain_window(g, rng, T, log_i, log_j, log_f, ctr, max_attempts):
    """Apply up to ``T`` simplicity-valid swaps, logging each; no connectivity check."""
    done = 0
    tries = 0
    while done < T and tries < max_attempts:
        i, j, f = _draw(g, rng)
        tries += 1
        if _touch(g, i, j, f) == _NEVER or not swap_is_simple(g, i, j, f):
            ctr[SIMPLICITY] += 1
            continue
        apply_swap(g, i, j, f)
        log_i[done] = i
        log_j[done] = j
        log_f[done] = f
        done += 1
    ctr[ATTEMPTS] += tries
    return done


@njit(cache=True)
def isolated_window(g, work, rng, T, K, mode, log_i, log_j, log_f, ctr, max_attempts):
    """As ``plain_window`` but every applied swap must pass two isolation tests."""
    done = 0
    tries = 0
    while done < T and tries < max_attempts:
        i, j, f = _draw(g, rng)
        tries += 1
        if _touch(g, i, j, f) == _NEVER or not swap_is_simple(g, i, j, f):
            ctr[SIMPLICITY] += 1
            continue
        apply_swap(g, i, j, f)
        # rec[i, 0] and rec[j, 1] are the two ends of the removed edge formerly in slot i
        if isolation(g, work, g.rec[i, 0], K, mode) >= 0 or isolation(g, work, g.rec[j, 1], K, mode) >= 0:
            undo_swap(g, i, j, f)
            ctr[ISOLATION] += 1
            continue
        log_i[done] = i
        log_j[done] = j
        log_f[done] = f
        done += 1
    ctr[ATTEMPTS] += tries
    return done


@njit(nogil=True, cache=True)
def windowed_run(g, work, rng, target, state, rule, q_minus, q_plus, t_floor, t_cap,
                 mode, log_i, log_j, log_f, ctr, stall_limit):
    """Commit up to ``target`` swaps in windows separated by connectivity tests.

    ``state`` holds [T, K, consecutive successes] and is updated in place.
    Returns (committed, exit code).
    """
    committed = 0
    idle = 0
    cap = len(log_i)
    while committed < target:
        w = np.int64(np.ceil(state[0]))
        if w > target - committed:
            w = target - committed
        if w > cap:
            return committed, NEED_LOG
        before = ctr[ATTEMPTS]
        if rule == RULE_FINAL:
            done = isolated_window(g, work, rng, w, np.int64(state[1]), mode,
                                   log_i, log_j, log_f, ctr, stall_limit - idle)
        else:
            done = plain_window(g, rng, w, log_i, log_j, log_f, ctr, stall_limit - idle)
        idle += ctr[ATTEMPTS] - before
        if done == 0:
            return committed, STALLED
        ctr[CONN_TESTS] += 1
        ok = is_connected(g, work)
        if ok:
            committed += done
            ctr[WINDOWS_OK] += 1
            idle = 0
        else:
            rollback(g, log_i, log_j, log_f, done)
            ctr[DISCONNECTIONS] += 1
        T = state[0]
        if rule == RULE_GKANTSIDIS:
            T = T + 1.0 if ok else T / 2.0
        elif rule == RULE_GEOMETRIC:
            T = T * (1.0 + q_plus) if ok else T * (1.0 - q_minus)
        else:
            if ok:
                T = T * (1.0 + q_plus)
                state[2] += 1
                if state[2] % 32 == 0 and state[1] > 1:
                    state[1] -= 1
            else:
                state[1] = min(2 * state[1], g.n)
                state[2] = 0
        state[0] = min(max(T, t_floor), t_cap)
        if idle >= stall_limit:
            return committed, STALLED
    return committed, DONE


@njit(nogil=True, cache=True)
def naive_run(g, work, rng, target, ctr, max_attempts):
    """Full connectivity test after every applied swap; returns committed count.

    ``max_attempts`` bounds consecutive draws without a commit.
    """
    done = 0
    tries = 0
    while done < target and tries < max_attempts:
        i, j, f = _draw(g, rng)
        tries += 1
        if not swap_is_simple(g, i, j, f):
            ctr[SIMPLICITY] += 1
            continue
        apply_swap(g, i, j, f)
        ctr[CONN_TESTS] += 1
        if not is_connected(g, work):
            undo_swap(g, i, j, f)
            ctr[DISCONNECTIONS] += 1
            continue
        ctr[WINDOWS_OK] += 1
        ctr[ATTEMPTS] += tries
        tries = 0
        done += 1
    ctr[ATTEMPTS] += tries
    return done


@njit(nogil=True, cache=True)
def has_valid_swap(g, work):
    """Exhaustive search for one swap keeping the graph simple and connected."""
    for i in range(g.m):
        for j in range(i + 1, g.m):
            for f in (False, True):
                if not swap_is_simple(g, i, j, f):
                    continue
                apply_swap(g, i, j, f)
                ok = is_connected(g, work)
                undo_swap(g, i, j, f)
                if ok:
                    return True
    return False


@njit(nogil=True, cache=True)
def sample_disconnections(g, work, rng, K, mode, samples, max_attempts, exact_bfs):
    """Monte-Carlo disconnection count over ``samples`` applied swaps.

    ``K < 0`` disables the isolation filter.  Returns (applied, disconnected).
    The graph is restored after every sample.
    """
    applied = 0
    split = 0
    tries = 0
    while applied < samples and tries < max_attempts:
        i, j, f = _draw(g, rng)
        tries += 1
        if not swap_is_simple(g, i, j, f):
            continue
        apply_swap(g, i, j, f)
        a = g.rec[i, 0]
        b = g.rec[j, 1]
        if K >= 0:
            if isolation(g, work, a, K, mode) >= 0 or isolation(g, work, b, K, mode) >= 0:
                undo_swap(g, i, j, f)
                continue
        applied += 1
        if exact_bfs:
            if not is_connected(g, work):
                split += 1
        elif separated(g, work, a, b):
            split += 1
        undo_swap(g, i, j, f)
    return applied, split


@njit(nogil=True, cache=True)
def simulate_windows(rule, p, steps, T0, q_minus, q_plus, rng, out_T, out_ok):
    """Synthetic window dynamics: a window of ceil(T) swaps survives w.p. (1-p)^ceil(T).

    rule 0: T/2 or T+1;  rule 1: T(1-q-) or T(1+q+).  T is floored at 1.
    """
    T = T0
    lq = np.log1p(-p)
    for t in range(steps):
        w = np.ceil(T)
        ok = rng.random() < np.exp(w * lq)
        out_T[t] = T
        out_ok[t] = ok
        if rule == 0:
            T = T + 1.0 if ok else T / 2.0
        else:
            T = T * (1.0 + q_plus) if ok else T * (1.0 - q_minus)
        if T < 1.0:
            T = 1.0


# exhaustive small-graph scan, adjacency as bitmasks (n <= 8)

@njit(inline="always", cache=True)
def _mask_connected(nbr, n):
    seen = 1
    frontier = 1
    full = (1 << n) - 1
    while frontier:
        nxt = 0
        for v in range(n):
            if frontier >> v & 1:
                nxt |= nbr[v]
        frontier = nxt & ~seen
        seen |= nxt
    return seen == full


@njit(cache=True)
def bound_scan(n, pu, pv, out):
    """Every labelled connected graph on ``n`` vertices versus the valid-swap bound.

    For each graph: ``good`` simple+connected candidates among ``total`` =
    2 m (m-1), and ``far`` ordered pairs at distance >= 3.  The bound
    good/total >= rho / (2 z (z+1)) is checked in integers as
    good (n-1) 4m (2m+n) >= far n total.  ``out`` receives
    [graphs, violations, graphs with far > 0], and the smallest ratio
    (good/total) / bound is returned (inf if no graph has far > 0).
    """
    P = len(pu)
    nbr = np.zeros(n, np.int64)
    eu = np.zeros(P, np.int64)
    ev = np.zeros(P, np.int64)
    worst = np.inf
    for mask in range(1 << P):
        m = 0
        for v in range(n):
            nbr[v] = 0
        for k in range(P):
            if mask >> k & 1:
                a = pu[k]
                b = pv[k]
                eu[m] = a
                ev[m] = b
                nbr[a] |= 1 << b
                nbr[b] |= 1 << a
                m += 1
        if m < n - 1 or not _mask_connected(nbr, n):
            continue
        out[0] += 1
        far = 0
        for v in range(n):
            near = nbr[v] | (1 << v)
            for w in range(n):
                if nbr[v] >> w & 1:
                    near |= nbr[w]
            cnt = 0
            x = near
            while x:
                x &= x - 1
                cnt += 1
            far += n - cnt
        if m < 2:
            # a single edge has no candidates; rho is 0 so the bound is vacuous
            continue
        total = 2 * m * (m - 1)
        good = 0
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                p = eu[i]
                q = ev[i]
                for f in range(2):
                    if f == 0:
                        r = eu[j]
                        s = ev[j]
                    else:
                        r = ev[j]
                        s = eu[j]
                    # (p,q),(r,s) -> (p,s),(r,q)
                    if p == s or r == q:
                        continue
                    if nbr[p] >> s & 1 or nbr[r] >> q & 1:
                        continue
                    nbr[p] ^= (1 << q) | (1 << s)
                    nbr[q] ^= (1 << p) | (1 << r)
                    nbr[r] ^= (1 << s) | (1 << q)
                    nbr[s] ^= (1 << r) | (1 << p)
                    if _mask_connected(nbr, n):
                        good += 1
                    nbr[p] ^= (1 << q) | (1 << s)
                    nbr[q] ^= (1 << p) | (1 << r)
                    nbr[r] ^= (1 << s) | (1 << q)
                    nbr[s] ^= (1 << r) | (1 << p)
        if far > 0:
            out[2] += 1
            lhs = good * (n - 1) * 4 * m * (2 * m + n)
            rhs = far * n * total
            if lhs < rhs:
                out[1] += 1
            ratio = lhs / rhs
            if ratio < worst:
                worst = ratio
    return worst
