"""Hot loops, each in a numba version (``*_nb``) and a numpy version (``*_np``).

The public functions at the bottom of each section dispatch on
:func:`synchrolab._accel.use_numba`. Subsets are int64 bitmasks (bit q is
state q+1); transition tables are ``(k, n)`` int64 arrays with -1 for
undefined. Both versions of a kernel return identical results, including
the tie-breaking of witnesses.
"""
from __future__ import annotations

import itertools

import numpy as np

from ._accel import njit, use_numba

INF = np.int32(1 << 30)
_GOLDEN = np.int64(-7046029254386353131)  # 0x9E3779B97F4A7C15 as int64
_EMPTY = np.empty(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# images


@njit
def _img(delta, a, X, n):
    out = np.int64(0)
    for q in range(n):
        if (X >> q) & 1:
            t = delta[a, q]
            if t < 0:
                return np.int64(0)
            out |= np.int64(1) << t
    return out


def images_np(delta, sets):
    """Images of every set in ``sets`` under every symbol, shape ``(len(sets), k)``."""
    sets = np.asarray(sets, dtype=np.int64)
    k, n = delta.shape
    out = np.zeros((sets.shape[0], k), dtype=np.int64)
    one = np.int64(1)
    for a in range(k):
        img = np.zeros(sets.shape[0], dtype=np.int64)
        bad = np.zeros(sets.shape[0], dtype=bool)
        for q in range(n):
            has = ((sets >> q) & 1).astype(bool)
            t = delta[a, q]
            if t < 0:
                bad |= has
            else:
                img |= has.astype(np.int64) * (one << np.int64(t))
        img[bad] = 0
        out[:, a] = img
    return out


def all_images(delta, n):
    """Image table ``(k, 2**n)`` over every subset (index = bitmask)."""
    return images_np(delta, np.arange(1 << n, dtype=np.int64)).T.copy()


def _is_singleton(x):
    return (x != 0) & ((x & (x - 1)) == 0)


# ---------------------------------------------------------------------------
# open-addressing hash set of nonzero int64 keys (numba only)


@njit
def _slot(key, mask):
    h = key * _GOLDEN
    h ^= h >> 29
    return h & mask


@njit
def _ht_insert(table, key):
    mask = table.shape[0] - 1
    i = _slot(key, mask)
    while True:
        v = table[i]
        if v == 0:
            table[i] = key
            return True
        if v == key:
            return False
        i = (i + 1) & mask


@njit
def _ht_rebuild(keys, count, size):
    table = np.zeros(size, dtype=np.int64)
    for j in range(count):
        _ht_insert(table, keys[j])
    return table


# ---------------------------------------------------------------------------
# shortest synchronizing word: FIFO BFS, symbols in table order, so the
# first singleton found carries the lexicographically least shortest word.


@njit
def _sync_bfs_nb(delta, n, start, max_nodes):
    k = delta.shape[0]
    if start == 0:
        return -1, _EMPTY
    if start & (start - 1) == 0:
        return 0, _EMPTY
    cap = 1024
    nodes = np.empty(cap, dtype=np.int64)
    par = np.empty(cap, dtype=np.int64)
    sym = np.empty(cap, dtype=np.int64)
    table = np.zeros(2 * cap, dtype=np.int64)
    nodes[0] = start
    par[0] = -1
    sym[0] = -1
    _ht_insert(table, start)
    head = 0
    tail = 1
    while head < tail:
        X = nodes[head]
        for a in range(k):
            Y = _img(delta, a, X, n)
            if Y == 0:
                continue
            if tail == cap:
                cap *= 2
                nn = np.empty(cap, dtype=np.int64)
                nn[:tail] = nodes[:tail]
                nodes = nn
                np_ = np.empty(cap, dtype=np.int64)
                np_[:tail] = par[:tail]
                par = np_
                ns = np.empty(cap, dtype=np.int64)
                ns[:tail] = sym[:tail]
                sym = ns
                table = _ht_rebuild(nodes, tail, 2 * cap)
            if not _ht_insert(table, Y):
                continue
            if max_nodes > 0 and tail >= max_nodes:
                return -2, _EMPTY
            nodes[tail] = Y
            par[tail] = head
            sym[tail] = a
            tail += 1
            if Y & (Y - 1) == 0:
                length = 0
                j = tail - 1
                while par[j] >= 0:
                    length += 1
                    j = par[j]
                w = np.empty(length, dtype=np.int64)
                j = tail - 1
                i = length - 1
                while par[j] >= 0:
                    w[i] = sym[j]
                    i -= 1
                    j = par[j]
                return length, w
        head += 1
    return -1, _EMPTY


def _sync_bfs_np(delta, n, start, max_nodes):
    start = np.int64(start)
    if start == 0:
        return -1, _EMPTY
    if start & (start - 1) == 0:
        return 0, _EMPTY
    k = delta.shape[0]
    levels = [np.array([start], dtype=np.int64)]
    parents = [None]
    symbols = [None]
    visited = np.array([start], dtype=np.int64)
    while True:
        F = levels[-1]
        imgs = images_np(delta, F).ravel()
        order = np.arange(imgs.size)
        keep = imgs != 0
        cand, pos = imgs[keep], order[keep]
        if cand.size == 0:
            return -1, _EMPTY
        uniq, first = np.unique(cand, return_index=True)
        fresh = ~np.isin(uniq, visited, assume_unique=True)
        uniq, first = uniq[fresh], pos[first[fresh]]
        if uniq.size == 0:
            return -1, _EMPTY
        disc = np.argsort(first, kind="stable")
        nodes, first = uniq[disc], first[disc]
        levels.append(nodes)
        parents.append(first // k)
        symbols.append(first % k)
        single = np.flatnonzero(_is_singleton(nodes))
        # same cap semantics as the loop version: count nodes in discovery order
        room = max_nodes - visited.size if max_nodes > 0 else nodes.size
        if room < (int(single[0]) + 1 if single.size else nodes.size):
            return -2, _EMPTY
        visited = np.union1d(visited, nodes)
        if single.size:
            j = int(single[0])
            depth = len(levels) - 1
            w = np.empty(depth, dtype=np.int64)
            for d in range(depth, 0, -1):
                w[d - 1] = symbols[d][j]
                j = int(parents[d][j])
            return depth, w


def sync_bfs(delta, n, start, max_nodes=0):
    """Shortest word from ``start`` to a singleton: ``(length, symbols)``; -1 if none, -2 on node cap."""
    delta = np.ascontiguousarray(delta, dtype=np.int64)
    if use_numba():
        length, w = _sync_bfs_nb(delta, n, np.int64(start), max_nodes)
    else:
        length, w = _sync_bfs_np(delta, n, start, max_nodes)
    return int(length), tuple(int(x) for x in w)


@njit
def _sync_len_batch_nb(base, cand, n):
    kb = base.shape[0]
    C = cand.shape[0]
    N = 1 << n
    delta = np.empty((kb + 1, n), dtype=np.int64)
    delta[:kb] = base
    dist = np.empty(N, dtype=np.int64)
    queue = np.empty(N, dtype=np.int64)
    out = np.full(C, -1, dtype=np.int64)
    full = np.int64(N - 1)
    for c in range(C):
        delta[kb] = cand[c]
        dist[:] = -1
        dist[full] = 0
        queue[0] = full
        head, tail = 0, 1
        if n == 1:
            out[c] = 0
            continue
        while head < tail and out[c] < 0:
            X = queue[head]
            head += 1
            for a in range(kb + 1):
                Y = _img(delta, a, X, n)
                if Y != 0 and dist[Y] < 0:
                    dist[Y] = dist[X] + 1
                    if Y & (Y - 1) == 0:
                        out[c] = dist[Y]
                        break
                    queue[tail] = Y
                    tail += 1
    return out


def _sync_len_batch_np(base, cand, n):
    N = 1 << n
    C = cand.shape[0]
    subsets = np.arange(N, dtype=np.int64)
    bimg = images_np(base, subsets).T if base.shape[0] else np.zeros((0, N), dtype=np.int64)
    cimg = images_np(cand, subsets)  # (N, C)
    single = _is_singleton(subsets)
    out = np.full(C, -1, dtype=np.int64)
    if n == 1:
        return np.zeros(C, dtype=np.int64)
    reached = np.zeros((C, N), dtype=bool)
    reached[:, N - 1] = True
    frontier = reached.copy()
    depth = 0
    open_ = np.ones(C, dtype=bool)
    while open_.any():
        depth += 1
        nxt = np.zeros((C, N), dtype=bool)
        r, x = np.nonzero(frontier & open_[:, None])
        for T in bimg:
            nxt[r, T[x]] = True
        nxt[r, cimg[x, r]] = True
        nxt[:, 0] = False
        nxt &= ~reached
        reached |= nxt
        hit = open_ & (nxt & single[None, :]).any(axis=1)
        out[hit] = depth
        open_ &= ~hit & nxt.any(axis=1)
        frontier = nxt
    return out


def sync_lengths_batch(base_rows, cand_rows, n):
    """Shortest synchronization length of ``base + candidate`` for every candidate row (-1 if none)."""
    base = np.ascontiguousarray(np.asarray(base_rows, dtype=np.int64).reshape(-1, n))
    cand = np.ascontiguousarray(np.asarray(cand_rows, dtype=np.int64).reshape(-1, n))
    if use_numba():
        return _sync_len_batch_nb(base, cand, n)
    return _sync_len_batch_np(base, cand, n)


def bfs_levels(delta, n, start, stop_at_singleton=True):
    """Sorted node arrays per BFS level (numpy; used for exact path counting)."""
    levels = [np.array([start], dtype=np.int64)]
    visited = levels[0]
    if stop_at_singleton and _is_singleton(levels[0]).any():
        return levels
    while True:
        imgs = images_np(delta, levels[-1]).ravel()
        imgs = np.unique(imgs[imgs != 0])
        nxt = np.setdiff1d(imgs, visited, assume_unique=True)
        if nxt.size == 0:
            return levels
        levels.append(nxt)
        visited = np.union1d(visited, nxt)
        if stop_at_singleton and _is_singleton(nxt).any():
            return levels


# ---------------------------------------------------------------------------
# all-pairs distances on the subset graph (2**n nodes; bit index = subset)


@njit
def _subset_dist_nb(delta, n):
    N = 1 << n
    k = delta.shape[0]
    succ = np.empty((k, N), dtype=np.int64)
    for a in range(k):
        for X in range(N):
            succ[a, X] = _img(delta, a, np.int64(X), n)
    D = np.full((N, N), INF, dtype=np.int32)
    queue = np.empty(N, dtype=np.int64)
    for s in range(1, N):
        D[s, s] = 0
        queue[0] = s
        h = 0
        t = 1
        while h < t:
            X = queue[h]
            h += 1
            d = D[s, X] + 1
            for a in range(k):
                Y = succ[a, X]
                if Y != 0 and D[s, Y] == INF:
                    D[s, Y] = d
                    queue[t] = Y
                    t += 1
    return D


def _subset_dist_np(delta, n):
    N = 1 << n
    succ = all_images(delta, n)
    adj = np.zeros((N, N), dtype=np.float32)
    for a in range(succ.shape[0]):
        src = np.arange(1, N)
        dst = succ[a, 1:]
        ok = dst != 0
        adj[src[ok], dst[ok]] = 1.0
    D = np.full((N, N), INF, dtype=np.int32)
    frontier = np.zeros((N, N), dtype=np.float32)
    idx = np.arange(1, N)
    D[idx, idx] = 0
    frontier[idx, idx] = 1.0
    d = 0
    while True:
        d += 1
        reach = (frontier @ adj) > 0
        reach &= D == INF
        if not reach.any():
            return D
        D[reach] = d
        frontier = reach.astype(np.float32)


def subset_distances(delta, n):
    """``D[S, T]`` = length of the shortest word w with Sw = T (``INF`` if none); row/col 0 unused."""
    delta = np.ascontiguousarray(delta, dtype=np.int64)
    if use_numba():
        return _subset_dist_nb(delta, n)
    return _subset_dist_np(delta, n)


# ---------------------------------------------------------------------------
# bound tables (L, L', L'') from the subset distance table


@njit
def _reach_nb(D, sizes, comp, cost, R, stamp, tag):
    N = D.shape[0]
    smin = 1 << 30
    for Y in range(1, N):
        if D[R, Y] < INF and sizes[Y] < smin:
            smin = sizes[Y]
    dmin = INF
    dmax = 0
    c = 0
    for Y in range(1, N):
        if D[R, Y] < INF and sizes[Y] == smin:
            d = D[R, Y]
            if d < dmin:
                dmin = d
            if d > dmax:
                dmax = d
            cid = comp[Y]
            if stamp[cid] != tag:
                stamp[cid] = tag
                c += cost[cid]
    return smin, dmin, dmax, c


@njit
def _bounds_nb(D, sizes, n, legacy):
    N = 1 << n
    Q = N - 1
    red_len = np.full(N, INF, dtype=np.int64)
    for R in range(N):
        if sizes[R] < 2:
            continue
        best = np.int64(INF)
        for Y in range(1, N):
            if sizes[Y] < sizes[R] and D[R, Y] < best:
                best = D[R, Y]
        red_len[R] = best
    comp = np.full(N, -1, dtype=np.int64)
    cost = np.zeros(N, dtype=np.int64)
    csize = np.zeros(N, dtype=np.int64)
    ncomp = 0
    members = np.empty(N, dtype=np.int64)
    for k in range(1, n + 1):
        for X in range(1, N):
            if sizes[X] != k or comp[X] >= 0 or red_len[X] < INF:
                continue
            cid = ncomp
            ncomp += 1
            cnt = 0
            for Y in range(1, N):
                if sizes[Y] == k and red_len[Y] >= INF and D[X, Y] < INF and D[Y, X] < INF:
                    comp[Y] = cid
                    members[cnt] = Y
                    cnt += 1
            mx = 0
            for i in range(cnt):
                for j in range(cnt):
                    d = D[members[i], members[j]]
                    if d > mx:
                        mx = d
            cost[cid] = 1 + mx
            csize[cid] = k
    m_k = np.zeros(n + 1, dtype=np.int64)
    l_k = np.zeros(n + 1, dtype=np.int64)
    for cid in range(ncomp):
        if csize[cid] >= 2:
            m_k[csize[cid]] += cost[cid]
    for R in range(N):
        if sizes[R] >= 2 and red_len[R] < INF and red_len[R] > l_k[sizes[R]]:
            l_k[sizes[R]] = red_len[R]
    stamp = np.full(N, -1, dtype=np.int64)
    tag = 0
    s, m, M, c = _reach_nb(D, sizes, comp, cost, Q, stamp, tag)
    tag += 1
    sum_k = 0
    for k in range(2, s + 1):
        sum_k += m_k[k] + l_k[k]
    L = sum_k + m
    Lprime = m if s == 1 else sum_k - c + 1 + M
    lpp_k = np.zeros(n + 1, dtype=np.int64)
    lpp_R = np.full(N, INF, dtype=np.int64)
    for k in range(2, n + 1):
        best = lpp_k[k - 1]
        for R in range(N):
            if sizes[R] != k or red_len[R] >= INF or R == Q:
                continue
            sR, mR, MR, cR = _reach_nb(D, sizes, comp, cost, R, stamp, tag)
            tag += 1
            v = mR if sR == 1 else lpp_k[sR] - cR + 1 + MR
            if not legacy:
                alt = lpp_k[k - 1] + red_len[R]
                if alt < v:
                    v = alt
            lpp_R[R] = v
            if v > best:
                best = v
        lpp_k[k] = m_k[k] + best
    Lpp = m if s == 1 else lpp_k[s] - c + 1 + M
    if red_len[Q] < INF:
        lpp_R[Q] = Lpp
    scal = np.array([s, m, M, c, L, Lprime, Lpp], dtype=np.int64)
    return red_len, comp, cost[:ncomp].copy(), m_k, l_k, lpp_k, lpp_R, scal


def _bounds_np(D, sizes, n, legacy):
    N = 1 << n
    Q = N - 1
    D = D.astype(np.int64)
    smaller = (sizes[None, :] < sizes[:, None]) & (sizes[None, :] > 0)
    red_len = np.where(smaller, D, INF).min(axis=1)
    red_len[sizes < 2] = INF
    reducible = red_len < INF
    comp = np.full(N, -1, dtype=np.int64)
    cost, csize = [], []
    finite = D < INF
    irr = (~reducible) & (sizes > 0)
    for k in range(1, n + 1):
        members = np.flatnonzero(irr & (sizes == k))
        if members.size == 0:
            continue
        sub = finite[np.ix_(members, members)]
        mutual = sub & sub.T
        local = np.full(members.size, -1, dtype=np.int64)
        for i in range(members.size):
            if local[i] >= 0:
                continue
            cls = np.flatnonzero(mutual[i])
            local[cls] = len(cost)
            idx = members[cls]
            cost.append(1 + int(D[np.ix_(idx, idx)].max()))
            csize.append(k)
        comp[members] = local
    cost = np.array(cost, dtype=np.int64)
    csize = np.array(csize, dtype=np.int64)
    m_k = np.zeros(n + 1, dtype=np.int64)
    l_k = np.zeros(n + 1, dtype=np.int64)
    for k in range(2, n + 1):
        m_k[k] = cost[csize == k].sum()
        red = reducible & (sizes == k)
        l_k[k] = red_len[red].max() if red.any() else 0

    def reach(R):
        row = D[R]
        ok = (row < INF) & (sizes > 0)
        smin = int(sizes[ok].min())
        at = ok & (sizes == smin)
        d = row[at]
        return smin, int(d.min()), int(d.max()), int(cost[np.unique(comp[at])].sum())

    s, m, M, c = reach(Q)
    sum_k = int(sum(m_k[k] + l_k[k] for k in range(2, s + 1)))
    L = sum_k + m
    Lprime = m if s == 1 else sum_k - c + 1 + M
    lpp_k = np.zeros(n + 1, dtype=np.int64)
    lpp_R = np.full(N, INF, dtype=np.int64)
    for k in range(2, n + 1):
        best = lpp_k[k - 1]
        for R in np.flatnonzero(reducible & (sizes == k)):
            if R == Q:
                continue
            sR, mR, MR, cR = reach(R)
            v = mR if sR == 1 else lpp_k[sR] - cR + 1 + MR
            if not legacy:
                v = min(v, lpp_k[k - 1] + int(red_len[R]))
            lpp_R[R] = v
            best = max(best, v)
        lpp_k[k] = m_k[k] + best
    Lpp = m if s == 1 else int(lpp_k[s]) - c + 1 + M
    if reducible[Q]:
        lpp_R[Q] = Lpp
    scal = np.array([s, m, M, c, L, Lprime, Lpp], dtype=np.int64)
    return red_len, comp, cost, m_k, l_k, lpp_k, lpp_R, scal


def bound_tables(D, sizes, n, legacy=False):
    """Reduction lengths, components and the L/L'/L'' recursion from the subset distance table.

    Returns ``(red_len, comp, cost, m_k, l_k, lpp_k, lpp_R, scalars)`` where
    scalars are ``(|S|, m, M, c, L, L', L'')``; INF marks absent entries.
    """
    D = np.ascontiguousarray(D)
    sizes = np.ascontiguousarray(sizes, dtype=np.int64)
    if use_numba():
        return _bounds_nb(D, sizes, n, bool(legacy))
    return _bounds_np(D, sizes, n, bool(legacy))


def _sizes(n):
    x = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for q in range(n):
        out += (x >> q) & 1
    return out


@njit
def _lpp_batch_nb(base, cand, n, legacy, todo, sizes):
    kb = base.shape[0]
    delta = np.empty((kb + 1, n), dtype=np.int64)
    delta[:kb] = base
    out = np.full(cand.shape[0], -1, dtype=np.int64)
    for c in range(cand.shape[0]):
        if not todo[c]:
            continue
        delta[kb] = cand[c]
        D = _subset_dist_nb(delta, n)
        out[c] = _bounds_nb(D, sizes, n, legacy)[7][6]
    return out


def _lpp_batch_np(base, cand, n, legacy, todo, sizes):
    out = np.full(cand.shape[0], -1, dtype=np.int64)
    for c in np.flatnonzero(todo):
        delta = np.vstack([base, cand[c:c + 1]])
        out[c] = _bounds_np(_subset_dist_np(delta, n), sizes, n, legacy)[7][6]
    return out


def lpp_batch(base_rows, cand_rows, n, legacy=False, todo=None):
    """L'' of ``base + candidate`` for every candidate with ``todo`` set (-1 elsewhere)."""
    base = np.ascontiguousarray(np.asarray(base_rows, dtype=np.int64).reshape(-1, n))
    cand = np.ascontiguousarray(np.asarray(cand_rows, dtype=np.int64).reshape(-1, n))
    todo = np.ones(cand.shape[0], dtype=np.bool_) if todo is None else np.ascontiguousarray(todo, dtype=np.bool_)
    sizes = _sizes(n)
    if use_numba():
        return _lpp_batch_nb(base, cand, n, bool(legacy), todo, sizes)
    return _lpp_batch_np(base, cand, n, bool(legacy), todo, sizes)


# ---------------------------------------------------------------------------
# canonical keys: minimum over all state permutations of the relabelled rows
# (each row encoded base n+1, undefined = 0), rows optionally sorted, plus an
# optional marked subset appended as a final component.


@njit
def _canon_nb(delta, n, sort_rows, extra, has_extra):
    k = delta.shape[0]
    L = k + 1 if has_extra else k
    base = n + 1
    best = np.zeros(L, dtype=np.int64)
    best_perm = np.arange(n)
    cur = np.zeros(L, dtype=np.int64)
    tmp = np.zeros(n, dtype=np.int64)
    sig = np.arange(n)
    have = False
    while True:
        for a in range(k):
            for q in range(n):
                t = delta[a, q]
                if t >= 0:
                    tmp[sig[q]] = sig[t] + 1
                else:
                    tmp[sig[q]] = 0
            c = np.int64(0)
            for i in range(n):
                c = c * base + tmp[i]
            cur[a] = c
        if sort_rows and k > 1:
            cur[:k] = np.sort(cur[:k])
        if has_extra:
            e = np.int64(0)
            for q in range(n):
                if (extra >> q) & 1:
                    e |= np.int64(1) << sig[q]
            cur[k] = e
        better = not have
        if have:
            for i in range(L):
                if cur[i] != best[i]:
                    better = cur[i] < best[i]
                    break
        if better:
            best[:] = cur
            best_perm[:] = sig
            have = True
        i = n - 2
        while i >= 0 and sig[i] >= sig[i + 1]:
            i -= 1
        if i < 0:
            break
        j = n - 1
        while sig[j] <= sig[i]:
            j -= 1
        sig[i], sig[j] = sig[j], sig[i]
        lo = i + 1
        hi = n - 1
        while lo < hi:
            sig[lo], sig[hi] = sig[hi], sig[lo]
            lo += 1
            hi -= 1
    return best, best_perm


def _canon_np(delta, n, sort_rows, extra, has_extra, chunk=40320):
    k = delta.shape[0]
    pw = (n + 1) ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best = None
    best_perm = None
    it = itertools.permutations(range(n))
    while True:
        perms = np.array(list(itertools.islice(it, chunk)), dtype=np.int64)
        if perms.size == 0:
            break
        P = perms.shape[0]
        cols = []
        rows_idx = np.arange(P)[:, None]
        for a in range(k):
            row = delta[a]
            vals = np.where(row >= 0, perms[:, np.clip(row, 0, None)] + 1, 0)
            tmp = np.zeros((P, n), dtype=np.int64)
            tmp[rows_idx, perms] = vals
            cols.append(tmp @ pw)
        codes = np.stack(cols, axis=1) if cols else np.zeros((P, 0), dtype=np.int64)
        if sort_rows:
            codes = np.sort(codes, axis=1)
        if has_extra:
            e = np.zeros(P, dtype=np.int64)
            for q in range(n):
                if (extra >> q) & 1:
                    e |= np.int64(1) << perms[:, q]
            codes = np.concatenate([codes, e[:, None]], axis=1)
        if codes.shape[1] == 0:
            i = 0
        else:
            i = int(np.lexsort(codes.T[::-1])[0])
        cand = tuple(int(x) for x in codes[i])
        if best is None or cand < best:
            best, best_perm = cand, perms[i].copy()
    return np.array(best, dtype=np.int64), best_perm


def canonical_key(delta, n, sort_rows=True, extra=None):
    """``(key, perm)`` with ``perm[q]`` the new 0-based label of old state q."""
    if n > 10:
        raise ValueError("canonical forms are limited to n <= 10")
    delta = np.ascontiguousarray(delta, dtype=np.int64)
    has_extra = extra is not None
    ext = np.int64(extra if has_extra else 0)
    if use_numba():
        key, perm = _canon_nb(delta, n, sort_rows, ext, has_extra)
    else:
        key, perm = _canon_np(delta, n, sort_rows, ext, has_extra)
    return tuple(int(x) for x in key), tuple(int(x) for x in perm)


# ---------------------------------------------------------------------------
# rewrite-system BFS. Strings keep their C-prefix (positions 0..h-1) fixed;
# the remaining k-h letters 1..M are coded base M (position h least
# significant). family 0: R_{h,m}, target = last letter m. family 1: the
# cyclic extension (h=1, M=2m-2), target = last letter >= m.


@njit
def _rw_successor(letters, h, m, M, family, e, out):
    """Apply the rule ending at position e (index into letters); False if none applies."""
    k = letters.shape[0]
    if family == 0:
        lo = e - h
        if lo < h:
            lo = h
        for j in range(lo, e):
            if letters[j] != m:
                return False
        if letters[e] >= m:
            return False
        for j in range(k):
            out[j] = letters[j]
        for j in range(lo, e):
            out[j] = 1
        out[e] = letters[e] + 1
        return True
    # cyclic family, h == 1
    t = letters[e]
    nt = t + 1 if t < M else 1
    for j in range(k):
        out[j] = letters[j]
    if e == 1:
        out[e] = nt
        return True
    s = letters[e - 1]
    if s < m:
        return False
    out[e - 1] = s - (m - 1)
    out[e] = nt
    return True


@njit
def _rw_bfs_nb(h, m, M, k, family, start, stop_at_target):
    width = k - h
    S = 1
    for _ in range(width):
        S *= M
    dist = np.full(S, -1, dtype=np.int32)
    parent = np.full(S, -1, dtype=np.int64)
    queue = np.empty(S, dtype=np.int64)
    letters = np.zeros(k, dtype=np.int64)
    out = np.zeros(k, dtype=np.int64)
    dist[start] = 0
    queue[0] = start
    head = 0
    tail = 1
    found = np.int64(-1)
    while head < tail:
        code = queue[head]
        head += 1
        c = code
        for j in range(h, k):
            letters[j] = c % M + 1
            c //= M
        last = letters[k - 1]
        hit = last == m if family == 0 else last >= m
        if hit:
            if found < 0:
                found = code
            if stop_at_target:
                break
            continue
        for e in range(h, k):
            if _rw_successor(letters, h, m, M, family, e, out):
                nc = np.int64(0)
                for j in range(k - 1, h - 1, -1):
                    nc = nc * M + (out[j] - 1)
                if dist[nc] < 0:
                    dist[nc] = dist[code] + 1
                    parent[nc] = code
                    queue[tail] = nc
                    tail += 1
    return found, dist, parent


def _rw_decode(codes, h, M, k):
    width = k - h
    pw = M ** np.arange(width, dtype=np.int64)
    return (codes[:, None] // pw[None, :]) % M + 1


def _rw_bfs_np(h, m, M, k, family, start, stop_at_target):
    width = k - h
    S = M**width
    dist = np.full(S, -1, dtype=np.int32)
    parent = np.full(S, -1, dtype=np.int64)
    dist[start] = 0
    pw = M ** np.arange(width, dtype=np.int64)
    frontier = np.array([start], dtype=np.int64)
    found = -1
    d = 0
    while frontier.size:
        letters = _rw_decode(frontier, h, M, k)  # column j is position h+j
        last = letters[:, -1]
        hit = last == m if family == 0 else last >= m
        if hit.any():
            if found < 0:
                found = int(frontier[np.flatnonzero(hit)[0]])
            if stop_at_target:
                break
        live = ~hit
        src = frontier[live]
        L = letters[live]
        if src.size == 0:
            break
        E = k - h
        prop = np.empty((src.size, E), dtype=np.int64)
        okm = np.empty((src.size, E), dtype=bool)
        for e in range(h, k):
            col = e - h
            out = L.copy()
            if family == 0:
                lo = max(h, e - h) - h
                ok = L[:, col] < m
                if col > lo:
                    ok &= (L[:, lo:col] == m).all(axis=1)
                out[:, lo:col] = 1
                out[:, col] = L[:, col] + 1
            else:
                t = L[:, col]
                out[:, col] = np.where(t < M, t + 1, 1)
                if e == 1:
                    ok = np.ones(L.shape[0], dtype=bool)
                else:
                    s = L[:, col - 1]
                    ok = s >= m
                    out[:, col - 1] = s - (m - 1)
            prop[:, col] = (out - 1) @ pw
            okm[:, col] = ok
        # row-major flattening = (source order, position order), as in the queue version
        nc = prop[okm]
        npar = np.broadcast_to(src[:, None], prop.shape)[okm]
        fresh = dist[nc] < 0
        nc, npar = nc[fresh], npar[fresh]
        uniq, first = np.unique(nc, return_index=True)
        d += 1
        dist[uniq] = d
        parent[uniq] = npar[first]
        frontier = uniq[np.argsort(first, kind="stable")]
    return found, dist, parent


def rewrite_bfs(h, m, k, family=0, start=None, stop_at_target=True, cap=1 << 26):
    """BFS over rewrite strings; returns ``(target_code, dist, parent, M)``."""
    M = m if family == 0 else 2 * m - 2
    width = k - h
    if width < 1:
        raise ValueError("string has no rewritable positions")
    if M**width > cap:
        raise ValueError(f"rewrite state space {M}^{width} exceeds cap {cap}")
    start = 0 if start is None else int(start)
    if use_numba():
        found, dist, parent = _rw_bfs_nb(h, m, M, k, family, np.int64(start), stop_at_target)
    else:
        found, dist, parent = _rw_bfs_np(h, m, M, k, family, start, stop_at_target)
    if stop_at_target and found >= 0:
        # the queue version may have run ahead into the next level
        beyond = dist > dist[found]
        dist[beyond] = -1
        parent[beyond] = -1
    return int(found), dist, parent, M


# ---------------------------------------------------------------------------
# reducible pairs of DFA extensions (critical-DFA search heuristic)


def pair_index(n):
    idx = -np.ones((n, n), dtype=np.int64)
    c = 0
    for p in range(n):
        for q in range(p + 1, n):
            idx[p, q] = idx[q, p] = c
            c += 1
    return idx


def pair_images(rows, n):
    """For each map row and pair, the image pair index or -1 when the pair merges."""
    idx = pair_index(n)
    ps, qs = np.nonzero(np.triu(np.ones((n, n), dtype=bool), 1))
    rows = np.atleast_2d(rows)
    a, b = rows[:, ps], rows[:, qs]
    return np.where(a == b, -1, idx[a, b])


@njit
def _red_counts_nb(base_img, cand_img):
    C, P = cand_img.shape
    kb = base_img.shape[0]
    counts = np.zeros(C, dtype=np.int64)
    red = np.zeros(P, dtype=np.bool_)
    for c in range(C):
        red[:] = False
        changed = True
        while changed:
            changed = False
            for p in range(P):
                if red[p]:
                    continue
                r = False
                t = cand_img[c, p]
                if t < 0 or red[t]:
                    r = True
                else:
                    for a in range(kb):
                        t = base_img[a, p]
                        if t < 0 or red[t]:
                            r = True
                            break
                if r:
                    red[p] = True
                    changed = True
        s = 0
        for p in range(P):
            if red[p]:
                s += 1
        counts[c] = s
    return counts


def _red_counts_np(base_img, cand_img):
    C, P = cand_img.shape
    red = np.zeros((C, P), dtype=bool)
    rows = np.arange(C)[:, None]
    while True:
        new = red | (cand_img < 0) | red[rows, np.clip(cand_img, 0, None)] & (cand_img >= 0)
        for a in range(base_img.shape[0]):
            t = base_img[a]
            new |= (t < 0)[None, :] | (red[:, np.clip(t, 0, None)] & (t >= 0)[None, :])
        if (new == red).all():
            return red.sum(axis=1).astype(np.int64)
        red = new


def reducible_pair_counts(base_rows, cand_rows, n):
    """Reducible-pair count of ``base + candidate`` for every candidate map (complete maps only)."""
    base_img = pair_images(np.asarray(base_rows, dtype=np.int64).reshape(-1, n), n) if len(base_rows) else np.zeros((0, n * (n - 1) // 2), dtype=np.int64)
    cand_img = pair_images(np.asarray(cand_rows, dtype=np.int64).reshape(-1, n), n)
    base_img = np.ascontiguousarray(base_img, dtype=np.int64)
    cand_img = np.ascontiguousarray(cand_img, dtype=np.int64)
    if use_numba():
        return _red_counts_nb(base_img, cand_img)
    return _red_counts_np(base_img, cand_img)


# ---------------------------------------------------------------------------
# exhaustive enumeration of two-symbol automata


def all_maps(n, partial):
    """Every (partial) map on n states as rows of 0-based targets, -1 undefined; lexicographic."""
    vals = list(range(-1, n)) if partial else list(range(n))
    return np.array(list(itertools.product(vals, repeat=n)), dtype=np.int64).reshape(-1, n)


def map_codes(rows, n):
    pw = (n + 1) ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (np.asarray(rows) + 1) @ pw


def conjugacy_representatives(rows, n):
    """Least-code representative of each conjugacy class (under state permutations) among ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    codes = map_codes(rows, n)
    order = np.argsort(codes)
    rows, codes = rows[order], codes[order]
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    P = perms.shape[0]
    pw = (n + 1) ** np.arange(n - 1, -1, -1, dtype=np.int64)
    seen = np.zeros(rows.shape[0], dtype=bool)
    reps = []
    ridx = np.arange(P)[:, None]
    for i in range(rows.shape[0]):
        if seen[i]:
            continue
        reps.append(i)
        row = rows[i]
        vals = np.where(row >= 0, perms[:, np.clip(row, 0, None)] + 1, 0)
        tmp = np.zeros((P, n), dtype=np.int64)
        tmp[ridx, perms] = vals
        conj = tmp @ pw
        pos = np.searchsorted(codes, conj)
        seen[pos] = True
    return rows[reps]


@njit
def _restricts_nb(x, y, n):
    for q in range(n):
        if x[q] >= 0 and x[q] != y[q]:
            return False
    return True


@njit
def _is_id_restriction_nb(x, n):
    for q in range(n):
        if x[q] >= 0 and x[q] != q:
            return False
    return True


@njit
def _enum_pairs_nb(reps, maps, n, proper):
    N = 1 << n
    full = N - 1
    maxlen = N + 1
    counts = np.zeros(maxlen, dtype=np.int64)
    stamp = np.zeros(N, dtype=np.int64)
    dist = np.zeros(N, dtype=np.int64)
    queue = np.empty(N, dtype=np.int64)
    delta = np.empty((2, n), dtype=np.int64)
    run = 0
    nonsync = 0
    for i in range(reps.shape[0]):
        a = reps[i]
        if _is_id_restriction_nb(a, n):
            continue
        a_partial = False
        for q in range(n):
            if a[q] < 0:
                a_partial = True
        for j in range(maps.shape[0]):
            b = maps[j]
            if _is_id_restriction_nb(b, n):
                continue
            if _restricts_nb(a, b, n) or _restricts_nb(b, a, n):
                continue
            if proper:
                partial = a_partial
                if not partial:
                    for q in range(n):
                        if b[q] < 0:
                            partial = True
                            break
                if not partial:
                    continue
            for q in range(n):
                delta[0, q] = a[q]
                delta[1, q] = b[q]
            run += 1
            stamp[full] = run
            dist[full] = 0
            queue[0] = full
            h = 0
            t = 1
            found = -1
            while h < t and found < 0:
                X = queue[h]
                h += 1
                for s in range(2):
                    Y = _img(delta, s, X, n)
                    if Y == 0 or stamp[Y] == run:
                        continue
                    stamp[Y] = run
                    dist[Y] = dist[X] + 1
                    if Y & (Y - 1) == 0:
                        found = dist[Y]
                        break
                    queue[t] = Y
                    t += 1
            if found >= 0:
                counts[found] += 1
            else:
                nonsync += 1
    return counts, nonsync


def _enum_pairs_np(reps, maps, n, proper):
    N = 1 << n
    full = N - 1
    counts = np.zeros(N + 1, dtype=np.int64)
    nonsync = 0
    subsets = np.arange(N, dtype=np.int64)
    ident = np.arange(n)
    id_restr = ((maps < 0) | (maps == ident)).all(axis=1)
    maps_partial = (maps < 0).any(axis=1)
    # image of every subset under every candidate b: shape (M, N)
    b_img = np.empty((maps.shape[0], N), dtype=np.int64)
    for j0 in range(0, maps.shape[0], 4096):
        blk = maps[j0:j0 + 4096]
        b_img[j0:j0 + blk.shape[0]] = images_np(blk, subsets).T
    for a in reps:
        if ((a < 0) | (a == ident)).all():
            continue
        a_img = images_np(a[None, :], subsets)[:, 0]
        ok = ~id_restr
        a_dom = a >= 0
        ok &= ~((maps[:, a_dom] == a[a_dom]).all(axis=1))  # a restricts b
        b_dom = maps >= 0
        ok &= ~(np.where(b_dom, maps == a[None, :], True).all(axis=1))  # b restricts a
        if proper and not (a < 0).any():
            ok &= maps_partial
        sel = np.flatnonzero(ok)
        if sel.size == 0:
            continue
        B = sel.size
        bi = b_img[sel]
        visited = np.zeros((B, N), dtype=bool)
        visited[:, full] = True
        frontier = np.zeros((B, N), dtype=bool)
        frontier[:, full] = True
        found = np.full(B, -1, dtype=np.int64)
        single = _is_singleton(subsets)
        d = 0
        while frontier.any():
            d += 1
            nxt = np.zeros((B, N), dtype=bool)
            r, c = np.nonzero(frontier)
            ya = a_img[c]
            yb = bi[r, c]
            nxt[r, ya] = True
            nxt[r, yb] = True
            nxt[:, 0] = False
            nxt &= ~visited
            hit = (nxt & single[None, :]).any(axis=1) & (found < 0)
            found[hit] = d
            nxt[found >= 0] = False
            visited |= nxt
            frontier = nxt
        np.add.at(counts, found[found >= 0], 1)
        nonsync += int((found < 0).sum())
    return counts, nonsync


def enumerate_pairs(reps, maps, n, proper):
    """Histogram of shortest (careful) sync lengths over basic pairs (a in reps, b in maps)."""
    reps = np.ascontiguousarray(reps, dtype=np.int64)
    maps = np.ascontiguousarray(maps, dtype=np.int64)
    if use_numba():
        counts, nonsync = _enum_pairs_nb(reps, maps, n, proper)
    else:
        counts, nonsync = _enum_pairs_np(reps, maps, n, proper)
    return np.asarray(counts), int(nonsync)
