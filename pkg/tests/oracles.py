"""Independent reference implementations used only by the tests.

Everything here works on plain Python sets and lists so that it shares no
code path with the bitmask kernels it checks.
"""
import itertools
from collections import deque

INF = float("inf")


def rows_of(aut):
    """Per-symbol lists of 1-based targets, None for undefined."""
    return [[None if t < 0 else int(t) + 1 for t in aut.delta[a]] for a in range(aut.k)]


def img(rows, a, V):
    out = set()
    for q in V:
        t = rows[a][q - 1]
        if t is None:
            return frozenset()
        out.add(t)
    return frozenset(out)


def run(rows, V, word):
    V = frozenset(V)
    for a in word:
        if not V:
            return V
        V = img(rows, a, V)
    return V


def shortest_sync(aut):
    """(length, lexicographically least shortest word) or (None, None)."""
    rows = rows_of(aut)
    Q = frozenset(range(1, aut.n + 1))
    if len(Q) == 1:
        return 0, ()
    prev = {Q: ()}
    dq = deque([Q])
    while dq:
        V = dq.popleft()
        for a in range(aut.k):
            W = img(rows, a, V)
            if W and W not in prev:
                prev[W] = prev[V] + (a,)
                if len(W) == 1:
                    return len(prev[W]), prev[W]
                dq.append(W)
    return None, None


def count_words(aut, length):
    """Number of words of the given length taking Q to a singleton (brute force)."""
    rows = rows_of(aut)
    Q = frozenset(range(1, aut.n + 1))
    return sum(1 for w in itertools.product(range(aut.k), repeat=length) if len(run(rows, Q, w)) == 1)


def subsets(n):
    for r in range(1, n + 1):
        for c in itertools.combinations(range(1, n + 1), r):
            yield frozenset(c)


def floyd_warshall(aut):
    """dist[(S, T)] over nonempty subsets via Floyd-Warshall on the power automaton."""
    rows = rows_of(aut)
    nodes = list(subsets(aut.n))
    idx = {S: i for i, S in enumerate(nodes)}
    N = len(nodes)
    d = [[INF] * N for _ in range(N)]
    for i, S in enumerate(nodes):
        d[i][i] = 0
        for a in range(aut.k):
            T = img(rows, a, S)
            if T:
                d[i][idx[T]] = min(d[i][idx[T]], 1)
    for m in range(N):
        dm = d[m]
        for i in range(N):
            dim = d[i][m]
            if dim == INF:
                continue
            di = d[i]
            for j in range(N):
                v = dim + dm[j]
                if v < di[j]:
                    di[j] = v
    return nodes, d


def to_bits(S):
    return sum(1 << (q - 1) for q in S)


def canonical_bruteforce(aut, sort_symbols=True):
    """Least tuple of relabeled rows over all state permutations."""
    rows = rows_of(aut)
    n = aut.n
    best = None
    for perm in itertools.permutations(range(1, n + 1)):
        new_rows = []
        for r in rows:
            nr = [0] * n
            for q in range(1, n + 1):
                t = r[q - 1]
                nr[perm[q - 1] - 1] = 0 if t is None else perm[t - 1]
            new_rows.append(tuple(nr))
        key = tuple(sorted(new_rows)) if sort_symbols else tuple(new_rows)
        if best is None or key < best:
            best = key
    return best


def rewrite_rules(h, m):
    """Explicit (lhs, rhs) letter tuples of R_{h,m}; 0 = C, t = A^(t)."""
    rules = []
    for i in range(h + 1):
        for t in range(1, m):
            lhs = (0,) * i + (m,) * (h - i) + (t,)
            rhs = (0,) * i + (1,) * (h - i) + (t + 1,)
            rules.append((lhs, rhs))
    return rules


def rewrite_successors(rules, u):
    out = []
    for lhs, rhs in rules:
        L = len(lhs)
        for p in range(len(u) - L + 1):
            if tuple(u[p:p + L]) == lhs:
                v = tuple(u[:p]) + rhs + tuple(u[p + L:])
                if v not in out:
                    out.append(v)
    return out


def rewrite_min_steps(h, m, k):
    """BFS over strings with the explicit rule list, to any string ending in A^(m)."""
    rules = rewrite_rules(h, m)
    u0 = (0,) * h + (1,) * (k - h)
    seen = {u0}
    frontier = [u0]
    d = 0
    while frontier:
        if any(u[-1] == m for u in frontier):
            return d
        d += 1
        nxt = []
        for u in frontier:
            for v in rewrite_successors(rules, u):
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return None


def fib(i):
    a, b = 0, 1
    for _ in range(i):
        a, b = b, a + b
    return a


def bounds_L_Lprime(aut):
    """(|S|, m, M, L, L') from the distance recipe, components by mutual reachability."""
    nodes, d = floyd_warshall(aut)
    Q = nodes.index(frozenset(range(1, aut.n + 1)))
    reach = [j for j in range(len(nodes)) if d[Q][j] < INF]
    s = min(len(nodes[j]) for j in reach)
    m = min(d[Q][j] for j in reach if len(nodes[j]) == s)
    M = max(d[Q][j] for j in reach if len(nodes[j]) == s)

    def reducible(i):
        return any(d[i][j] < INF and len(nodes[j]) < len(nodes[i]) for j in range(len(nodes)))

    def components(members):
        comps, left = [], list(members)
        while left:
            i = left[0]
            comp = [j for j in left if d[i][j] < INF and d[j][i] < INF]
            comps.append(comp)
            left = [j for j in left if j not in comp]
        return comps

    def tour(comps):
        return sum(1 + max(d[x][y] for x in c for y in c) for c in comps)

    total = 0
    for size in range(2, s + 1):
        same = [i for i, S in enumerate(nodes) if len(S) == size]
        irr = [i for i in same if not reducible(i)]
        red = [i for i in same if reducible(i)]
        l_k = max((min(d[i][j] for j in range(len(nodes)) if len(nodes[j]) < size) for i in red), default=0)
        total += tour(components(irr)) + l_k
    L = total + m
    if s == 1:
        return s, m, M, L, m
    top = [i for i in range(len(nodes)) if len(nodes[i]) == s and not reducible(i)]
    c = tour([comp for comp in components(top) if comp[0] in reach])
    return s, m, M, L, total - c + 1 + M
