"""Exhaustive searches: critical DFAs, extremal PFAs and length enumeration.

Both depth-first searches share :class:`_Engine`, which owns the explicit
stack, the visited set of canonical keys, the node budget and JSON
checkpoints. Worker processes each take a disjoint slice of the root list;
results are merged, deduplicated by canonical form and sorted.
"""
from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .automaton import UNDEF, Automaton, canonical_key_of, image_bits, popcount
from .bounds import bound_report
from .sync import shortest_sync

KINDS = ("dfa", "pfa", "proper-pfa")


class BudgetExhausted(RuntimeError):
    def __init__(self, message, checkpoint=None, partial=None):
        super().__init__(message)
        self.checkpoint = checkpoint
        self.partial = partial


@dataclass
class SearchTask:
    n: int
    kind: str = "dfa"
    target: int = 0
    max_symbols: Optional[int] = None
    mode: str = "find-extremal"
    budget: Optional[int] = None
    checkpoint: Optional[str] = None
    checkpoint_every: int = 5000
    resume: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.budget is None:
            env = os.environ.get("SYNCHROLAB_BUDGET")
            self.budget = int(env) if env else 0


@dataclass
class Found:
    automaton: Automaton
    length: int
    word: Optional[tuple] = None
    symbol_estimate: Optional[int] = None

    def to_dict(self):
        from .automaton import serialize_automaton

        out = {
            "length": self.length,
            "symbols": self.automaton.k,
            "automaton": serialize_automaton(self.automaton),
            "word": None if self.word is None else " ".join(self.automaton.symbols[i] for i in self.word),
        }
        if self.symbol_estimate is not None:
            out["symbol_estimate"] = self.symbol_estimate
        return out


@dataclass
class SearchResult:
    found: list = field(default_factory=list)
    lengths: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    complete: bool = True

    def to_dict(self):
        return {
            "found": [f.to_dict() for f in self.found],
            "lengths": {k: v for k, v in self.lengths.items()},
            "stats": dict(self.stats),
            "complete": self.complete,
        }


# ---------------------------------------------------------------------------
# generic DFS engine


class _Engine:
    """Explicit-stack DFS; subclasses provide roots, key, visit and children."""

    name = "dfs"

    def __init__(self, task: SearchTask, roots, ckpt_path=None):
        self.task = task
        self.roots = list(roots)
        self.ckpt_path = ckpt_path
        self.visited = set()
        self.found = {}
        self.stats = {"nodes": 0}
        self.stack = []  # frames: [node, children or None, next index]
        self.root_pos = 0

    # hooks -------------------------------------------------------------
    def key(self, node):
        raise NotImplementedError

    def visit(self, node):
        """Evaluate a node; return True when its children should be explored."""
        raise NotImplementedError

    def children(self, node):
        raise NotImplementedError

    def encode(self, node):
        return node

    def decode(self, obj):
        return obj

    def bump(self, what):
        self.stats[what] = self.stats.get(what, 0) + 1

    # driver ------------------------------------------------------------
    def _enter(self, node):
        k = self.key(node)
        if k in self.visited:
            self.bump("duplicates")
            return
        self.visited.add(k)
        self.stats["nodes"] += 1
        budget = self.task.budget
        if budget and self.stats["nodes"] > budget:
            self.visited.discard(k)
            self.stats["nodes"] -= 1
            raise BudgetExhausted("node budget exhausted")
        if self.visit(node):
            self.stack.append([node, None, 0])
        if self.ckpt_path and self.stats["nodes"] % self.task.checkpoint_every == 0:
            self.save()

    def run(self):
        try:
            while True:
                if not self.stack:
                    if self.root_pos >= len(self.roots):
                        break
                    node = self.roots[self.root_pos]
                    self.root_pos += 1
                    self._enter(node)
                    continue
                frame = self.stack[-1]
                if frame[1] is None:
                    frame[1] = self.children(frame[0])
                if frame[2] >= len(frame[1]):
                    self.stack.pop()
                    continue
                child = frame[1][frame[2]]
                frame[2] += 1
                self._enter(child)
        except BudgetExhausted as exc:
            # the node that tripped the budget has to be retried on resume
            if self.stack and self.stack[-1][2] > 0 and self.stack[-1][1] is not None:
                self.stack[-1][2] -= 1
            elif not self.stack:
                self.root_pos -= 1
            if self.ckpt_path:
                self.save()
            exc.checkpoint = self.ckpt_path
            raise
        if self.ckpt_path and os.path.exists(self.ckpt_path):
            os.remove(self.ckpt_path)

    # checkpointing -----------------------------------------------------
    def state(self):
        return {
            "engine": self.name,
            "n": self.task.n,
            "kind": self.task.kind,
            "target": self.task.target,
            "root_pos": self.root_pos,
            "stack": [[self.encode(f[0]), f[2]] for f in self.stack],
            "visited": [list(k) if isinstance(k, tuple) else k for k in self.visited],
            "found": [[self.encode(v[0]), v[1]] for v in self.found.values()],
            "stats": self.stats,
        }

    def save(self):
        tmp = self.ckpt_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(self.state(), fh)
        os.replace(tmp, self.ckpt_path)

    def load(self, path):
        with open(path, encoding="utf-8") as fh:
            st = json.load(fh)
        if st["engine"] != self.name or st["n"] != self.task.n or st["target"] != self.task.target:
            raise ValueError("checkpoint does not match the search task")
        self.root_pos = st["root_pos"]
        self.stack = [[self.decode(node), None, idx] for node, idx in st["stack"]]
        self.visited = {_tuplify(k) for k in st["visited"]}
        self.stats = st["stats"]
        for node, length in st["found"]:
            node = self.decode(node)
            self.found[self.key(node)] = (node, length)


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(y) for y in x)
    return x


def _map_code(row, n):
    c = 0
    for t in row:
        c = c * (n + 1) + (int(t) + 1)
    return c


def _automaton(rows, n, names=None):
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, n)
    names = names or [_symbol_name(i) for i in range(rows.shape[0])]
    return Automaton(n, names, rows)


def _symbol_name(i):
    letters = "abcdefghijklmnopqrstuvwxyz"
    return letters[i] if i < 26 else f"x{i}"


# ---------------------------------------------------------------------------
# critical DFA search


class _CriticalDFA(_Engine):
    name = "critical-dfa"

    def __init__(self, task, roots, ckpt_path=None):
        super().__init__(task, roots, ckpt_path)
        n = task.n
        maps = kernels.all_maps(n, partial=False)
        ident = np.arange(n)
        self.maps = maps[~(maps == ident).all(axis=1)]
        self.codes = kernels.map_codes(self.maps, n)
        self.npairs = n * (n - 1) // 2

    def key(self, node):
        return canonical_key_of(_automaton(node, self.task.n))

    def encode(self, node):
        return [list(map(int, r)) for r in node]

    def decode(self, obj):
        return tuple(tuple(r) for r in obj)

    def visit(self, node):
        n = self.task.n
        aut = _automaton(node, n)
        rep = shortest_sync(aut)
        if rep.synchronizing:
            if rep.length >= self.task.target:
                self.found[self.key(node)] = (node, rep.length)
                self.bump("hits")
                return self._room(node)
            self.bump("pruned_fast")
            return False
        if n > 1:
            lpp = bound_report(aut).Lpp
            if lpp < self.task.target:
                self.bump("pruned_bound")
                return False
        return self._room(node)

    def _room(self, node):
        cap = self.task.max_symbols
        return cap is None or len(node) < cap

    def children(self, node):
        n = self.task.n
        rows = np.array(node, dtype=np.int64).reshape(-1, n)
        have = set(_map_code(r, n) for r in rows)
        keep = np.array([c not in have for c in self.codes])
        cand = self.maps[keep]
        codes = self.codes[keep]
        counts = kernels.reducible_pair_counts(rows, cand, n)
        aut = _automaton(node, n)
        if not shortest_sync(aut).synchronizing:
            base = kernels.reducible_pair_counts(rows[1:], rows[:1], n)[0]
            ok = counts > base
            cand, codes, counts = cand[ok], codes[ok], counts[ok]
        # synchronizing children below target are leaves; drop them in bulk
        lengths = kernels.sync_lengths_batch(rows, cand, n)
        short = (lengths >= 0) & (lengths < self.task.target)
        self.stats["pruned_fast"] = self.stats.get("pruned_fast", 0) + int(short.sum())
        cand, codes, counts, lengths = cand[~short], codes[~short], counts[~short], lengths[~short]
        # likewise non-synchronizing children whose bound is below target
        lpp = kernels.lpp_batch(rows, cand, n, todo=lengths < 0)
        weak = (lengths < 0) & (lpp < self.task.target)
        self.stats["pruned_bound"] = self.stats.get("pruned_bound", 0) + int(weak.sum())
        cand, codes, counts = cand[~weak], codes[~weak], counts[~weak]
        order = np.lexsort((codes, -counts))
        out = []
        for i in order:
            new = sorted([tuple(map(int, r)) for r in rows] + [tuple(map(int, cand[i]))],
                         key=lambda r: _map_code(r, n))
            out.append(tuple(new))
        return out


def _dfa_roots(n):
    maps = kernels.all_maps(n, partial=False)
    ident = np.arange(n)
    maps = maps[~(maps == ident).all(axis=1)]
    reps = kernels.conjugacy_representatives(maps, n) if n > 1 else maps
    return [(tuple(map(int, r)),) for r in reps]


def search_critical_dfa(task: SearchTask) -> SearchResult:
    """All basic DFAs on n states (up to isomorphism) whose shortest synchronizing word has length >= target."""
    if task.kind != "dfa":
        raise ValueError("critical search works on complete automata")
    if task.n < 2:
        raise ValueError("need n >= 2")
    roots = _dfa_roots(task.n)
    return _run(task, _CriticalDFA, roots, _finish_dfa)


def _finish_dfa(task, found):
    out = []
    for node, length in found:
        aut = _automaton(node, task.n)
        out.append(Found(aut, length, shortest_sync(aut).witness))
    return out


# ---------------------------------------------------------------------------
# extremal PFA search (prefix words)


class _PrefixPFA(_Engine):
    name = "extremal-pfa"

    def key(self, node):
        rows, word = node
        n = self.task.n
        aut = _automaton(rows, n)
        qw = _run_bits(aut, word)
        key, _ = kernels.canonical_key(aut.delta, n, sort_rows=False, extra=qw)
        return key

    def encode(self, node):
        rows, word = node
        return [[list(map(int, r)) for r in rows], list(word)]

    def decode(self, obj):
        rows, word = obj
        return (tuple(tuple(r) for r in rows), tuple(word))

    def visit(self, node):
        rows, word = node
        n = self.task.n
        target = self.task.target
        aut = _automaton(rows, n)
        full = (1 << n) - 1
        qw = _run_bits(aut, word)
        L = len(word)
        dist = _bfs_dist(aut, full)
        # rule 1: a shorter word over the same letters reaches Qw (or a singleton)
        if dist.get(qw, L) < L:
            self.bump("pruned_rule1")
            return False
        single = [d for x, d in dist.items() if popcount(x) == 1]
        shortest = min(single) if single else None
        if popcount(qw) == 1 and shortest is not None and shortest < L:
            self.bump("pruned_rule1")
            return False
        # rule 2: the letters already synchronize too fast
        if shortest is not None and shortest < target:
            self.bump("pruned_rule2")
            return False
        if popcount(qw) == 1:
            self.found[self.key(node)] = (node, L)
            self.bump("hits")
            return False
        # rule 3: the bound for every synchronizing extension is too small
        if shortest is None and rows and n > 1:
            if bound_report(aut).Lpp < target:
                self.bump("pruned_rule3")
                return False
        return True

    def children(self, node):
        rows, word = node
        n = self.task.n
        aut = _automaton(rows, n)
        qw = _run_bits(aut, word)
        images = []
        out = []
        for a in range(len(rows)):
            img = image_bits(aut.delta, a, qw)
            if img == 0 or img in images:
                if img != 0:
                    images.append(img)
                continue
            images.append(img)
            out.append((rows, word + (a,)))
        cap = self.task.max_symbols
        if cap is not None and len(rows) >= cap:
            return out
        members = [q for q in range(n) if (qw >> q) & 1]
        seen_imgs = set(images)
        for targets in itertools.product(range(n), repeat=len(members)):
            img = 0
            for t in targets:
                img |= 1 << t
            if img in seen_imgs:
                continue
            row = [UNDEF] * n
            for q, t in zip(members, targets):
                row[q] = t
            out.append((rows + (tuple(row),), word + (len(rows),)))
        return out


def _run_bits(aut, word):
    bits = (1 << aut.n) - 1
    for a in word:
        bits = image_bits(aut.delta, a, bits)
    return bits


def _bfs_dist(aut, start):
    dist = {start: 0}
    frontier = [start]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for X in frontier:
            for a in range(aut.k):
                Y = image_bits(aut.delta, a, X)
                if Y and Y not in dist:
                    dist[Y] = d
                    nxt.append(Y)
        frontier = nxt
    return dist


def search_extremal_pfa(task: SearchTask) -> SearchResult:
    """PFAs whose shortest carefully synchronizing word has length >= target, built from prefix words."""
    if task.kind == "dfa":
        raise ValueError("prefix-word search builds partial automata")
    roots = [((), ())]
    return _run(task, _PrefixPFA, roots, _finish_pfa)


def _finish_pfa(task, found):
    out = []
    for (rows, word), length in found:
        aut = _automaton(rows, task.n)
        out.append(Found(aut, length, tuple(word), estimate_symbols(aut)))
    return out


# ---------------------------------------------------------------------------
# running, threading, merging


def _worker(args):
    task, cls_name, roots, ckpt = args
    cls = {"critical-dfa": _CriticalDFA, "extremal-pfa": _PrefixPFA}[cls_name]
    eng = cls(task, roots, ckpt)
    if task.resume and ckpt and os.path.exists(ckpt):
        eng.load(ckpt)
    exhausted = None
    try:
        eng.run()
    except BudgetExhausted as exc:
        exhausted = exc.checkpoint or ""
    found = [(eng.decode(eng.encode(v[0])), v[1]) for v in eng.found.values()]
    return found, eng.stats, exhausted


def _run(task, cls, roots, finish):
    threads = max(1, int(task.threads))
    if threads == 1:
        parts = [(task, cls.name, roots, task.checkpoint)]
        results = [_worker(parts[0])]
    else:
        parts = []
        for i in range(threads):
            ck = f"{task.checkpoint}.w{i}" if task.checkpoint else None
            parts.append((task, cls.name, roots[i::threads], ck))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_worker, parts))
    merged = {}
    stats = {}
    exhausted = []
    for found, st, ex in results:
        for node, length in found:
            aut = _automaton(node if cls is _CriticalDFA else node[0], task.n)
            merged.setdefault(canonical_key_of(aut), (node, length))
        for k, v in st.items():
            stats[k] = stats.get(k, 0) + v
        if ex is not None:
            exhausted.append(ex)
    items = sorted(merged.items(), key=lambda kv: (-kv[1][1], kv[0]))
    res = SearchResult(found=finish(task, [v for _, v in items]), stats=stats, complete=not exhausted)
    if exhausted:
        raise BudgetExhausted(
            "node budget exhausted",
            checkpoint=",".join(e for e in exhausted if e) or None,
            partial=res,
        )
    return res


# ---------------------------------------------------------------------------
# alphabet minimization of search solutions


def _compatible(x, y):
    both = (x >= 0) & (y >= 0)
    return bool((x[both] == y[both]).all())


def estimate_symbols(aut: Automaton) -> int:
    """Lower bound on the alphabet size that merging compatible symbols can reach.

    Symbols that disagree on a commonly defined state never share a block, so
    any set of pairwise incompatible symbols bounds the count from below; the
    set is grown greedily in symbol order. Reported only, never used to prune.
    """
    d = np.asarray(aut.delta)
    clique = []
    for i in range(aut.k):
        if all(not _compatible(d[i], d[j]) for j in clique):
            clique.append(i)
    return len(clique)


def _partitions(items):
    """Set partitions of ``items`` (lists of blocks), fewest blocks first."""
    items = list(items)
    all_parts = []

    def rec(i, blocks):
        if i == len(items):
            all_parts.append([list(b) for b in blocks])
            return
        for b in blocks:
            b.append(items[i])
            rec(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    all_parts.sort(key=len)
    return all_parts


def postprocess_minimize_alphabet(aut: Automaton, target_length: int, limit_symbols: int = 12) -> list:
    """Merge pairwise compatible symbols into unions; keep variants still needing >= target letters.

    Returns the surviving variants with the fewest distinct symbols, deduplicated
    by canonical form. A complete automaton has nothing to complete and comes
    back unchanged.
    """
    d = np.asarray(aut.delta)
    if (d >= 0).all():
        return [aut]
    if aut.k > limit_symbols:
        raise ValueError(f"too many symbols to postprocess ({aut.k} > {limit_symbols})")
    n = aut.n
    ident = np.arange(n)
    compat = [[_compatible(d[i], d[j]) for j in range(aut.k)] for i in range(aut.k)]
    best = None
    out = {}
    for part in _partitions(range(aut.k)):
        if best is not None and len(part) > best:
            break
        if any(not compat[i][j] for b in part for i in b for j in b):
            continue
        rows = []
        for b in part:
            row = np.full(n, UNDEF, dtype=np.int64)
            for i in b:
                row = np.where(d[i] >= 0, d[i], row)
            rows.append(row)
        rows = [r for r in rows if not ((r < 0) | (r == ident)).all()]
        uniq = []
        for r in rows:
            if not any(np.array_equal(r, u) for u in uniq):
                uniq.append(r)
        cand = _automaton(uniq, n)
        rep = shortest_sync(cand)
        if not rep.synchronizing or rep.length < target_length:
            continue
        size = len(uniq)
        if best is None or size < best:
            best = size
            out = {}
        if size == best:
            out.setdefault(canonical_key_of(cand), cand)
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# enumeration of achievable lengths


def enumerate_lengths(n: int, num_symbols: int = 2, kind: str = "dfa", budget: Optional[int] = None):
    """Histogram ``{length: count}`` over basic automata of the given kind (representatives per class of the first symbol)."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if n > 10:
        raise ValueError("enumeration supports n <= 10")
    partial = kind != "dfa"
    proper = kind == "proper-pfa"
    maps = kernels.all_maps(n, partial)
    reps = kernels.conjugacy_representatives(maps, n)
    if budget is None:
        env = os.environ.get("SYNCHROLAB_BUDGET")
        budget = int(env) if env else 0
    if num_symbols == 1:
        hist = {}
        for a in reps:
            ident = (a < 0) | (a == np.arange(n))
            if ident.all() or (proper and not (a < 0).any()):
                continue
            r = kernels.sync_bfs(a[None, :], n, (1 << n) - 1)[0]
            if r >= 0:
                hist[r] = hist.get(r, 0) + 1
        return dict(sorted(hist.items()))
    if num_symbols == 2:
        if budget and len(reps) * len(maps) > budget:
            raise BudgetExhausted(f"{len(reps) * len(maps)} pairs exceed the budget {budget}")
        counts, _ = kernels.enumerate_pairs(reps, maps, n, proper)
        return {int(i): int(c) for i, c in enumerate(counts) if c}
    return _enumerate_general(n, num_symbols, reps, maps, proper, budget)


def _enumerate_general(n, k, reps, maps, proper, budget):
    ident = np.arange(n)
    maps = [m for m in maps if not ((m < 0) | (m == ident)).all()]
    codes = [_map_code(m, n) for m in maps]
    hist = {}
    seen = 0
    for a in reps:
        if ((a < 0) | (a == ident)).all():
            continue
        for combo in itertools.combinations(range(len(maps)), k - 1):
            seen += 1
            if budget and seen > budget:
                raise BudgetExhausted("enumeration budget exhausted")
            rows = [a] + [maps[i] for i in combo]
            if any(_map_code(a, n) == codes[i] for i in combo):
                continue
            if proper and not any((r < 0).any() for r in rows):
                continue
            if not _basic_rows(rows):
                continue
            length, _ = kernels.sync_bfs(np.array(rows), n, (1 << n) - 1)
            if length >= 0:
                hist[length] = hist.get(length, 0) + 1
    return dict(sorted(hist.items()))


def _basic_rows(rows):
    for i, x in enumerate(rows):
        for j, y in enumerate(rows):
            if i != j:
                dom = x >= 0
                if (x[dom] == y[dom]).all():
                    return False
    return True


def length_ranges(lengths) -> str:
    """Compact range text such as ``1-23, 26``."""
    vals = sorted(lengths)
    parts = []
    for _, grp in itertools.groupby(enumerate(vals), lambda iv: iv[1] - iv[0]):
        g = [v for _, v in grp]
        parts.append(str(g[0]) if len(g) == 1 else f"{g[0]}-{g[-1]}")
    return ", ".join(parts)
