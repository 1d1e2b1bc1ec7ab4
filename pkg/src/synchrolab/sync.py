"""Shortest (careful) synchronization via breadth-first search on the power automaton."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

from . import kernels
from .automaton import Automaton, StateSet, image_bits, is_complete, popcount, to_i64

MAX_TABLE_STATES = 12


@dataclass(frozen=True)
class SyncReport:
    synchronizing: bool
    length: Optional[int] = None
    witness: Optional[tuple] = None
    shortest_count: Optional[int] = None
    symbols: tuple = field(default=(), repr=False)

    def witness_text(self, sep=""):
        if self.witness is None:
            return None
        return sep.join(self.symbols[i] for i in self.witness)

    def to_dict(self):
        return {
            "synchronizing": self.synchronizing,
            "length": self.length,
            "witness": self.witness_text(" ") if self.witness is not None else None,
            "shortest_count": self.shortest_count,
        }


class NodeLimitExceeded(RuntimeError):
    pass


def _start_bits(aut, start):
    if start is None:
        return (1 << aut.n) - 1
    return start.bits if isinstance(start, StateSet) else int(start)


def shortest_sync(aut: Automaton, start=None, max_nodes: int = 0) -> SyncReport:
    """Shortest word taking ``start`` (default: all states) to a singleton.

    The witness is the least shortest word in symbol-table order.
    """
    bits = _start_bits(aut, start)
    length, w = kernels.sync_bfs(aut.delta, aut.n, to_i64(bits), max_nodes)
    if length == -2:
        raise NodeLimitExceeded(f"power-automaton BFS exceeded {max_nodes} nodes")
    if length < 0:
        return SyncReport(False, symbols=aut.symbols)
    return SyncReport(True, length, w, symbols=aut.symbols)


def count_shortest(aut: Automaton, start=None) -> SyncReport:
    """Like :func:`shortest_sync`, also counting the distinct shortest synchronizing words."""
    rep = shortest_sync(aut, start)
    if not rep.synchronizing:
        return rep
    if rep.length == 0:
        return SyncReport(True, 0, (), 1, aut.symbols)
    bits = to_i64(_start_bits(aut, start))
    levels = kernels.bfs_levels(aut.delta, aut.n, bits)
    counts = np.array([1], dtype=object)
    for d in range(len(levels) - 1):
        cur, nxt = levels[d], levels[d + 1]
        imgs = kernels.images_np(aut.delta, cur)  # (F, k)
        pos = np.searchsorted(nxt, imgs)
        pos_c = np.minimum(pos, nxt.size - 1)
        hit = nxt[pos_c] == imgs
        src = np.broadcast_to(np.arange(cur.size)[:, None], imgs.shape)[hit]
        new = np.zeros(nxt.size, dtype=object)
        np.add.at(new, pos_c[hit], counts[src])
        counts = new
    last = levels[-1]
    total = int(sum(counts[kernels._is_singleton(last)]))
    return SyncReport(True, rep.length, rep.witness, total, aut.symbols)


def all_pairs_reducible(aut: Automaton) -> bool:
    """Pair criterion for DFAs: every pair of states can be merged."""
    if not is_complete(aut):
        raise ValueError("pair-reducibility characterizes synchronization of complete automata only")
    n = aut.n
    if n == 1:
        return True
    delta = np.asarray(aut.delta)
    counts = kernels.reducible_pair_counts(delta[:-1], delta[-1:], n)
    return int(counts[0]) == n * (n - 1) // 2


@lru_cache(maxsize=None)
def subset_sizes(n: int) -> np.ndarray:
    sizes = np.zeros(1 << n, dtype=np.int64)
    for q in range(n):
        sizes += (np.arange(1 << n) >> q) & 1
    sizes.flags.writeable = False
    return sizes


class SubsetDistances:
    """All-pairs distances between nonempty subsets (indexable by bitmask)."""

    def __init__(self, aut: Automaton):
        if aut.n > MAX_TABLE_STATES:
            raise ValueError(f"subset distance table needs n <= {MAX_TABLE_STATES}, got {aut.n}")
        self.n = aut.n
        self.D = kernels.subset_distances(aut.delta, aut.n)
        self.sizes = subset_sizes(aut.n)

    @cached_property
    def best(self):
        """best[S, i] = min distance from S to a nonempty set of size <= i."""
        N = 1 << self.n
        best = np.full((N, self.n + 1), kernels.INF, dtype=np.int32)
        for i in range(1, self.n + 1):
            cols = (self.sizes <= i) & (self.sizes > 0)
            best[:, i] = self.D[:, cols].min(axis=1)
        return best

    @staticmethod
    def _bits(S):
        return S.bits if isinstance(S, StateSet) else int(S)

    def dist(self, S, T):
        d = int(self.D[self._bits(S), self._bits(T)])
        return None if d >= kernels.INF else d

    def min_to_size(self, S, i):
        d = int(self.best[self._bits(S), i])
        return None if d >= kernels.INF else d


def subset_distance_table(aut: Automaton) -> SubsetDistances:
    return SubsetDistances(aut)


def reduction_length(aut: Automaton, S) -> Optional[int]:
    """Length of a shortest w with 0 < |Sw| < |S|; ``None`` when S cannot be reduced."""
    bits = S.bits if isinstance(S, StateSet) else int(S)
    size = popcount(bits)
    if size < 2:
        raise ValueError("reduction needs a set of at least two states")
    delta = aut.delta
    seen = {bits}
    frontier = [bits]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for X in frontier:
            for a in range(aut.k):
                Y = image_bits(delta, a, X)
                if Y == 0 or Y in seen:
                    continue
                if popcount(Y) < size:
                    return d
                seen.add(Y)
                nxt.append(Y)
        frontier = nxt
    return None


def is_synchronizing(aut: Automaton) -> bool:
    return shortest_sync(aut).synchronizing


__all__ = [
    "SyncReport",
    "NodeLimitExceeded",
    "shortest_sync",
    "count_shortest",
    "all_pairs_reducible",
    "SubsetDistances",
    "subset_distance_table",
    "reduction_length",
    "is_synchronizing",
]
