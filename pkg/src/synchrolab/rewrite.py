"""String-rewrite systems behind the exponential constructions.

Strings are tuples over ``{0, 1, ..., M}`` where 0 is the letter C and t is
A^(t); in the (h, m) systems A = A^(1) and B = A^(m). The family ``hm``
has the rules ``C^i B^(h-i) A^(t) -> C^i A^(h-i) A^(t+1)`` for t < m; the
``cyclic`` family (h = 1) adds the overshoot letters A^(m+1)..A^(2m-2) and
wraps A^(2m-2) around to A^(1).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels

C = 0


@dataclass(frozen=True)
class RSystem:
    family: str  # "hm" or "cyclic"
    h: int
    m: int

    def __post_init__(self):
        if self.family not in ("hm", "cyclic"):
            raise ValueError(f"unknown rewrite family {self.family!r}")
        if self.h < 1 or self.m < 2:
            raise ValueError("need h >= 1 and m >= 2")
        if self.family == "cyclic" and (self.h != 1 or self.m < 3):
            raise ValueError("the cyclic system needs h = 1 and m >= 3")

    @property
    def M(self) -> int:
        return self.m if self.family == "hm" else 2 * self.m - 2

    @property
    def code(self) -> int:
        return 0 if self.family == "hm" else 1

    def start(self, k: int) -> tuple:
        return (C,) * self.h + (1,) * (k - self.h)

    def is_target(self, u) -> bool:
        return u[-1] >= self.m


def system_R() -> RSystem:
    """The Fibonacci system: BBA -> AAB, CBA -> CAB, CCA -> CCB."""
    return RSystem("hm", 2, 2)


def system_hm(h: int, m: int) -> RSystem:
    return RSystem("hm", h, m)


def system_cyclic(m: int) -> RSystem:
    return RSystem("cyclic", 1, m)


_TOKEN = re.compile(r"C|A\(?(\d+)\)?|A|B|\s+")


def parse_rstring(text: str, m: int = 2) -> tuple:
    """Parse ``CCABA`` or ``C A2 A3``-style text (A = A1, B = A{m})."""
    out = []
    pos = 0
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ValueError(f"bad rewrite letter at {text[pos:]!r}")
        tok = mt.group(0)
        pos = mt.end()
        if tok.isspace():
            continue
        if tok == "C":
            out.append(C)
        elif tok == "B":
            out.append(m)
        elif tok == "A":
            out.append(1)
        else:
            out.append(int(mt.group(1)))
    return tuple(out)


def format_rstring(u, m: int = 2) -> str:
    """Compact ``CCABA`` when m = 2, else ``C A2 A1``; either form parses back."""
    if m == 2 and all(x in (0, 1, 2) for x in u):
        return "".join("C" if x == 0 else ("A" if x == 1 else "B") for x in u)
    return " ".join("C" if x == 0 else f"A{x}" for x in u)


def successors(sys: RSystem, u) -> list:
    """All one-step rewrites of u, in order of the rewritten position."""
    u = tuple(u)
    k = len(u)
    h, m, M = sys.h, sys.m, sys.M
    out = []
    for e in range(k):
        t = u[e]
        if t == C:
            continue
        if sys.family == "hm":
            if t >= m or e < h:
                continue
            window = u[e - h:e]
            i = 0
            while i < h and window[i] == C:
                i += 1
            if any(x != m for x in window[i:]):
                continue
            v = u[:e - h] + (C,) * i + (1,) * (h - i) + (t + 1,) + u[e + 1:]
        else:
            if e < 1:
                continue
            nt = t + 1 if t < M else 1
            s = u[e - 1]
            if s == C:
                v = u[:e] + (nt,) + u[e + 1:]
            elif s >= m:
                v = u[:e - 1] + (s - (m - 1), nt) + u[e + 1:]
            else:
                continue
        if v not in out:
            out.append(v)
    return out


def rule_position(u, v) -> int:
    """0-based index of the letter rewritten by the step u -> v (the rightmost change)."""
    diff = [i for i, (a, b) in enumerate(zip(u, v)) if a != b]
    if not diff:
        raise ValueError("strings are equal")
    return diff[-1]


# ---------------------------------------------------------------------------
# exact step counts (BFS oracle over strings with a fixed C-prefix)


def _check_prefix(sys, u):
    h = sys.h
    if len(u) <= h or any(x != C for x in u[:h]) or any(x == C for x in u[h:]):
        raise ValueError("oracle strings must be C^h followed by A-letters")
    if any(x > sys.M for x in u):
        raise ValueError("letter outside the system's alphabet")


def encode(sys, u) -> int:
    code = 0
    for x in reversed(u[sys.h:]):
        code = code * sys.M + (x - 1)
    return code


def decode(sys, code: int, k: int) -> tuple:
    letters = []
    for _ in range(k - sys.h):
        letters.append(code % sys.M + 1)
        code //= sys.M
    return (C,) * sys.h + tuple(letters)


def _bfs(sys, k, u0, stop):
    u0 = sys.start(k) if u0 is None else tuple(u0)
    if len(u0) != k:
        raise ValueError("start string has the wrong length")
    _check_prefix(sys, u0)
    found, dist, parent, _ = kernels.rewrite_bfs(sys.h, sys.m, k, sys.code, encode(sys, u0), stop)
    return u0, found, dist, parent


def min_steps_to_B(sys: RSystem, k: int, u0=None):
    """Least number of rewrite steps from u0 (default C^h A^(k-h)) to a target string, or None."""
    _, found, dist, _ = _bfs(sys, k, u0, True)
    return None if found < 0 else int(dist[found])


def derivation(sys: RSystem, k: int, u0=None) -> list:
    """A shortest derivation ``[u0, ..., target]``; empty when no target is reachable."""
    u0, found, dist, parent = _bfs(sys, k, u0, True)
    if found < 0:
        return []
    path = [found]
    while parent[path[-1]] >= 0:
        path.append(int(parent[path[-1]]))
    return [decode(sys, c, k) for c in reversed(path)]


def reachable_strings(sys: RSystem, k: int, u0=None, include_targets=False) -> set:
    """All strings reachable from u0 (targets are not expanded further)."""
    _, _, dist, _ = _bfs(sys, k, u0, False)
    out = set()
    for c in np.flatnonzero(dist >= 0):
        u = decode(sys, int(c), k)
        if include_targets or not sys.is_target(u):
            out.add(u)
    return out


def min_steps_bruteforce(sys: RSystem, u0, limit=10**6):
    """Plain-Python BFS over :func:`successors`; an independent check on the kernel."""
    u0 = tuple(u0)
    if sys.is_target(u0):
        return 0
    seen = {u0}
    frontier = [u0]
    d = 0
    while frontier and len(seen) < limit:
        d += 1
        nxt = []
        for u in frontier:
            for v in successors(sys, u):
                if v in seen:
                    continue
                if sys.is_target(v):
                    return d
                seen.add(v)
                nxt.append(v)
        frontier = nxt
    return None


# ---------------------------------------------------------------------------
# weights and recursions


@lru_cache(maxsize=None)
def _weights_B(h: int, m: int, k: int) -> tuple:
    """w_{i,m} for i = 1..k (index 0 unused); zero on the C-prefix."""
    w = [0] * (k + 1)
    for i in range(h + 1, k + 1):
        w[i] = (m - 1) * (1 + sum(w[j] for j in range(max(h + 1, i - h), i)))
    return tuple(w)


def letter_weight(h: int, m: int, i: int, t: int, k: int) -> int:
    """w_{i,t}: weight of A^(t) at 1-based position i."""
    if i <= h or t <= 1:
        return 0
    wB = _weights_B(h, m, k)
    base = 1 + sum(wB[j] for j in range(max(h + 1, i - h), i))
    return (t - 1) * base


def weight(sys: RSystem, u) -> int:
    u = tuple(u)
    h = sys.h
    if any(x == C for x in u[h:]):
        raise ValueError("weight is defined only for strings whose C's lie in the first h positions")
    k = len(u)
    return sum(letter_weight(h, sys.m, i + 1, t, k) for i, t in enumerate(u) if t != C)


def f_rec(h: int, m: int, k: int) -> int:
    """f(k) = (m-1)(1 + f(k-1) + ... + f(k-h)) for k > h, and 0 otherwise."""
    if h < 1 or m < 2:
        raise ValueError("need h >= 1 and m >= 2")
    vals = [0] * (max(k, 0) + 1)
    for j in range(h + 1, k + 1):
        vals[j] = (m - 1) * (1 + sum(vals[j - i] for i in range(1, h + 1) if j - i >= 1))
    return vals[k] if k >= 1 else 0


def g_rec(h: int, m: int, k: int) -> Fraction:
    """f shifted by the fixed point (m-1)/((m-1)h-1); undefined when (m-1)h = 1."""
    den = (m - 1) * h - 1
    if den == 0:
        raise ValueError("g is undefined for h = 1, m = 2")
    return f_rec(h, m, k) + Fraction(m - 1, den)


def fib(i: int) -> int:
    """fib(1) = fib(2) = 1."""
    a, b = 0, 1
    for _ in range(i):
        a, b = b, a + b
    return a


def f1_closed_form(m: int, k: int) -> int:
    """Closed form of f(1, m, k) consistent with f(1, m, 1) = 0."""
    return (m - 1) * ((m - 1) ** (k - 1) - 1) // (m - 2)
