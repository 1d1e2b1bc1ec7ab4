"""Deterministic and partial automata, state sets, and the .aut file format.

States are numbered 1..n at every public boundary (files, ``step``,
``StateSet.of``); internally a state q is bit ``q-1`` of a mask and row
index ``q-1`` of the transition table, with ``-1`` meaning undefined.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_STATES = 64
UNDEF = -1


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def to_i64(bits: int) -> int:
    """Reinterpret a non-negative 64-bit mask as a signed int64 value."""
    return bits - (1 << 64) if bits >= 1 << 63 else bits


def from_i64(v) -> int:
    v = int(v)
    return v + (1 << 64) if v < 0 else v


def popcount(bits: int) -> int:
    return bin(bits).count("1")


@dataclass(frozen=True)
class StateSet:
    """A subset of states as a bitmask; bit ``q-1`` is state q.

    The empty set doubles as the undefined image of the power automaton.
    """

    bits: int = 0

    @classmethod
    def of(cls, *states: int) -> "StateSet":
        return cls.from_states(states)

    @classmethod
    def from_states(cls, states: Iterable[int]) -> "StateSet":
        bits = 0
        for q in states:
            if q < 1 or q > MAX_STATES:
                raise ValueError(f"state {q} out of range")
            bits |= 1 << (q - 1)
        return cls(bits)

    @classmethod
    def full(cls, n: int) -> "StateSet":
        return cls((1 << n) - 1)

    def states(self) -> tuple:
        out = []
        b, q = self.bits, 1
        while b:
            if b & 1:
                out.append(q)
            b >>= 1
            q += 1
        return tuple(out)

    def __len__(self):
        return popcount(self.bits)

    def __bool__(self):
        return self.bits != 0

    def __contains__(self, q):
        return q >= 1 and (self.bits >> (q - 1)) & 1 == 1

    def __iter__(self):
        return iter(self.states())

    def __le__(self, other):
        return self.bits & ~other.bits == 0

    def is_singleton(self):
        return self.bits != 0 and self.bits & (self.bits - 1) == 0

    def __repr__(self):
        return "{" + ",".join(map(str, self.states())) + "}"


class Automaton:
    """Immutable automaton: ``n`` states, ordered symbol names, transition table.

    ``delta`` has shape ``(k, n)``; ``delta[a, q]`` is the 0-based target of
    state ``q+1`` under symbol ``a`` or ``-1`` when undefined.
    """

    __slots__ = ("n", "symbols", "delta", "_index")

    def __init__(self, n: int, symbols: Sequence[str], delta):
        if not 1 <= n <= MAX_STATES:
            raise ValueError(f"state count {n} outside 1..{MAX_STATES}")
        symbols = tuple(symbols)
        if len(set(symbols)) != len(symbols):
            raise ValueError("duplicate symbol name")
        for name in symbols:
            if not name or any(ch.isspace() for ch in name) or ":" in name or "#" in name:
                raise ValueError(f"bad symbol name {name!r}")
        d = np.array(delta, dtype=np.int64).reshape(len(symbols), n)
        if d.size and (d.min() < -1 or d.max() >= n):
            raise ValueError("transition target out of range")
        d.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    def __setattr__(self, key, value):
        raise AttributeError("Automaton is immutable")

    @classmethod
    def from_rows(cls, n: int, rows) -> "Automaton":
        """Build from ``{name: [t1..tn]}`` (or pairs) with 1-based targets, None = undefined."""
        items = list(rows.items()) if isinstance(rows, dict) else list(rows)
        names = [name for name, _ in items]
        delta = np.full((len(items), n), UNDEF, dtype=np.int64)
        for a, (_, row) in enumerate(items):
            if len(row) != n:
                raise ValueError(f"symbol {names[a]!r}: expected {n} entries, got {len(row)}")
            for q, t in enumerate(row):
                if t is not None:
                    if not 1 <= t <= n:
                        raise ValueError(f"symbol {names[a]!r}: target {t} out of range")
                    delta[a, q] = t - 1
        return cls(n, names, delta)

    @property
    def k(self) -> int:
        return len(self.symbols)

    def symbol_index(self, a) -> int:
        if isinstance(a, (int, np.integer)):
            if not 0 <= a < self.k:
                raise IndexError(f"symbol index {a} out of range")
            return int(a)
        return self._index[a]

    def row(self, a) -> tuple:
        """1-based transition row of symbol ``a`` with None for undefined."""
        r = self.delta[self.symbol_index(a)]
        return tuple(None if t < 0 else int(t) + 1 for t in r)

    def rows(self) -> dict:
        return {s: self.row(i) for i, s in enumerate(self.symbols)}

    def word(self, text) -> tuple:
        """Symbol indices for a word given as a string of one-letter names or a name list."""
        if isinstance(text, str):
            if all(len(s) == 1 for s in self.symbols):
                return tuple(self._index[ch] for ch in text)
            text = text.split()
        return tuple(self.symbol_index(a) for a in text)

    def format_word(self, w) -> str:
        names = [self.symbols[a] for a in w]
        if all(len(s) == 1 for s in self.symbols):
            return "".join(names)
        return " ".join(names)

    def with_symbols(self, names, delta) -> "Automaton":
        return Automaton(self.n, names, delta)

    def restrict_symbols(self, keep) -> "Automaton":
        idx = [self.symbol_index(a) for a in keep]
        return Automaton(self.n, [self.symbols[i] for i in idx], self.delta[idx])

    def add_symbol(self, name, row0) -> "Automaton":
        """Extension by one symbol; ``row0`` holds 0-based targets, -1 undefined."""
        d = np.vstack([self.delta, np.asarray(row0, dtype=np.int64)[None, :]])
        return Automaton(self.n, self.symbols + (name,), d)

    def __eq__(self, other):
        return (
            isinstance(other, Automaton)
            and self.n == other.n
            and self.symbols == other.symbols
            and np.array_equal(self.delta, other.delta)
        )

    def __hash__(self):
        return hash((self.n, self.symbols, self.delta.tobytes()))

    def __repr__(self):
        return f"Automaton(n={self.n}, symbols={self.symbols})"


# ---------------------------------------------------------------------------
# file format


def parse_automaton(text: str) -> Automaton:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(stripped)
    n = k = None
    rows = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            n = _header(line, "states", lineno)
            if n > MAX_STATES:
                raise ParseError(f"{n} states exceeds the {MAX_STATES}-state limit", lineno)
            if n < 1:
                raise ParseError("need at least one state", lineno)
            continue
        if k is None:
            k = _header(line, "symbols", lineno)
            continue
        if not line.startswith("sym ") or ":" not in line:
            raise ParseError(f"expected 'sym <name>: ...', got {line!r}", lineno)
        head, body = line[4:].split(":", 1)
        name = head.strip()
        if not name or any(ch.isspace() for ch in name):
            raise ParseError(f"bad symbol name {name!r}", lineno)
        if name in seen:
            raise ParseError(f"duplicate symbol name {name!r}", lineno)
        seen.add(name)
        fields = body.split()
        if len(fields) != n:
            raise ParseError(f"symbol {name!r} has {len(fields)} entries, expected {n}", lineno)
        row = []
        for f in fields:
            if f == "-":
                row.append(None)
                continue
            try:
                t = int(f)
            except ValueError:
                raise ParseError(f"bad transition target {f!r}", lineno) from None
            if not 1 <= t <= n:
                raise ParseError(f"state index {t} out of range 1..{n}", lineno)
            row.append(t)
        rows.append((name, row))
    if n is None or k is None:
        raise ParseError("missing 'states' or 'symbols' header")
    if len(rows) != k:
        raise ParseError(f"declared {k} symbols, found {len(rows)}")
    return Automaton.from_rows(n, rows)


def _header(line, word, lineno):
    parts = line.split()
    if len(parts) != 2 or parts[0] != word:
        raise ParseError(f"expected '{word} <count>', got {line!r}", lineno)
    try:
        return int(parts[1])
    except ValueError:
        raise ParseError(f"bad count {parts[1]!r}", lineno) from None


def _parse_json(text):
    try:
        doc = json.loads(text)
        n = int(doc["states"])
        syms = doc["symbols"]
        if n > MAX_STATES:
            raise ParseError(f"{n} states exceeds the {MAX_STATES}-state limit")
        rows = [(s["name"], s["map"]) for s in syms]
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed JSON automaton: {exc}") from None
    names = [r[0] for r in rows]
    if len(set(names)) != len(names):
        raise ParseError("duplicate symbol name")
    try:
        return Automaton.from_rows(n, rows)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_automaton(aut: Automaton, as_json: bool = False) -> str:
    if as_json:
        doc = {
            "states": aut.n,
            "symbols": [{"name": s, "map": list(aut.row(i))} for i, s in enumerate(aut.symbols)],
        }
        return json.dumps(doc)
    lines = [f"states {aut.n}", f"symbols {aut.k}"]
    for i, s in enumerate(aut.symbols):
        entries = ["-" if t is None else str(t) for t in aut.row(i)]
        lines.append(f"sym {s}: " + " ".join(entries))
    return "\n".join(lines)


def load_automaton(path) -> Automaton:
    with open(path, encoding="utf-8") as fh:
        return parse_automaton(fh.read())


# ---------------------------------------------------------------------------
# transition semantics


def step(aut: Automaton, q: int, a):
    """Target of state q (1-based) under symbol a, or None when undefined."""
    if not 1 <= q <= aut.n:
        raise ValueError(f"state {q} out of range")
    t = aut.delta[aut.symbol_index(a), q - 1]
    return None if t < 0 else int(t) + 1


def image_bits(delta, a: int, bits: int) -> int:
    out = 0
    row = delta[a]
    q = 0
    while bits:
        if bits & 1:
            t = row[q]
            if t < 0:
                return 0
            out |= 1 << int(t)
        bits >>= 1
        q += 1
    return out


def image(aut: Automaton, V: StateSet, a) -> StateSet:
    return StateSet(image_bits(aut.delta, aut.symbol_index(a), V.bits))


def run_word(aut: Automaton, V: StateSet, w) -> StateSet:
    bits = V.bits
    if isinstance(w, str):
        w = aut.word(w)
    for a in w:
        if not bits:
            break
        bits = image_bits(aut.delta, aut.symbol_index(a), bits)
    return StateSet(bits)


def full_set(aut: Automaton) -> StateSet:
    return StateSet.full(aut.n)


# ---------------------------------------------------------------------------
# structural predicates


def is_complete(aut: Automaton) -> bool:
    return bool((aut.delta >= 0).all())


def _restricts(a_row, b_row) -> bool:
    """True when a_row agrees with b_row wherever a_row is defined."""
    dom = a_row >= 0
    return bool((a_row[dom] == b_row[dom]).all())


def is_basic(aut: Automaton) -> bool:
    d = aut.delta
    ident = np.arange(aut.n)
    for a in range(aut.k):
        if _restricts(d[a], ident):
            return False
        for b in range(aut.k):
            if a != b and _restricts(d[a], d[b]):
                return False
    return True


def _reach(adj, start):
    seen = {start}
    todo = [start]
    while todo:
        p = todo.pop()
        for q in adj[p]:
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def is_transitive(aut: Automaton) -> bool:
    fwd = [set() for _ in range(aut.n)]
    bwd = [set() for _ in range(aut.n)]
    for a in range(aut.k):
        for p, t in enumerate(aut.delta[a]):
            if t >= 0:
                fwd[p].add(int(t))
                bwd[int(t)].add(p)
    return len(_reach(fwd, 0)) == aut.n and len(_reach(bwd, 0)) == aut.n


def undefined_count(aut: Automaton) -> int:
    return int((aut.delta < 0).sum())


# ---------------------------------------------------------------------------
# state splitting


def incoming_arrows(aut: Automaton, q: int) -> list:
    """Defined transitions into state q as ``(source, symbol_name)`` pairs, 1-based."""
    out = []
    for p in range(aut.n):
        for a in range(aut.k):
            if aut.delta[a, p] == q - 1:
                out.append((p + 1, aut.symbols[a]))
    return out


def split_state(aut: Automaton, q: int, moved=None) -> Automaton:
    """Split state q into q and a fresh state n+1.

    ``moved`` lists incoming arrows ``(source, symbol)`` redirected to the
    new state; by default the second half of the incoming arrows (ordered by
    source, then symbol order) moves. The new state copies q's outgoing row,
    so a self-loop on q and its copy land in the same part.
    """
    arrows = incoming_arrows(aut, q)
    if len(arrows) < 2:
        raise ValueError(f"state {q} has {len(arrows)} incoming arrow(s); need at least 2")
    if moved is None:
        moved = arrows[(len(arrows) + 1) // 2:]
    moved = {(int(p), aut.symbols[aut.symbol_index(a)]) for p, a in moved}
    if not moved <= set(arrows):
        raise ValueError("moved arrows must be incoming arrows of the split state")
    if not moved or moved == set(arrows):
        raise ValueError("both parts of the split must be nonempty")
    n = aut.n
    if n + 1 > MAX_STATES:
        raise ValueError("split would exceed the state limit")
    d = np.full((aut.k, n + 1), UNDEF, dtype=np.int64)
    d[:, :n] = aut.delta
    for p, name in moved:
        d[aut.symbol_index(name), p - 1] = n
    d[:, n] = d[:, q - 1]
    return Automaton(n + 1, aut.symbols, d)


# ---------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True)
class Canonical:
    automaton: Automaton
    perm: tuple  # perm[q-1] is the new label of old state q
    key: tuple


def canonical_form(aut: Automaton, sort_symbols: bool = True) -> Canonical:
    """Least relabeling of the states, rows re-sorted unless ``sort_symbols`` is False.

    Symbol names stay positional: the i-th canonical row is named after the
    i-th input symbol, so isomorphic inputs with the same names map to equal
    automata regardless of symbol order.
    """
    from .kernels import canonical_key

    key, perm = canonical_key(aut.delta, aut.n, sort_rows=sort_symbols)
    sigma = np.asarray(perm, dtype=np.int64)
    d = np.full((aut.k, aut.n), UNDEF, dtype=np.int64)
    for a in range(aut.k):
        for q in range(aut.n):
            t = aut.delta[a, q]
            d[a, sigma[q]] = sigma[t] if t >= 0 else UNDEF
    if sort_symbols:
        codes = [tuple(r) for r in d]
        order = sorted(range(aut.k), key=lambda i: _row_order(codes[i]))
        d = d[order]
    canon = Automaton(aut.n, aut.symbols, d)
    return Canonical(canon, tuple(int(s) + 1 for s in sigma), tuple(key))


def _row_order(row):
    return tuple(t + 1 for t in row)


def canonical_key_of(aut: Automaton, sort_symbols: bool = True) -> tuple:
    from .kernels import canonical_key

    return tuple(canonical_key(aut.delta, aut.n, sort_rows=sort_symbols)[0])
