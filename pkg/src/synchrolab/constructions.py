"""Generators for the automaton families and the two-symbol reduction.

Indexed families number their states row-major: all states of index 1
first (in letter-tier order), then index 2, and so on. Letter tiers are
``A^(1)..A^(m), C`` for :func:`pfa_hm` and ``A^(0)..A^(2m-2)`` for
:func:`single_undef`. Helper functions translate labels and rewrite
strings to 1-based state numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .automaton import (
    MAX_STATES,
    UNDEF,
    Automaton,
    StateSet,
    full_set,
    image_bits,
    incoming_arrows,
    run_word,
    split_state,
)
from .rewrite import derivation, f_rec, fib, rule_position, system_hm

# ---------------------------------------------------------------------------
# small helpers


def _check(cond, msg):
    if not cond:
        raise ValueError(msg)


def compose(aut: Automaton, word) -> np.ndarray:
    """Transition row (0-based, -1 undefined) of a word."""
    idx = aut.word(word) if isinstance(word, str) else [aut.symbol_index(a) for a in word]
    row = np.arange(aut.n, dtype=np.int64)
    for a in idx:
        d = aut.delta[a]
        row = np.where(row >= 0, d[np.clip(row, 0, None)], UNDEF)
    return row


def with_word_symbols(aut: Automaton, spec) -> Automaton:
    """New automaton whose symbols are words over ``aut``: ``spec`` is ``[(name, word), ...]``."""
    names = [name for name, _ in spec]
    rows = np.array([compose(aut, w) for _, w in spec], dtype=np.int64)
    return Automaton(aut.n, names, rows)


def expand(word, mapping) -> list:
    """Substitute each symbol of ``word`` by ``mapping[symbol]`` (a list of symbols)."""
    out = []
    for a in word:
        out.extend(mapping.get(a, [a]))
    return out


def is_sync_word(aut: Automaton, word) -> bool:
    return run_word(aut, full_set(aut), list(word)).is_singleton()


# ---------------------------------------------------------------------------
# quadratic families


def cerny(n: int) -> Automaton:
    _check(n >= 2, "cerny needs n >= 2")
    a = [q + 1 for q in range(1, n)] + [1]
    b = [2] + list(range(2, n + 1))
    return Automaton.from_rows(n, {"a": a, "b": b})


def cerny_word(n: int) -> list:
    return ["b"] + (["a"] * (n - 1) + ["b"]) * (n - 2)


def t_n(n: int) -> Automaton:
    _check(n >= 3, "t_n needs n >= 3")
    a = [q + 1 for q in range(1, n - 1)] + [1, n]
    b = [2] + list(range(2, n + 1))
    top = 2 + (n - 1) // 2
    if n == 3:
        top %= n - 1
    c = [2] + [None] * (n - 2) + [top]
    return Automaton.from_rows(n, {"a": a, "b": b, "c": c})


def t_n_word(n: int) -> list:
    head = (["b"] + ["a"] * (n - 2)) * (n - 2) + ["c"]
    if n % 2 == 0:
        v = (["a"] * (n - 2) + ["b"]) * ((n - 2) // 2)
    else:
        v = ["a"] * ((n - 3) // 2) + ["b"] + (["a"] * (n - 2) + ["b"]) * ((n - 3) // 2)
    return head + v


def t_n_length(n: int) -> int:
    return 3 * (n - 1) * (n - 2) // 2 + 1


def p_n(n: int) -> Automaton:
    _check(n >= 3, "p_n needs n >= 3")
    a = [None] + [q + 1 for q in range(2, n)] + [1]
    b = [2, 3] + list(range(3, n + 1))
    return Automaton.from_rows(n, {"a": a, "b": b})


def pn_length_formula(n: int) -> int:
    _check(n >= 3, "formula needs n >= 3")
    m = 1
    while not (fib(m - 1) < n - 2 <= fib(m)):
        m += 1
    return n * n + m * n - 5 * n - fib(m + 1) - 2 * m + 8


# ---------------------------------------------------------------------------
# rewrite-mimicking families P_{h,m} and variants


def hm_state(m: int, i: int, t: int) -> int:
    """1-based state number of A_i^(t) (t = 1..m) or C_i (t = 0) in :func:`pfa_hm`."""
    return (i - 1) * (m + 1) + (m + 1 if t == 0 else t)


def hm_labels(m: int, k: int) -> list:
    out = []
    for i in range(1, k + 1):
        out += [f"A{i}^({t})" for t in range(1, m + 1)] + [f"C{i}"]
    return out


def hm_set(m: int, u) -> StateSet:
    """S(u): the set holding, for each position i, the state of letter u_i (0 = C)."""
    return StateSet.from_states(hm_state(m, i + 1, t) for i, t in enumerate(u))


def _hm_tables(h, m, k):
    n = (m + 1) * k
    st = lambda i, t: hm_state(m, i, t) - 1  # noqa: E731
    s = np.empty(n, dtype=np.int64)
    r = np.empty(n, dtype=np.int64)
    c = np.empty(n, dtype=np.int64)
    for i in range(1, k + 1):
        nxt = 1 if i == k else i + 1
        for t in range(0, m + 1):
            q = st(i, t)
            c[q] = st(nxt, t)
            s[q] = st(i, 0) if i <= h else st(i, 1)
            if i <= h:
                r[q] = st(i, 0) if t == 0 else (st(i, 1) if t == m else UNDEF)
            elif i == h + 1:
                r[q] = st(i - 1, m) if t == 0 else (st(i, t + 1) if t < m else UNDEF)
            else:
                r[q] = q
    return n, s, r, c


def pfa_hm(h: int, m: int, k: int, variant: str = "src") -> Automaton:
    """P_{h,m} on (m+1)k states.

    ``variant="src"`` gives symbols (s, r, c); ``"s,c,rc"`` gives (s, c, rc).
    """
    _check(h >= 1 and m >= 2 and k >= h + 1, "pfa_hm needs h >= 1, m >= 2, k >= h+1")
    n, s, r, c = _hm_tables(h, m, k)
    _check(n <= MAX_STATES, f"{n} states exceed the {MAX_STATES}-state limit")
    aut = Automaton(n, ["s", "r", "c"], np.array([s, r, c]))
    if variant == "src":
        return aut
    if variant == "s,c,rc":
        return with_word_symbols(aut, [("s", "s"), ("c", "c"), ("rc", ["r", "c"])])
    raise ValueError(f"unknown variant {variant!r}")


def rewrite_word(h: int, m: int, k: int, system=None) -> list:
    """Word over {r, c} that carries S(C^h A^(k-h)) along a shortest derivation to a B-final string."""
    system = system or system_hm(h, m)
    path = derivation(system, k)
    _check(bool(path), "no derivation exists")
    word = []
    for u, v in zip(path, path[1:]):
        e = rule_position(u, v)  # rewritten letter, 0-based; window starts at e - h
        p = e - system.h + 1
        j = (1 - p) % k
        word += ["c"] * j + ["r"] + ["c"] * ((k - j) % k)
    return word


def pfa_hm_word(h: int, m: int, k: int) -> list:
    w = rewrite_word(h, m, k)
    return (["s"] + w + ["c", "r"]) * (k - 1) + ["s"]


def pfa_hm_tilde(h: int, m: int, k: int) -> Automaton:
    """Symbols (s', c, rc); s' freezes the A-letters on indices h+2..k-4."""
    _check(h >= 1 and m >= 2 and k >= h + 7, "pfa_hm_tilde needs k >= h+7")
    n, s, r, c = _hm_tables(h, m, k)
    _check(n <= MAX_STATES, f"{n} states exceed the {MAX_STATES}-state limit")
    sp = s.copy()
    for i in range(h + 2, k - 3):
        for t in range(1, m + 1):
            q = hm_state(m, i, t) - 1
            sp[q] = q
    rc = np.where(r >= 0, c[np.clip(r, 0, None)], UNDEF)
    return Automaton(n, ["s'", "c", "rc"], np.array([sp, c, rc]))


def pfa_hm_tilde_Qprime(h: int, m: int, k: int) -> StateSet:
    states = [hm_state(m, i, 0) for i in range(1, h + 1)]
    states += [hm_state(m, i, t) for i in range(h + 2, k - 3) for t in range(1, m + 1)]
    return StateSet.from_states(states)


def pfa_hm_tilde_word(h: int, m: int, k: int) -> list:
    """Synchronizing word over (s', c, rc), obtained from the P_{h,m} word via s = (c s')^k, r = rc c^(k-1)."""
    mapping = {"s": ["c", "s'"] * k, "r": ["rc"] + ["c"] * (k - 1)}
    return expand(pfa_hm_word(h, m, k), mapping)


# ---------------------------------------------------------------------------
# two-symbol reduction


@dataclass(frozen=True)
class Reduction:
    automaton: Automaton
    layout: dict  # (row, original state) -> new 1-based state
    order: tuple  # original states in column order (non-Q' first, then Q')
    letters: tuple  # original non-s symbols a_1..a_{m-1}
    s: str
    p: int

    def psi(self, word) -> list:
        m1 = len(self.letters)
        out = []
        for x in word:
            if x == self.s:
                out += ["a"] * m1
            else:
                out += ["a"] * self.letters.index(x) + ["b"]
        return out

    def lift(self, word) -> list:
        """Synchronizing word of the reduced automaton built from one of the original."""
        return ["a"] * (len(self.letters) * self.p) + ["b"] + self.psi(word)


def _defined_after(aut, s_idx, p):
    bits = full_set(aut).bits
    for _ in range(p):
        bits = image_bits(aut.delta, s_idx, bits)
    return bits


def check_conditions(aut: Automaton, s, Qprime: StateSet, p: int) -> None:
    si = aut.symbol_index(s)
    d = aut.delta
    if (d[si] < 0).any():
        raise ValueError(f"condition 1 fails: {aut.symbols[si]} is not complete")
    bits = _defined_after(aut, si, p)
    for a in range(aut.k):
        for q in StateSet(bits).states():
            if d[a, q - 1] < 0:
                raise ValueError(f"condition 1 fails: {aut.symbols[a]} undefined on state {q} of Q s^{p}")
    others = [a for a in range(aut.k) if a != si]
    for q in Qprime.states():
        if d[si, q - 1] != q - 1:
            raise ValueError(f"condition 2 fails at state {q}")
        vals = {int(d[a, q - 1]) for a in others}
        if len(vals) > 1 or UNDEF in vals:
            raise ValueError(f"condition 3 fails at state {q}")


def detect_Qprime(aut: Automaton, s, p: int = 1) -> StateSet:
    """Maximal Q' for the reduction: s-fixed states where all other symbols agree and are defined."""
    si = aut.symbol_index(s)
    check_conditions(aut, s, StateSet(0), p)
    d = aut.delta
    others = [a for a in range(aut.k) if a != si]
    keep = []
    for q in range(aut.n):
        if d[si, q] != q:
            continue
        vals = {int(d[a, q]) for a in others}
        if len(vals) == 1 and UNDEF not in vals:
            keep.append(q + 1)
    return StateSet.from_states(keep)


def reduce_to_two(aut: Automaton, s, Qprime: StateSet | None = None, p: int = 1) -> Reduction:
    """Two-symbol PFA on n + n'(m-2) states simulating ``aut`` (m symbols, n' = n - |Q'|)."""
    Qprime = Qprime if Qprime is not None else StateSet(0)
    check_conditions(aut, s, Qprime, p)
    si = aut.symbol_index(s)
    m = aut.k
    _check(m >= 2, "need at least two symbols")
    letters = tuple(a for a in range(aut.k) if a != si)
    qp = set(Qprime.states())
    order = tuple([q for q in range(1, aut.n + 1) if q not in qp] + sorted(qp))
    n, n1 = aut.n, aut.n - len(qp)
    N = n + n1 * (m - 2)
    _check(N <= MAX_STATES, f"{N} states exceed the {MAX_STATES}-state limit")
    col = {q: j for j, q in enumerate(order, start=1)}
    layout = {}
    nxt = 1
    for j in range(1, n + 1):
        layout[(1, order[j - 1])] = nxt
        nxt += 1
    for i in range(2, m):
        for j in range(1, n1 + 1):
            layout[(i, order[j - 1])] = nxt
            nxt += 1
    d = aut.delta
    A = np.full(N, UNDEF, dtype=np.int64)
    B = np.full(N, UNDEF, dtype=np.int64)
    for (i, q), x in layout.items():
        j = col[q]
        if j <= n1:
            if i < m - 1:
                A[x - 1] = layout[(i + 1, q)] - 1
            else:
                A[x - 1] = layout[(1, int(d[si, q - 1]) + 1)] - 1
        else:
            A[x - 1] = layout[(1, q)] - 1
        t = d[letters[i - 1], q - 1]
        if t >= 0:
            B[x - 1] = layout[(1, int(t) + 1)] - 1
    red = Automaton(N, ["a", "b"], np.array([A, B]))
    return Reduction(red, layout, order, tuple(aut.symbols[a] for a in letters), aut.symbols[si], p)


# ---------------------------------------------------------------------------
# single undefined transition


def su_state(m: int, i: int, t: int) -> int:
    """1-based state number of A_i^(t), t = 0..2m-2."""
    return (i - 1) * (2 * m - 1) + t + 1


def su_labels(m: int, k: int) -> list:
    return [f"A{i}^({t})" for i in range(1, k + 1) for t in range(2 * m - 1)]


def su_letter_set(m: int, i: int, t: int, bar: bool = False) -> set:
    """S_i^(t) (and the barred C-set when ``bar``) as 1-based states."""
    if t == 0:
        tiers = [0] + (list(range(m, 2 * m - 2)) if bar else list(range(1, m - 1)))
    elif t <= m:
        tiers = list(range(t, t + m - 1))
    else:
        tiers = list(range(1, t - m + 1)) + list(range(t, 2 * m - 1))
    return {su_state(m, i, x) for x in tiers}


def su_set(m: int, u, bar: bool = False) -> StateSet:
    out = set()
    for i, t in enumerate(u, start=1):
        out |= su_letter_set(m, i, t, bar and t == 0)
    return StateSet.from_states(out)


def _su_tables(m, k):
    T = 2 * m - 1
    n = T * k
    st = lambda i, t: su_state(m, i, t) - 1  # noqa: E731
    s = np.empty(n, dtype=np.int64)
    r = np.empty(n, dtype=np.int64)
    c = np.empty(n, dtype=np.int64)
    for i in range(1, k + 1):
        for t in range(T):
            q = st(i, t)
            c[q] = st(1 if i == k else i + 1, t)
            s[q] = st(i, t % (m - 1)) if (t % (m - 1) != 0 or i == 1) else st(i, m - 1)
            if i == 1:
                if t == 0:
                    r[q] = st(1, 0)
                elif t <= m - 2:
                    r[q] = st(1, t + m - 1)
                elif t == m - 1:
                    r[q] = UNDEF
                else:
                    r[q] = st(1, t - (m - 1))
            elif i == 2:
                r[q] = st(1, 2 * m - 2) if t == 0 else (st(2, t + 1) if t < 2 * m - 2 else st(2, 1))
            else:
                r[q] = q
    return n, s, r, c


def single_undef(m: int, k: int) -> Automaton:
    _check(m >= 3 and k >= 2, "single_undef needs m >= 3, k >= 2")
    n, s, r, c = _su_tables(m, k)
    _check(n <= MAX_STATES, f"{n} states exceed the {MAX_STATES}-state limit")
    return Automaton(n, ["s", "r", "c"], np.array([s, r, c]))


def single_undef_word(m: int, k: int) -> list:
    """(v^(m-1) c)^k s with v = c^(k-1) s w c r and w a rewrite word ending in A^(m)."""
    w = rewrite_word(1, m, k)
    v = ["c"] * (k - 1) + ["s"] + w + ["c", "r"]
    return (v * (m - 1) + ["c"]) * k + ["s"]


def single_undef_three(m: int, k: int) -> Automaton:
    """The (s', c, rc) variant: s' fixes A_i^(t), t >= 1, for 3 <= i <= k-4."""
    _check(m >= 3 and k >= 7, "the binary single-undefined variant needs m >= 3, k >= 7")
    n, s, r, c = _su_tables(m, k)
    sp = s.copy()
    for i in range(3, k - 3):
        for t in range(1, 2 * m - 1):
            q = su_state(m, i, t) - 1
            sp[q] = q
    rc = np.where(r >= 0, c[np.clip(r, 0, None)], UNDEF)
    return Automaton(n, ["s'", "c", "rc"], np.array([sp, c, rc]))


def single_undef_three_word(m: int, k: int) -> list:
    mapping = {"s": _s_via_sprime(m, k), "r": ["rc"] + ["c"] * (k - 1)}
    return expand(single_undef_word(m, k), mapping)


def _s_via_sprime(m: int, k: int) -> list:
    """A word over (s', c) acting exactly as s."""
    aut3 = single_undef_three(m, k)
    s_row = _su_tables(m, k)[1]
    cand = ["c", "s'"] * k
    if np.array_equal(compose(aut3, cand), s_row):
        return cand
    raise ValueError("no (s', c)-expression for s found")


def single_undef_binary(m: int, k: int) -> Reduction:
    aut3 = single_undef_three(m, k)
    Qp = detect_Qprime(aut3, "s'", 1)
    return reduce_to_two(aut3, "s'", Qp, 1)


# ---------------------------------------------------------------------------
# padding by state splitting


def pad_by_splitting(aut: Automaton, extra: int, forbid=()) -> Automaton:
    """Split the ``extra`` lowest-numbered states with at least two incoming arrows."""
    forbid = set(forbid)
    out = aut
    done = set()
    for _ in range(extra):
        for q in range(1, out.n + 1):
            if q in forbid or q in done:
                continue
            if len(incoming_arrows(out, q)) >= 2:
                out = split_state(out, q)
                done.add(q)
                done.add(out.n)
                break
        else:
            raise ValueError("no state with two incoming arrows left to split")
    return out


def pfa_hm_n(h: int, m: int, n: int) -> Automaton:
    """P_{h,m} padded to exactly n states."""
    k, extra = divmod(n, m + 1)
    return pad_by_splitting(pfa_hm(h, m, k), extra)


def single_undef_n(m: int, n: int) -> Automaton:
    k, extra = divmod(n, 2 * m - 1)
    return pad_by_splitting(single_undef(m, k), extra, forbid={su_state(m, 1, m - 1)})


def expected_lower_bound(h: int, m: int, k: int) -> int:
    return f_rec(h, m, k)
