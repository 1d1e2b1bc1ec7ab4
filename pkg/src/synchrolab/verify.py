"""Named verification suites behind ``synchrolab verify``.

Each suite returns rows ``{"suite", "row", "ok", "detail"}``; a suite passes
when every row does.
"""
from __future__ import annotations

from importlib import resources

from . import constructions as K
from .automaton import (
    StateSet,
    image_bits,
    is_transitive,
    parse_automaton,
    run_word,
    undefined_count,
)
from .rewrite import f_rec, fib, min_steps_to_B, reachable_strings, successors, system_cyclic, system_hm, weight
from .search import (
    SearchTask,
    enumerate_lengths,
    length_ranges,
    postprocess_minimize_alphabet,
    search_critical_dfa,
    search_extremal_pfa,
)
from .sync import count_shortest, shortest_sync

PN_TABLE = {3: 2, 4: 7, 5: 15, 6: 26, 7: 39, 8: 55, 9: 73, 10: 93, 11: 116}
# (length, number of shortest words) of the extremal PFA fixtures
FIXTURES = {4: ("pfa4.aut", 10, 2), 5: ("pfa5.aut", 21, 1), 6: ("pfa6.aut", 37, 1), 7: ("pfa7.aut", 63, 81)}
P_OF_N = {2: 1, 3: 4, 4: 10, 5: 21, 6: 37, 7: 63}
# achievable lengths of binary automata: n -> (DFA, proper PFA)
BINARY_RANGES = {
    2: ([1], [1]),
    3: (list(range(1, 5)), list(range(1, 4))),
    4: (list(range(1, 10)), list(range(1, 8))),
    5: (list(range(1, 17)), list(range(1, 16))),
    6: (list(range(1, 24)) + [25], list(range(1, 24)) + [26]),
}


def _row(suite, row, ok, detail=""):
    return {"suite": suite, "row": row, "ok": bool(ok), "detail": detail}


def load_fixture(name):
    text = resources.files("synchrolab").joinpath("fixtures", name).read_text(encoding="utf-8")
    return parse_automaton(text)


# ---------------------------------------------------------------------------


def suite_cerny(max_n=None, extended=False):
    rows = []
    for n in range(2, (max_n or 10) + 1):
        aut = K.cerny(n)
        rep = shortest_sync(aut)
        w = K.cerny_word(n)
        ok = rep.length == (n - 1) ** 2 and run_word(aut, StateSet.full(n), w).is_singleton()
        rows.append(_row("cerny", f"n={n}", ok, f"length {rep.length}, expected {(n - 1) ** 2}"))
    return rows


def suite_tn(max_n=None, extended=False):
    rows = []
    for n in range(3, (max_n or 8) + 1):
        aut = K.t_n(n)
        rep = count_shortest(aut)
        want = K.t_n_length(n)
        word = tuple(aut.symbol_index(x) for x in K.t_n_word(n))
        ok = rep.length == want and rep.shortest_count == 1 and rep.witness == word
        rows.append(_row("tn", f"n={n}", ok, f"length {rep.length}, count {rep.shortest_count}, expected {want}, 1"))
    return rows


def suite_pn(max_n=None, extended=False):
    rows = []
    for n in range(3, (max_n or 13) + 1):
        got = shortest_sync(K.p_n(n)).length
        want = PN_TABLE.get(n, K.pn_length_formula(n))
        ok = got == want == K.pn_length_formula(n)
        rows.append(_row("pn", f"n={n}", ok, f"length {got}, expected {want}"))
    return rows


def suite_p_of_n(max_n=None, extended=False):
    rows = []
    for n, (name, length, count) in FIXTURES.items():
        rep = count_shortest(load_fixture(name))
        ok = (rep.length, rep.shortest_count) == (length, count)
        rows.append(_row("p-of-n", f"fixture n={n}", ok, f"length {rep.length}, count {rep.shortest_count}, expected {length}, {count}"))
    if max_n:
        for n in range(2, min(max_n, 5) + 1):
            p = P_OF_N[n]
            hit = search_extremal_pfa(SearchTask(n=n, kind="pfa", target=p))
            over = search_extremal_pfa(SearchTask(n=n, kind="pfa", target=p + 1))
            ok = bool(hit.found) and not over.found
            rows.append(_row("p-of-n", f"search n={n}", ok, f"{len(hit.found)} solutions at {p}, {len(over.found)} above"))
    return rows


def suite_binary_ranges(max_n=None, extended=False):
    rows = []
    top = max_n or (6 if extended else 5)
    for n in range(2, top + 1):
        want_dfa, want_pfa = BINARY_RANGES[n]
        for kind, want in (("dfa", want_dfa), ("proper-pfa", want_pfa)):
            got = sorted(enumerate_lengths(n, 2, kind))
            rows.append(_row("binary-ranges-small", f"n={n} {kind}", got == want, f"{length_ranges(got)} vs {length_ranges(want)}"))
    return rows


def suite_rewrite_oracle(max_n=None, extended=False):
    rows = []
    kmax = max_n or 12
    for h in (1, 2, 3):
        for m in (2, 3, 4):
            bad = []
            for k in range(h + 1, kmax + 1):
                if (m ** (k - h)) > (1 << 26):
                    continue
                if min_steps_to_B(system_hm(h, m), k) != f_rec(h, m, k):
                    bad.append(k)
            rows.append(_row("rewrite-oracle", f"h={h} m={m}", not bad, f"k <= {kmax}" + (f", mismatch at {bad}" if bad else "")))
    fib_ok = all(f_rec(2, 2, k) == fib(k) - 1 for k in range(1, 21))
    rows.append(_row("rewrite-oracle", "f(2,2,k) = fib(k)-1", fib_ok, "k <= 20"))
    for h in (1, 2, 3):
        for m in (2, 3):
            ok = True
            sys_ = system_hm(h, m)
            for k in range(h + 1, 10):
                for u in reachable_strings(sys_, k):
                    wu = weight(sys_, u)
                    if any(weight(sys_, v) != wu + 1 for v in successors(sys_, u)):
                        ok = False
            rows.append(_row("rewrite-oracle", f"weight step law h={h} m={m}", ok, "k <= 9"))
    return rows


def suite_lem2sym(max_n=None, extended=False):
    rows = []
    for k in (3, 4):
        aut = K.pfa_hm(2, 2, k, "s,c,rc")
        Qp = StateSet.from_states(K.hm_state(2, i, t) for i in range(4, k + 1) for t in (1,))
        red = K.reduce_to_two(aut, "s", Qp)
        rin = shortest_sync(aut)
        rout = shortest_sync(red.automaton)
        ok = red.automaton.n == 5 * k + 3 and red.automaton.k == 2 and rout.synchronizing and rout.length >= rin.length
        rows.append(_row("lem2sym", f"s,c,rc k={k}", ok, f"{red.automaton.n} states (want {5 * k + 3}), length {rout.length} >= {rin.length}"))
        aut = K.pfa_hm(2, 2, k, "src")
        red = K.reduce_to_two(aut, "s", StateSet(0))
        rout = shortest_sync(red.automaton)
        ok = red.automaton.n == 6 * k and rout.synchronizing
        rows.append(_row("lem2sym", f"s,c,r k={k}", ok, f"{red.automaton.n} states (want {6 * k}), length {rout.length}"))
    return rows


def suite_single_undef(max_n=None, extended=False):
    rows = []
    for k in (2, 3):
        aut = K.single_undef(3, k)
        rep = shortest_sync(aut)
        floor = min_steps_to_B(system_cyclic(3), k)
        ok = undefined_count(aut) == 1 and is_transitive(aut) and rep.synchronizing and rep.length >= floor
        rows.append(_row("single-undef", f"m=3 k={k}", ok, f"length {rep.length} >= {floor}"))
    red = K.single_undef_binary(3, 7)
    b = red.automaton
    word = red.lift(K.single_undef_three_word(3, 7))
    sync = run_word(b, StateSet.full(b.n), word).is_singleton()
    ok = b.k == 2 and undefined_count(b) == 1 and sync
    rows.append(_row("single-undef", "binary m=3 k=7", ok, f"{b.n} states, word of length {len(word)} synchronizes: {sync}"))
    return rows


def lemrewr_sets(h, m, k):
    """Sets reached from Q s by c and r until a string ends in B, and the sets S(u) c^i predicted by the rewrite oracle.

    Returns ``(reached, pre, post)``: ``reached`` stops expanding at B-final
    sets, ``pre``/``post`` are the shifts of non-target/target strings.
    """
    aut = K.pfa_hm(h, m, k)
    s, r, c = (aut.symbol_index(x) for x in "src")
    sys_ = system_hm(h, m)
    start = image_bits(aut.delta, s, (1 << aut.n) - 1)

    def shifts(u):
        bits = K.hm_set(m, u).bits
        out = set()
        for _ in range(k):
            out.add(bits)
            bits = image_bits(aut.delta, c, bits)
        return out

    pre, post = set(), set()
    for u in reachable_strings(sys_, k, include_targets=True):
        (post if sys_.is_target(u) else pre).update(shifts(u))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for X in frontier:
            if X in post:
                continue
            for a in (c, r):
                Y = image_bits(aut.delta, a, X)
                if Y and Y not in seen:
                    seen.add(Y)
                    nxt.append(Y)
        frontier = nxt
    return seen, pre, post


def suite_lemrewr(max_n=None, extended=False):
    """Sets reachable from Q s by c and r, until a string ends in B, are exactly the S(u) c^i."""
    h, m, k = 2, 2, 5
    seen, pre, post = lemrewr_sets(h, m, k)
    ok = (seen - post) == pre and seen <= pre | post
    return [_row("lemrewr", f"h={h} m={m} k={k}", ok, f"{len(seen - post)} pre-B sets reached, {len(pre)} expected")]


def suite_extended(max_n=None, extended=True):
    rows = []
    cases = [(5, "dfa"), (5, "proper-pfa"), (4, "proper-pfa"), (6, "dfa"), (6, "proper-pfa")]
    for n, kind in cases:
        want = BINARY_RANGES[n][0 if kind == "dfa" else 1]
        got = sorted(enumerate_lengths(n, 2, kind))
        rows.append(_row("extended", f"enumerate n={n} {kind}", got == want, length_ranges(got)))
    res = search_critical_dfa(SearchTask(n=5, kind="dfa", target=16))
    names = classify_critical(res.found)
    ok = sorted(names) == ["cerny", "roman"] and all(f.length == 16 for f in res.found)
    rows.append(_row("extended", "critical DFAs n=5", ok, f"found {names}"))
    res = search_extremal_pfa(SearchTask(n=4, kind="pfa", target=10))
    best = None
    for f in res.found:
        for v in postprocess_minimize_alphabet(f.automaton, 10):
            best = v.k if best is None else min(best, v.k)
    ok = bool(res.found) and best == 3
    rows.append(_row("extended", "extremal PFA n=4", ok, f"{len(res.found)} solutions, fewest symbols {best}"))
    return rows


def classify_critical(found):
    """Names of the known critical automata among search results."""
    from .automaton import canonical_key_of

    known = {canonical_key_of(K.cerny(5)): "cerny", canonical_key_of(load_fixture("roman5.aut")): "roman"}
    return [known.get(canonical_key_of(f.automaton), "unknown") for f in found]


SUITES = {
    "cerny": suite_cerny,
    "tn": suite_tn,
    "pn": suite_pn,
    "p-of-n": suite_p_of_n,
    "binary-ranges-small": suite_binary_ranges,
    "rewrite-oracle": suite_rewrite_oracle,
    "lemrewr": suite_lemrewr,
    "lem2sym": suite_lem2sym,
    "single-undef": suite_single_undef,
}


def run_suite(name, max_n=None, extended=False):
    return SUITES[name](max_n=max_n, extended=extended)
