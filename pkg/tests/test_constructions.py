import numpy as np
import pytest

from oracles import fib
from synchrolab import constructions as K
from synchrolab.automaton import (
    StateSet,
    full_set,
    image,
    incoming_arrows,
    is_basic,
    is_complete,
    is_transitive,
    run_word,
    undefined_count,
)
from synchrolab.rewrite import f_rec, min_steps_to_B, system_cyclic
from synchrolab.sync import count_shortest, shortest_sync
from synchrolab.verify import PN_TABLE, lemrewr_sets


def sync_len(aut):
    rep = shortest_sync(aut)
    assert rep.synchronizing
    return rep.length


# --- quadratic families -----------------------------------------------------


@pytest.mark.parametrize("n", range(2, 11))
def test_cerny_lengths(n):
    aut = K.cerny(n)
    assert sync_len(aut) == (n - 1) ** 2
    assert K.is_sync_word(aut, K.cerny_word(n))
    assert len(K.cerny_word(n)) == (n - 1) ** 2


def test_cerny_rejects_small_n():
    with pytest.raises(ValueError):
        K.cerny(1)


@pytest.mark.parametrize("n", range(3, 9))
def test_t_n_unique_word(n):
    aut = K.t_n(n)
    rep = count_shortest(aut)
    assert rep.length == K.t_n_length(n) == 3 * (n - 1) * (n - 2) // 2 + 1
    assert rep.shortest_count == 1
    assert rep.witness == aut.word(K.t_n_word(n))
    head = (["b"] + ["a"] * (n - 2)) * (n - 2) + ["c"]
    assert K.t_n_word(n)[: len(head)] == head


def test_t_n_known_values():
    assert sync_len(K.t_n(3)) == 4
    assert sync_len(K.t_n(4)) == 10
    assert sync_len(K.t_n(7)) == 46


def test_t_n_extra_state_has_no_entry():
    # C_(n-1) plus a state n that nothing enters: basic, not transitive
    for n in range(3, 9):
        aut = K.t_n(n)
        assert is_basic(aut)
        assert incoming_arrows(aut, n) == [(n, "a"), (n, "b")]
        assert not is_transitive(aut)


def test_t_n_c_defined_on_ends_only():
    for n in range(3, 9):
        row = K.t_n(n).row("c")
        assert [q for q, t in enumerate(row, 1) if t is not None] == [1, n]


@pytest.mark.parametrize("n", range(3, 14))
def test_p_n_lengths(n):
    got = sync_len(K.p_n(n))
    assert got == K.pn_length_formula(n)
    if n in PN_TABLE:
        assert got == PN_TABLE[n]


def test_pn_formula_values():
    assert K.pn_length_formula(7) == 39
    assert K.pn_length_formula(10) == 93
    assert [K.pn_length_formula(n) for n in range(3, 12)] == [2, 7, 15, 26, 39, 55, 73, 93, 116]


def test_generators_basic_and_transitive():
    auts = [K.cerny(6), K.p_n(8), K.pfa_hm(2, 2, 5), K.pfa_hm(1, 3, 4, "s,c,rc"),
            K.pfa_hm_tilde(2, 2, 9), K.single_undef(3, 3), K.single_undef_three(3, 7)]
    for aut in auts:
        assert is_basic(aut), aut
        assert is_transitive(aut), aut


# --- P_{h,m} ----------------------------------------------------------------


@pytest.mark.parametrize("k", range(3, 8))
def test_pfa_hm_start_set(k):
    aut = K.pfa_hm(2, 2, k)
    assert image(aut, full_set(aut), "s") == K.hm_set(2, (0, 0) + (1,) * (k - 2))


def test_pfa_hm_matches_fibonacci_construction():
    aut = K.pfa_hm(2, 2, 4)
    assert aut.n == 12 and aut.k == 3
    # C_3 r = B_2 makes r injective
    assert aut.row("r")[K.hm_state(2, 3, 0) - 1] == K.hm_state(2, 2, 2)
    defined = [t for t in aut.row("r") if t is not None]
    assert len(defined) == len(set(defined))
    assert sync_len(aut) >= fib(4) - 1 + 1


LOWER_BOUND_GRID = [(h, m, k) for h in range(1, 5) for m in range(2, 7) for k in range(h + 1, 21) if (m + 1) * k <= 20]


@pytest.mark.parametrize("h, m, k", LOWER_BOUND_GRID)
def test_lower_bound_law(h, m, k):
    aut = K.pfa_hm(h, m, k)
    assert sync_len(aut) >= f_rec(h, m, k) == K.expected_lower_bound(h, m, k)
    assert K.is_sync_word(aut, K.pfa_hm_word(h, m, k))


@pytest.mark.parametrize("k", range(3, 7))
def test_rewrite_fidelity(k):
    seen, pre, post = lemrewr_sets(2, 2, k)
    assert seen - post == pre
    assert seen <= pre | post


# --- two-symbol reduction ---------------------------------------------------


def psi_decode(word, red):
    """Invert psi on a word over {a, b}; returns (w, j) with word = psi(w) a^j."""
    m1 = len(red.letters)
    out, run = [], 0
    for x in word:
        if x == "a":
            run += 1
        else:
            q, r = divmod(run, m1)
            out += [red.s] * q + [red.letters[r]]
            run = 0
    q, j = divmod(run, m1)
    return out + [red.s] * q, j


def a_from(k):
    return StateSet.from_states(K.hm_state(2, i, 1) for i in range(4, k + 1))


@pytest.mark.parametrize("k", [3, 4])
def test_reduce_to_two_state_counts(k):
    aut = K.pfa_hm(2, 2, k, "s,c,rc")
    red = K.reduce_to_two(aut, "s", a_from(k))
    assert red.automaton.n == 5 * k + 3 and red.automaton.k == 2
    assert sync_len(red.automaton) >= sync_len(aut)
    red0 = K.reduce_to_two(K.pfa_hm(2, 2, k), "s", StateSet(0))
    assert red0.automaton.n == 6 * k
    assert sync_len(red0.automaton) >= sync_len(K.pfa_hm(2, 2, k))


@pytest.mark.parametrize("k", [3, 4])
@pytest.mark.parametrize("variant", ["s,c,rc", "src"])
def test_reduced_witness_decodes(k, variant):
    aut = K.pfa_hm(2, 2, k, variant)
    Qp = a_from(k) if variant == "s,c,rc" else StateSet(0)
    red = K.reduce_to_two(aut, "s", Qp)
    rep = shortest_sync(red.automaton)
    w, j = psi_decode(rep.witness_text(" ").split(), red)
    assert red.psi(w) + ["a"] * j == rep.witness_text(" ").split()
    assert j <= aut.k - 2
    assert K.is_sync_word(aut, w)
    # and the forward direction: lifted original witnesses synchronize the output
    orig = shortest_sync(aut)
    assert K.is_sync_word(red.automaton, red.lift([aut.symbols[i] for i in orig.witness]))


def test_reduce_preserves_determinism_and_transitivity():
    aut = K.cerny(5).add_symbol("c", np.array([1, 2, 3, 4, 0]))
    red = K.reduce_to_two(aut, "a", StateSet(0))
    assert is_complete(red.automaton)
    assert is_transitive(red.automaton)
    assert red.automaton.n == 5 + 5 * (3 - 2)


def test_reduce_rejects_condition_violations():
    aut = K.pfa_hm(2, 2, 4, "s,c,rc")
    with pytest.raises(ValueError, match="condition 2"):
        K.reduce_to_two(aut, "s", StateSet.of(K.hm_state(2, 4, 2)))
    with pytest.raises(ValueError, match="condition 1"):
        K.reduce_to_two(aut, "rc", StateSet(0))


@pytest.mark.parametrize("k", [4, 5, 6])
def test_detect_Qprime(k):
    aut = K.pfa_hm(2, 2, k, "s,c,rc")
    found = K.detect_Qprime(aut, "s")
    assert a_from(k) <= found
    assert found == StateSet.from_states([K.hm_state(2, 1, 0), K.hm_state(2, 2, 0)] + list(a_from(k).states()))
    assert K.detect_Qprime(K.pfa_hm(2, 2, k), "s") == StateSet(0)


@pytest.mark.parametrize("h, m, k", [(2, 2, 9), (1, 3, 8), (2, 2, 10)])
def test_tilde_construction(h, m, k):
    aut = K.pfa_hm_tilde(h, m, k)
    assert aut.n == (m + 1) * k and is_complete(aut.restrict_symbols(["s'"]))
    s_row = K._hm_tables(h, m, k)[1]
    assert np.array_equal(K.compose(aut, ["c", "s'"] * k), s_row)
    found = K.detect_Qprime(aut, "s'")
    shown = K.pfa_hm_tilde_Qprime(h, m, k)
    assert shown <= found
    K.check_conditions(aut, "s'", shown, 1)
    assert K.is_sync_word(aut, K.pfa_hm_tilde_word(h, m, k))


def test_tilde_synchronizes():
    aut = K.pfa_hm_tilde(2, 2, 9)
    assert shortest_sync(aut).synchronizing
    red = K.reduce_to_two(aut, "s'", K.detect_Qprime(aut, "s'"))
    assert K.is_sync_word(red.automaton, red.lift(K.pfa_hm_tilde_word(2, 2, 9)))


# --- single undefined transition -------------------------------------------


@pytest.mark.parametrize("k", [2, 3])
def test_single_undef(k):
    m = 3
    aut = K.single_undef(m, k)
    assert aut.n == (2 * m - 1) * k
    assert undefined_count(aut) == 1
    assert aut.row("r")[K.su_state(m, 1, m - 1) - 1] is None
    defined = [t for t in aut.row("r") if t is not None]
    assert len(defined) == len(set(defined))
    assert is_transitive(aut)
    assert sync_len(aut) >= min_steps_to_B(system_cyclic(m), k)
    assert K.is_sync_word(aut, K.single_undef_word(m, k))


def test_single_undef_start_set():
    m, k = 3, 3
    aut = K.single_undef(m, k)
    assert image(aut, full_set(aut), "s") == K.su_set(m, (0,) + (1,) * (k - 1))


@pytest.mark.parametrize("k", [2, 3])
def test_single_undef_m4_word(k):
    aut = K.single_undef(4, k)
    assert undefined_count(aut) == 1
    assert K.is_sync_word(aut, K.single_undef_word(4, k))


def test_single_undef_binary():
    m, k = 3, 7
    red = K.single_undef_binary(m, k)
    b = red.automaton
    assert b.k == 2 and undefined_count(b) == 1
    assert b.row("a").count(None) == 0
    word = red.lift(K.single_undef_three_word(m, k))
    assert run_word(b, full_set(b), word).is_singleton()
    aut3 = K.single_undef_three(m, k)
    assert len(K.detect_Qprime(aut3, "s'")) >= (2 * m - 2) * (k - 6)
    assert undefined_count(aut3) == 1


# --- padding ----------------------------------------------------------------


@pytest.mark.parametrize("n", range(9, 15))
def test_pfa_hm_n_padding(n):
    aut = K.pfa_hm_n(2, 2, n)
    base = K.pfa_hm(2, 2, n // 3)
    assert aut.n == n
    assert is_transitive(aut)
    assert sync_len(aut) >= sync_len(base)


def test_single_undef_padding_keeps_undefined_state():
    aut = K.single_undef_n(3, 12)
    assert aut.n == 12 and undefined_count(aut) == 1
    assert is_transitive(aut)
    assert sync_len(aut) >= sync_len(K.single_undef(3, 2))
    q = K.su_state(3, 1, 2)
    assert len(incoming_arrows(aut, q)) == len(incoming_arrows(K.single_undef(3, 2), q))


def test_parameter_errors():
    for bad in (lambda: K.t_n(2), lambda: K.p_n(2), lambda: K.pfa_hm(0, 2, 3), lambda: K.pfa_hm(2, 2, 8, "xyz"),
                lambda: K.pfa_hm_tilde(2, 2, 8), lambda: K.single_undef(2, 3), lambda: K.single_undef_binary(3, 6)):
        with pytest.raises(ValueError):
            bad()
