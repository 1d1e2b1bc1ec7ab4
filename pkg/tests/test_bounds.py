import numpy as np
import pytest
from hypothesis import given, settings

from conftest import automata, random_automaton
from oracles import INF, bounds_L_Lprime, floyd_warshall
from synchrolab import constructions as K
from synchrolab.automaton import Automaton, canonical_form
from synchrolab.bounds import bound_L, bound_Lpp, bound_Lprime, bound_report
from synchrolab.sync import shortest_sync
from synchrolab.verify import load_fixture


def reset_dfa():
    return Automaton.from_rows(3, {"a": [2, 3, 1], "z": [1, 1, 1]})


def test_reset_symbol():
    aut = reset_dfa()
    r = bound_report(aut)
    assert r.smallest_reachable_size == 1
    assert r.L == r.m == 1
    assert bound_Lprime(aut) == 1
    assert bound_Lpp(aut) == 1


def test_cerny4_bounds_dominate_length():
    aut = K.cerny(4)
    r = bound_report(aut)
    assert min(r.L, r.Lprime, r.Lpp) >= 9
    assert r.Lprime <= r.L


def test_permutation_group_hand_case():
    aut = load_fixture("permutation.aut")  # generates S_3
    r = bound_report(aut)
    nodes, d = floyd_warshall(aut)
    pairs = [i for i, S in enumerate(nodes) if len(S) == 2]
    diam2 = max(d[i][j] for i in pairs for j in pairs)
    # {2,3} a = {1,3}, b = {1,3}; then a reaches {1,2}: two steps
    assert diam2 == 2
    assert (r.smallest_reachable_size, r.m, r.M) == (3, 0, 0)
    assert r.m_k == {2: 1 + diam2, 3: 1}
    assert r.l_k == {2: 0, 3: 0}
    assert r.c == 1
    assert r.L == 4
    assert r.Lprime == 4


def test_report_json_shape():
    out = bound_report(K.cerny(4)).to_dict()
    assert {"L", "Lprime", "Lpp", "m_k", "l_k", "c", "Lpp_R"} <= set(out)


@settings(max_examples=150, deadline=None)
@given(automata(max_n=4, max_k=2))
def test_L_Lprime_vs_recipe_oracle(aut):
    r = bound_report(aut)
    assert (r.smallest_reachable_size, r.m, r.M, r.L, r.Lprime) == bounds_L_Lprime(aut)


@settings(max_examples=200, deadline=None)
@given(automata(max_n=5, max_k=2))
def test_Lprime_at_most_L_and_nonnegative(aut):
    r = bound_report(aut)
    assert r.Lprime <= r.L
    assert min(r.m, r.M, r.c, r.L, r.Lprime, r.Lpp) >= 0
    assert all(v >= 0 for v in list(r.m_k.values()) + list(r.l_k.values()))


@settings(max_examples=120, deadline=None)
@given(automata(max_n=5, max_k=2))
def test_permutation_invariance(aut):
    r1 = bound_report(aut)
    r2 = bound_report(canonical_form(aut).automaton)
    assert (r1.L, r1.Lprime, r1.Lpp) == (r2.L, r2.Lprime, r2.Lpp)


def _sweep(seed, count, nmax):
    """Random base automata and random one-symbol extensions; yields (base report, extension length)."""
    rng = np.random.default_rng(seed)
    done = 0
    while done < count:
        n = int(rng.integers(2, nmax + 1))
        partial = bool(rng.integers(0, 2))
        base = random_automaton(rng, n, int(rng.integers(1, 3)), partial=partial)
        row = rng.integers(0, n, size=n)
        if partial:
            row = np.where(rng.random(n) < 0.2, -1, row)
        ext = base.add_symbol("z", row)
        rep = shortest_sync(ext)
        if not rep.synchronizing:
            continue
        done += 1
        yield base, bound_report(base), bound_report(base, legacy_lpp=True), rep.length


def test_soundness_sweep_extensions():
    for base, r, legacy, length in _sweep(1, 400, 5):
        assert length <= r.L
        assert length <= r.Lprime
        assert length <= r.Lpp
        assert length <= legacy.Lpp
        assert r.Lprime <= r.L


def test_soundness_on_synchronizing_automata_themselves(rng):
    hits = 0
    while hits < 200:
        aut = random_automaton(rng, int(rng.integers(2, 7)), 2, partial=bool(rng.integers(0, 2)))
        rep = shortest_sync(aut)
        if not rep.synchronizing:
            continue
        hits += 1
        r = bound_report(aut)
        assert rep.length <= min(r.L, r.Lprime, r.Lpp)


def test_legacy_flag_never_tighter(rng):
    for _ in range(200):
        aut = random_automaton(rng, int(rng.integers(2, 6)), 2, partial=True)
        assert bound_Lpp(aut) <= bound_Lpp(aut, legacy_lpp=True)
        assert bound_report(aut, legacy_lpp=True).legacy_lpp


def test_Lpp_R_only_for_reducible_sets():
    aut = K.cerny(4)
    r = bound_report(aut)
    nodes, d = floyd_warshall(aut)
    for bits, value in r.Lpp_R.items():
        S = frozenset(q + 1 for q in range(4) if bits >> q & 1)
        i = nodes.index(S)
        assert any(d[i][j] < INF and len(nodes[j]) < len(S) for j in range(len(nodes)))
        assert value >= 0


def test_bound_L_wrapper():
    with pytest.raises(ValueError):
        bound_L(K.cerny(13))
