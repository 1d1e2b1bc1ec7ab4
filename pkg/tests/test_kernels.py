"""The numba and numpy backends must agree on every kernel."""
import numpy as np
import pytest

from conftest import random_automaton
from synchrolab import _accel, kernels
from synchrolab import constructions as K
from synchrolab.sync import subset_sizes


@pytest.fixture
def both(monkeypatch):
    def run(fn):
        monkeypatch.setenv("SYNCHROLAB_BACKEND", "numba")
        a = fn()
        monkeypatch.setenv("SYNCHROLAB_BACKEND", "numpy")
        b = fn()
        monkeypatch.delenv("SYNCHROLAB_BACKEND")
        return a, b

    return run


def same(a, b):
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def test_backend_selection(monkeypatch):
    monkeypatch.setenv("SYNCHROLAB_BACKEND", "numpy")
    assert _accel.backend() == "numpy"
    monkeypatch.setenv("SYNCHROLAB_BACKEND", "bogus")
    with pytest.raises(ValueError):
        _accel.backend()


@pytest.mark.parametrize("seed", range(40))
def test_sync_bfs_parity(both, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    aut = random_automaton(rng, n, int(rng.integers(1, 4)), partial=seed % 2 == 0)
    start = int(rng.integers(0, 1 << n))
    a, b = both(lambda: kernels.sync_bfs(aut.delta, n, start))
    assert a == b


@pytest.mark.parametrize("cap", [1, 2, 5, 17, 60, 0])
def test_sync_bfs_node_cap_parity(both, cap):
    for aut in (K.cerny(6), K.p_n(7), K.t_n(5)):
        a, b = both(lambda: kernels.sync_bfs(aut.delta, aut.n, (1 << aut.n) - 1, cap))
        assert a == b


def test_sync_bfs_known_words(both):
    aut = K.cerny(9)
    a, b = both(lambda: kernels.sync_bfs(aut.delta, 9, (1 << 9) - 1))
    assert a == b and a[0] == 64


@pytest.mark.parametrize("seed", range(12))
def test_subset_distances_parity(both, seed):
    rng = np.random.default_rng(seed)
    aut = random_automaton(rng, int(rng.integers(1, 7)), int(rng.integers(1, 4)), partial=seed % 3 == 0)
    a, b = both(lambda: kernels.subset_distances(aut.delta, aut.n))
    assert same(a, b)


@pytest.mark.parametrize("seed", range(30))
@pytest.mark.parametrize("legacy", [False, True])
def test_bound_tables_parity(both, seed, legacy):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    aut = random_automaton(rng, n, int(rng.integers(1, 3)), partial=seed % 2 == 1)
    D = kernels.subset_distances(aut.delta, n)
    a, b = both(lambda: kernels.bound_tables(D, subset_sizes(n), n, legacy))
    assert same(a, b)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_batch_kernels_parity(both, n):
    rng = np.random.default_rng(n)
    base = rng.integers(0, n, size=(1, n))
    cand = rng.integers(-1, n, size=(120, n))
    a, b = both(lambda: kernels.sync_lengths_batch(base, cand, n))
    assert same(a, b)
    for legacy in (False, True):
        a, b = both(lambda: kernels.lpp_batch(base, cand, n, legacy))
        assert same(a, b)
    full = np.clip(cand, 0, None)
    a, b = both(lambda: kernels.reducible_pair_counts(base, full, n))
    assert same(a, b)


@pytest.mark.parametrize("sort_rows", [True, False])
def test_canonical_key_parity(both, sort_rows):
    rng = np.random.default_rng(7)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        d = rng.integers(-1, n, size=(int(rng.integers(1, 4)), n))
        extra = int(rng.integers(0, 1 << n))
        a, b = both(lambda: kernels.canonical_key(d, n, sort_rows, extra))
        assert a[0] == b[0]
        a, b = both(lambda: kernels.canonical_key(d, n, sort_rows))
        assert a[0] == b[0]


@pytest.mark.parametrize("h, m, k, family", [(2, 2, 8, 0), (1, 3, 7, 0), (3, 2, 9, 0), (1, 3, 6, 1)])
def test_rewrite_bfs_parity(both, h, m, k, family):
    for stop in (True, False):
        a, b = both(lambda: kernels.rewrite_bfs(h, m, k, family, stop_at_target=stop))
        assert a[0] == b[0] and same(a[1], b[1]) and same(a[2], b[2]) and a[3] == b[3]


@pytest.mark.parametrize("n, proper", [(3, False), (3, True), (4, False), (4, True)])
def test_enumerate_pairs_parity(both, n, proper):
    maps = kernels.all_maps(n, partial=proper)
    reps = kernels.conjugacy_representatives(maps, n)
    a, b = both(lambda: kernels.enumerate_pairs(reps, maps, n, proper))
    assert same(a[0], b[0]) and a[1] == b[1]


def test_conjugacy_representatives_count():
    # conjugacy classes of all maps on 3 points
    reps = kernels.conjugacy_representatives(kernels.all_maps(3, partial=False), 3)
    assert len(reps) == 7
