"""Cross-module invariants checked on random inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gdimlab.algebra import trivial_square_ring
from gdimlab.exactla import nullspace, rank
from gdimlab.gmodule import Presentation, coker, direct_sum, free_module, minimal_resolution
from gdimlab.homology import dual, ext

P = 101
seeds = st.integers(0, 2**32 - 1)


def random_coker(R, rng, gens, rels):
    rows = [[R.element(1, rng.integers(0, P, R.dim1)) for _ in range(rels)] for _ in range(gens)]
    return coker(Presentation.from_matrix(R, rows))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 7), st.integers(1, 7))
def test_rank_of_transpose(seed, m, n):
    a = np.random.default_rng(seed).integers(0, P, (m, n))
    assert rank(a, P) == rank(a.T.copy(), P)
    basis, _ = nullspace(a, P)
    assert basis.shape[0] + rank(a, P) == n


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(1, 2), st.integers(1, 2))
def test_direct_sum_is_additive(seed, gens, rels):
    rng = np.random.default_rng(seed)
    R = trivial_square_ring(2, P)
    M = random_coker(R, rng, gens, rels)
    N = random_coker(R, rng, gens, rels)
    S = direct_sum(M, N)
    hs, hm, hn = S.hilbert(), M.hilbert(), N.hilbert()
    for d in set(hs) | set(hm) | set(hn):
        assert hs.get(d, 0) == hm.get(d, 0) + hn.get(d, 0)
    bs, bm, bn = (minimal_resolution(X, 2).betti for X in (S, M, N))
    for i in range(3):
        assert bs.total(i) == bm.total(i) + bn.total(i)


@settings(max_examples=10, deadline=None)
@given(seeds, st.lists(st.integers(-1, 2), min_size=1, max_size=3))
def test_free_modules_have_no_higher_ext(seed, shifts):
    rng = np.random.default_rng(seed)
    R = trivial_square_ring(2, P)
    F = free_module(R, shifts)
    assert ext(F, random_coker(R, rng, 1, 1), 2).vanishes(1, 2)
    assert minimal_resolution(F, 2).betti.totals(2) == [len(shifts), 0, 0]


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(-1, 2), min_size=1, max_size=3))
def test_dual_of_free_has_same_length(shifts):
    R = trivial_square_ring(2, P)
    F = free_module(R, shifts)
    assert dual(F).length == F.length
