import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdimlab import exactla as la
from gdimlab.errors import DimensionError, InputError

P = 101


def naive_rref(m, p):
    """Textbook Gauss-Jordan on Python ints, used as the oracle."""
    a = [[int(v) % p for v in row] for row in m]
    rows, cols = len(a), len(a[0]) if a else 0
    pivots, r = [], 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [v * inv % p for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(v - f * w) % p for v, w in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return np.array(a, dtype=np.int64).reshape(rows, cols), tuple(pivots)


def low_rank(rng, rows, cols, rank, p=P):
    return (rng.integers(0, p, (rows, rank)) @ rng.integers(0, p, (rank, cols))) % p


matrices = st.tuples(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1), st.integers(0, 12))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rref_matches_gauss_jordan(spec):
    rows, cols, seed, r = spec
    m = low_rank(np.random.default_rng(seed), rows, cols, min(r, rows, cols))
    red, piv = la.rref(m, P)
    want, wpiv = naive_rref(m, P)
    assert piv == wpiv
    assert np.array_equal(red, want)
    assert la.rank(m, P) == len(wpiv) == la.rank(m.T, P)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_nullspace_is_kernel_with_identity_on_free_columns(spec):
    rows, cols, seed, r = spec
    m = low_rank(np.random.default_rng(seed), rows, cols, min(r, rows, cols))
    basis, free = la.nullspace(m, P)
    assert basis.shape[0] == cols - la.rank(m, P)
    assert not (m @ basis.T % P).any()
    assert np.array_equal(basis[:, free], np.eye(len(free), dtype=np.int64))


def test_blocked_path_agrees_with_oracle():
    # large enough to go through the recursive panels
    rng = np.random.default_rng(7)
    m = low_rank(rng, 90, 110, 57)
    red, piv = la.rref(m, P)
    want, wpiv = naive_rref(m, P)
    assert piv == wpiv and np.array_equal(red, want)


def test_large_prime_stays_exact():
    p = 67108859
    rng = np.random.default_rng(3)
    m = low_rank(rng, 40, 40, 23, p)
    assert la.rank(m, p) == naive_rref(m, p)[1].__len__() == 23


def test_solve_and_inconsistent_system():
    rng = np.random.default_rng(1)
    m = low_rank(rng, 8, 6, 4)
    x = rng.integers(0, P, 6)
    b = m @ x % P
    sol = la.solve(m, b, P)
    assert np.array_equal(m @ sol % P, b)
    e = np.zeros(8, dtype=np.int64)
    # a vector outside the column space
    for i in range(8):
        e[:] = 0
        e[i] = 1
        if la.rank(np.column_stack([m, e]), P) > la.rank(m, P):
            assert la.solve(m, e, P) is None
            break
    with pytest.raises(DimensionError):
        la.solve(m, np.zeros(3), P)


def test_quotient_projection_kills_rows():
    rng = np.random.default_rng(2)
    rows = low_rank(rng, 3, 7, 2)
    proj, keep = la.quotient_projection(rows, 7, P)
    assert proj.shape == (5, 7)
    assert not (proj @ rows.T % P).any()
    assert np.array_equal(proj[:, keep], np.eye(5, dtype=np.int64))


def test_complement_columns_completes_span():
    rng = np.random.default_rng(4)
    rows = low_rank(rng, 4, 9, 3)
    comp = la.complement_columns(rows, 9, P)
    full = np.vstack([rows, np.eye(9, dtype=np.int64)[comp]])
    assert len(comp) == 6 and la.rank(full, P) == 9
    tall = rng.integers(0, P, (30, 9))
    assert la.complement_columns(tall, 9, P) == []


def test_subspace_operations():
    a = la.Subspace.from_rows([[1, 0, 0], [0, 1, 0]], 3, P)
    b = la.Subspace.from_rows([[0, 1, 0], [0, 0, 1]], 3, P)
    assert la.subspace_intersection(a, b).dim == 1
    assert la.subspace_sum(a, b) == la.Subspace.full(3, P)
    assert a.contains([2, 5, 0]) and not a.contains([0, 0, 1])
    assert la.subspace_equal(a, la.Subspace.from_rows([[1, 1, 0], [1, 2, 0]], 3, P))
    assert la.Subspace.zero(3, P).dim == 0
    with pytest.raises(DimensionError):
        la.subspace_sum(a, la.Subspace.zero(4, P))


def test_field_validation():
    with pytest.raises(InputError):
        la.PrimeField(100)
    with pytest.raises(InputError):
        la.PrimeField(2)
    assert la.PrimeField(7).inv(3) == 5


def test_empty_shapes():
    assert la.rank(np.zeros((0, 5)), P) == 0
    basis, free = la.nullspace(np.zeros((0, 3), dtype=np.int64), P)
    assert basis.shape == (3, 3) and free == [0, 1, 2]
