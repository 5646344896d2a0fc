import itertools

import numpy as np
import pytest
import sympy
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from gdimlab.algebra import (
    GradedAlgebra,
    algebra_from_json,
    build_circulant_ring,
    build_quadratic_quotient,
    circulant_minors,
    find_minimal_reduction,
    hilbert_coeffs,
    is_good_shape,
    is_minimal_reduction,
    parse_linear,
    parse_quadric,
    quotient_by_quadric,
    socle,
    socle_type,
    trivial_square_ring,
    veliche_ring,
)
from gdimlab.errors import InputError, SchemaError

P = 101


def quadratic_part_dim(num_vars, quadrics, names):
    """dim of degree-two forms modulo the quadrics, by sympy over F_p."""
    syms = sympy.symbols(names)
    monos = [a * b for a, b in itertools.combinations_with_replacement(syms, 2)]
    rows = []
    for q in quadrics:
        poly = sympy.Poly(sympy.sympify(q.replace("^", "**"), locals=dict(zip(names, syms))), *syms)
        rows.append([GF(P)(int(poly.coeff_monomial(m))) for m in monos])
    return len(monos) - DomainMatrix(rows, (len(rows), len(monos)), GF(P)).convert_to(GF(P)).rank()


@pytest.mark.parametrize("r", [2, 3, 4, 5, 6])
def test_circulant_ring_dimensions(r):
    S = build_circulant_ring(r, P)
    # (r+1 choose 2) + (r+1) quadratic monomials, minus the 2-minors
    assert (S.dim1, S.dim2) == (r + 1, r + 1)
    assert len(circulant_minors(r)) == (r + 1) * r // 2


def test_circulant_minor_rank_matches_sympy():
    r = 3
    names = [f"X{i}" for i in range(r + 1)]
    X = sympy.symbols(names)
    mat = sympy.Matrix([list(X), list(X[1:]) + [X[0]]])
    minors = [str(sympy.expand(mat[0, i] * mat[1, j] - mat[0, j] * mat[1, i]))
              for i, j in itertools.combinations(range(r + 1), 2)]
    dim2 = quadratic_part_dim(r + 1, minors, names)
    assert dim2 == build_circulant_ring(r, P).dim2


def test_veliche_ring_shape():
    V = veliche_ring(P)
    assert hilbert_coeffs(V) == (1, 4, 3)
    assert socle(V).dim == 3 and socle_type(V) == 3
    assert is_good_shape(V)


def test_quotient_shape(ring2, ring3):
    for (R, _), r in ((ring2, 2), (ring3, 3)):
        assert hilbert_coeffs(R) == (1, r + 1, r)
        assert socle(R).dim == r


def test_parse_quadric():
    q = parse_quadric("x*y - 2*z^2 + y*x", ["x", "y", "z"], P)
    assert q == {(0, 1): 2, (2, 2): P - 2}
    assert parse_quadric("x^2/2", ["x"], P) == {(0, 0): pow(2, -1, P)}
    with pytest.raises(InputError):
        parse_quadric("x^3", ["x"], P)
    with pytest.raises(InputError):
        parse_quadric("x*(", ["x"], P)


def test_parse_linear(ring2):
    R, _ = ring2
    e = parse_linear("X0 - 2*X2", R)
    assert e.degree == 1 and e.coords.tolist() == [1, 0, P - 2]
    assert parse_linear("0", R).is_zero()
    with pytest.raises(InputError):
        parse_linear("X0*X1", R)


def test_multiplication_is_commutative_and_bilinear(ring3):
    R, _ = ring3
    rng = np.random.default_rng(0)
    a, b, c = (R.element(1, rng.integers(0, P, R.dim1)) for _ in range(3))
    assert R.mul(a, b) == R.mul(b, a)
    assert R.mul(R.add(a, b), c) == R.add(R.mul(a, c), R.mul(b, c))
    assert R.mul(R.scale(3, a), b) == R.scale(3, R.mul(a, b))


def test_minimal_reduction(ring2):
    R, _ = ring2
    x = find_minimal_reduction(R, 0)
    assert is_minimal_reduction(R, x)
    assert not is_minimal_reduction(R, R.zero(1))


def test_quotient_by_quadric_rejects_bad_input():
    S = build_circulant_ring(2, P)
    with pytest.raises(InputError):
        quotient_by_quadric(S, S.zero(2))
    with pytest.raises(InputError):
        quotient_by_quadric(S, S.zero(1))


def test_trivial_square_ring():
    R = trivial_square_ring(2, P)
    assert R.dims == (1, 2, 0)
    assert socle(R).dim == 2


def test_json_round_trip_and_tampering():
    S = build_circulant_ring(3, P)
    doc = S.to_json()
    back = algebra_from_json(doc)
    assert back.same_as(S) and back.content_hash() == S.content_hash()
    assert type(back) is type(S)
    bad = dict(doc)
    mult = np.array(doc["mult11"])
    mult[0, 1, 0] = (mult[0, 1, 0] + 1) % P
    bad["mult11"] = mult.tolist()
    with pytest.raises(SchemaError):
        algebra_from_json(bad)
    with pytest.raises(SchemaError):
        algebra_from_json({**doc, "schema": 2})


def test_build_quadratic_quotient_with_dict_quadrics():
    R = build_quadratic_quotient(2, [{(0, 0): 1}, {(1, 1): 1}], P, ("x", "y"))
    assert R.dims == (1, 2, 1)
    x, y = R.basis_element(1, 0), R.basis_element(1, 1)
    assert R.mul(x, x).is_zero() and not R.mul(x, y).is_zero()
    assert isinstance(R, GradedAlgebra)
