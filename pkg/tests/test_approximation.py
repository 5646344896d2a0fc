import itertools

import pytest

from gdimlab.approximation import (
    ApproximationCandidate,
    build_R_from_reduction,
    candidate_audit,
    closed_form_margin,
    obstruction_unsatisfiable,
    projection_to_k,
    symbolic_reduction,
    wakamatsu_check,
    x_exactness_failures,
    y_dimension_constraints,
)
from gdimlab.constructions import cyclic_certificate
from gdimlab.errors import InputError
from gdimlab.gdim import direct_sum_certificate, free_certificate
from gdimlab.gmodule import residue_field, ring_module

P = 101


def test_dimension_formula_by_hand():
    # X = R^u + sum of nonfree summands N_j with s_j generators and dims (s_j, r s_j)
    # Y = ker(X -> k) has dims (u + sum s - 1, u (r+1) + r sum s, r u)
    c = y_dimension_constraints(2, 1, (2, 3))
    assert c.dims == (5, 13, 2)
    assert c.lhs == 7 and c.rhs == 13 and c.margin == 6 == closed_form_margin(2, (2, 3))
    with pytest.raises(InputError):
        y_dimension_constraints(2, 0, ())
    with pytest.raises(InputError):
        y_dimension_constraints(2, -1, (1,))


@pytest.mark.parametrize("r", [2, 3, 4, 5, 6])
def test_obstruction_table(r):
    t = obstruction_unsatisfiable(r, 3, 3, 3)
    # brute-force count of shapes: u in 0..3, multisets of size <= 3 from {1,2,3}, minus the empty one
    shapes = sum(1 for _ in range(4) for k in range(4)
                 for _ in itertools.combinations_with_replacement(range(3), k)) - 1
    assert len(t.rows) == shapes == 79
    assert t.satisfiable == [] and t.margins_match and not t.out_of_hypothesis


def test_r_equal_one_is_out_of_hypothesis():
    t = obstruction_unsatisfiable(1, 2, 2, 2)
    assert t.out_of_hypothesis
    # with r = 1 the margin is 1 everywhere, still positive
    assert {row.margin for row in t.rows} == {1}


def test_symbolic_reduction():
    sym = symbolic_reduction()
    assert sym["u_cancels"]
    assert sym["sigma_s"] == ["-1/(r - 1)"]


def test_x_exactness(reduction2):
    S, R, x = reduction2
    # over S/x^2 S the free module is x-exact: ker(x) = xR in every degree
    assert x_exactness_failures(ring_module(R), x) == []
    # x acts by zero on R/xR and on k
    cyc, M = cyclic_certificate(R, x)
    assert x_exactness_failures(M, x) == [0, 1]
    assert x_exactness_failures(residue_field(R), x) == [0]


def test_wakamatsu(reduction2):
    S, R, x = reduction2
    cyc, M = cyclic_certificate(R, x)
    k = residue_field(R)
    assert not wakamatsu_check(M, k)
    assert wakamatsu_check(ring_module(R), k)


def test_audits_reject_candidates(reduction2):
    S, R, x = reduction2
    cyc, _ = cyclic_certificate(R, x)
    free = free_certificate(ring_module(R))
    battery = [cyc, free]
    c = ApproximationCandidate(free.module, free, projection_to_k(free.module), 1, ())
    rep = candidate_audit(c, battery, x)
    assert rep.failures == ["ext1:battery[0]", "dimension-equation", "x-exactness:degree 1"]
    assert rep.details["Y_dims"] == rep.details["Y_expected"] == [0, 3, 2]
    s = direct_sum_certificate(cyc, free)
    c2 = ApproximationCandidate(s.module, s, projection_to_k(s.module), 1, (1,))
    rep2 = candidate_audit(c2, battery, x)
    assert not rep2.survives and rep2.first_failure == "ext1:battery[0]"
    wrong_shape = ApproximationCandidate(s.module, s, projection_to_k(s.module), 2, ())
    assert "declared-shape" in candidate_audit(wrong_shape, battery, x).failures


def test_audit_input_errors(reduction2):
    S, R, x = reduction2
    free = free_certificate(ring_module(R))
    k = residue_field(R)
    with pytest.raises(InputError):
        candidate_audit(ApproximationCandidate(k, free, projection_to_k(k), 1, ()), [], x)


def test_build_R_from_reduction_rejects_non_reduction(reduction2):
    S, R, x = reduction2
    with pytest.raises(InputError):
        build_R_from_reduction(S, S.zero(1))
    assert R.dims == (1, 3, 2)
