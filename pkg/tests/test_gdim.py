import numpy as np
import pytest

from gdimlab.algebra import parse_linear, veliche_ring
from gdimlab.constructions import FamilySpec, default_z, family_module
from gdimlab.errors import CertificateRejected, InputError, NotAComplex
from gdimlab.gdim import (
    BOUNDED,
    EXTENSION,
    FREE,
    PERIODIC,
    GdimCertificate,
    check_gdim_zero_bounded,
    direct_sum_certificate,
    filtration_certificate,
    free_certificate,
    linear_module_checks,
    short_exact_failures,
    verify_certificate,
    verify_extension,
    verify_periodic_cr,
    verify_theorem31,
)
from gdimlab.gmodule import free_module, identity_map, residue_field, ring_module

P = 101


def veliche_matrices(V):
    e = {n: V.basis_element(1, i) for i, n in enumerate(V.names)}
    neg = lambda a: V.scale(-1, a)  # noqa: E731
    return [[e["z"], e["x"]], [e["w"], e["y"]]], [[e["y"], neg(e["x"])], [neg(e["w"]), e["z"]]]


def test_two_periodic_certificate_veliche():
    V = veliche_ring(P)
    d1, d2 = veliche_matrices(V)
    cert, M = verify_periodic_cr(V, d1, d2)
    assert cert.kind == PERIODIC and cert.exact
    assert list(M.normalized().dims) == [2, 6]
    assert verify_certificate(cert)


def test_periodic_rejections():
    V = veliche_ring(P)
    d1, d2 = veliche_matrices(V)
    # using d1 twice does not give a complex
    with pytest.raises(NotAComplex):
        verify_periodic_cr(V, d1)
    x = V.basis_element(1, 0)
    # here x^2 = 0 and x R1 = R2, so R/xR is certified by a one-periodic complex
    assert verify_periodic_cr(V, [[x]])[0].exact
    with pytest.raises(NotAComplex):
        verify_periodic_cr(V, [[V.basis_element(1, 1)]])
    with pytest.raises(InputError):
        verify_periodic_cr(V, d1, [[x]])


def test_square_zero_ring_rejects_periodic(square_zero):
    # x^2 = 0 but ker(x) = m is larger than xR
    x = square_zero.basis_element(1, 0)
    with pytest.raises(CertificateRejected):
        verify_periodic_cr(square_zero, [[x]])


def test_free_certificate(ring2):
    R, _ = ring2
    cert = free_certificate(free_module(R, [0, 1]))
    assert cert.kind == FREE and verify_certificate(cert)
    with pytest.raises(CertificateRejected):
        free_certificate(residue_field(R))


def test_extension_checks(ring2):
    R, cert = ring2
    x = parse_linear(" + ".join(f"{int(c)}*{n}" for c, n in zip(cert.payload["d1"][0][0], R.names)), R)
    M2, fcert = family_module(R, FamilySpec(x, default_z(R, x), 2))
    step = fcert.payload["steps"][-1]
    assert step.kind == EXTENSION
    assert short_exact_failures(step.payload["iota"], step.payload["pi"]) == []
    # swapping in a non-injective left map is caught
    bad = step.payload["iota"]
    zero = type(bad)(bad.source, bad.target, {d: 0 * b for d, b in bad.blocks.items()})
    with pytest.raises(InputError):
        verify_extension(step.payload["sub"], step.payload["quotient"], M2, zero, step.payload["pi"])


def test_direct_sum_certificate(ring2):
    R, cert = ring2
    s = direct_sum_certificate(cert, free_certificate(ring_module(R)))
    assert s.kind == EXTENSION and verify_certificate(s)
    assert [s.module.piece(d) for d in range(3)] == [2, 5, R.dim2]


def test_filtration_needs_chain(ring2):
    R, cert = ring2
    with pytest.raises(InputError):
        filtration_certificate([])
    f = free_certificate(ring_module(R))
    with pytest.raises(InputError):
        filtration_certificate([cert, direct_sum_certificate(f, f)])


def test_verify_rejects_tampered_payload(ring2):
    R, cert = ring2
    d1 = [[list(c) for c in row] for row in cert.payload["d1"]]
    d1[0][0][0] = (d1[0][0][0] + 1) % P
    fake = GdimCertificate(PERIODIC, cert.module, {**cert.payload, "d1": d1})
    assert not verify_certificate(fake)
    assert not verify_certificate(GdimCertificate("Nonsense", cert.module, {}))


def test_bounded_check(ring2, square_zero):
    R, cert = ring2
    ok = check_gdim_zero_bounded(cert.module, 4)
    assert ok.kind == BOUNDED and ok.passed and not ok.exact
    assert verify_certificate(ok)
    bad = check_gdim_zero_bounded(residue_field(R), 3)
    assert not bad.passed and bad.payload["failures"][0] == "bidual"
    k0 = check_gdim_zero_bounded(residue_field(square_zero), 2)
    assert "Ext^1(M,R)" in k0.payload["failures"]


def test_linear_module_checks_and_structure_report(ring2):
    R, cert = ring2
    lin = linear_module_checks(cert.module, 5)
    assert all(lin["flags"].values())
    assert lin["numbers"]["betti_diagonal"] == [1] * 6
    rep = verify_theorem31(R, cert.module, cert, N=5)
    assert rep.all_ok and rep.failures() == []
    assert rep.as_dict()["numbers"]["bass"] == [2, 3, 6, 12, 24, 48]
    free = verify_theorem31(R, ring_module(R), free_certificate(ring_module(R)), N=3)
    assert "nonfree" in free.failures()


def test_identity_is_short_exact_with_zero(ring2):
    R, cert = ring2
    M = cert.module
    ident = identity_map(M)
    assert short_exact_failures(ident, ident)
    assert np.array_equal(ident.block(0), np.eye(1, dtype=np.int64))
