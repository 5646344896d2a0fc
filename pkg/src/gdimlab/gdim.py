"""Evidence that a module has G-dimension zero.

Three kinds of evidence are supported:

* ``PeriodicCR``: a square matrix d of linear forms (or a pair d1, d2) whose
  periodic complex of free modules is exact, together with its transpose.
  This proves G-dimension zero for coker(d) outright.
* ``Extension`` / ``Filtration``: short exact sequences whose ends carry
  certificates.  G-dimension zero modules are closed under extensions.
* ``Free``: the first syzygy vanishes.
* ``BoundedExt``: reflexivity plus vanishing of Ext^i(M, R) and Ext^i(M*, R)
  for 1 <= i <= N.  This is only a semi-decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactla as la
from .algebra import Element, GradedAlgebra, is_good_shape, socle, degree_two_part
from .errors import CertificateRejected, InputError, NotAComplex
from .gmodule import (
    GradedModule,
    ModuleMap,
    Presentation,
    coker_with_generators,
    direct_sum,
    is_free,
    minimal_generators,
    minimal_resolution,
)
from .homology import (
    bass_numbers,
    bidual_check,
    dual,
    expected_bass,
    expected_koszul_betti,
    ext,
    koszul_check,
)
from .gmodule import ring_module

PERIODIC = "PeriodicCR"
EXTENSION = "Extension"
FILTRATION = "Filtration"
BOUNDED = "BoundedExt"
FREE = "Free"


@dataclass(frozen=True, eq=False)
class GdimCertificate:
    kind: str
    module: GradedModule
    payload: dict = field(default_factory=dict)
    passed: bool = True

    @property
    def exact(self) -> bool:
        """True for certificates that prove G-dimension zero (not the bounded check)."""
        return self.kind != BOUNDED and self.passed


# ---------------------------------------------------------------------------
# Periodic complete resolutions
# ---------------------------------------------------------------------------

def _as_element_matrix(R: GradedAlgebra, d) -> list[list[Element]]:
    rows = [list(r) for r in d]
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise InputError("complete-resolution matrices must be square")
    out = []
    for r in rows:
        line = []
        for e in r:
            if e is None:
                e = R.zero(1)
            elif not isinstance(e, Element):
                e = R.element(1, e)
            if e.degree != 1 and not e.is_zero():
                raise InputError("complete-resolution matrices need entries of degree one")
            line.append(e if e.degree == 1 else R.zero(1))
        out.append(line)
    return out


def graded_blocks(R: GradedAlgebra, d: list[list[Element]], e: int) -> np.ndarray:
    """Matrix of d on column vectors, from (R_e)^m to (R_{e+1})^m."""
    m = len(d)
    src, tgt = R.piece(e), R.piece(e + 1)
    out = np.zeros((m * tgt, m * src), dtype=np.int64)
    for a in range(m):
        for b in range(m):
            out[a * tgt:(a + 1) * tgt, b * src:(b + 1) * src] = R.mult_matrix(d[a][b], e)
    return out


def _transpose(d):
    return [list(col) for col in zip(*d)]


def _complex_is_zero(R, first, second) -> bool:
    """second o first = 0; with linear entries only R_0 -> R_2 can be nonzero."""
    prod = la.matmul(graded_blocks(R, second, 1), graded_blocks(R, first, 0), R.p)
    return not prod.any()


def _exact_at(R, into, out_of) -> list[int]:
    """Degrees e where ker(out_of) != im(into) on (R_e)^m."""
    p = R.p
    m = len(out_of)
    bad = []
    for e in range(3):
        amb = m * R.piece(e)
        if amb == 0:
            continue
        D_out = graded_blocks(R, out_of, e) if R.piece(e + 1) else np.zeros((0, amb), dtype=np.int64)
        ker = la.kernel_basis(D_out, p) if D_out.shape[0] else la.Subspace.full(amb, p)
        if e == 0:
            im = la.Subspace.zero(amb, p)
        else:
            im = la.image_basis(graded_blocks(R, into, e - 1), p)
        if not la.subspace_equal(ker, im):
            bad.append(e)
    return bad


def verify_periodic_cr(R: GradedAlgebra, d, partner=None, note: str = "") -> tuple[GdimCertificate, GradedModule]:
    """Certify coker(d) via the complex ... -> R^m --d--> R^m --d'--> R^m -> ...

    ``partner`` is d' for a two-periodic complex; by default d' = d.
    """
    d1 = _as_element_matrix(R, d)
    d2 = d1 if partner is None else _as_element_matrix(R, partner)
    if len(d1) != len(d2):
        raise InputError("the two maps of a periodic complex need the same size")
    for a, b in ((d1, d2), (d2, d1)):
        if not _complex_is_zero(R, a, b):
            raise NotAComplex("consecutive maps do not compose to zero")
    failures = []
    for label, (a, b) in {
        "ker d1 = im d2": (d2, d1),
        "ker d2 = im d1": (d1, d2),
        "ker d1^T = im d2^T": (_transpose(d2), _transpose(d1)),
        "ker d2^T = im d1^T": (_transpose(d1), _transpose(d2)),
    }.items():
        bad = _exact_at(R, a, b)
        if bad:
            failures.append(f"{label} fails in degree {bad[0]}")
    if failures:
        raise CertificateRejected("; ".join(sorted(set(failures))))
    pres = Presentation.from_matrix(R, d1)
    M = coker_with_generators(pres).module
    payload = {
        "d1": [[e.coords.tolist() for e in row] for row in d1],
        "d2": None if partner is None else [[e.coords.tolist() for e in row] for row in d2],
        "note": note,
    }
    return GdimCertificate(PERIODIC, M, payload), M


def free_certificate(M: GradedModule) -> GdimCertificate:
    if not is_free(M):
        raise CertificateRejected("module is not free")
    return GdimCertificate(FREE, M, {})


# ---------------------------------------------------------------------------
# Extensions and filtrations
# ---------------------------------------------------------------------------

def short_exact_failures(iota: ModuleMap, pi: ModuleMap) -> list[str]:
    p = iota.source.ring.p
    out = []
    if iota.degree or pi.degree:
        out.append("maps must have degree zero")
        return out
    if not iota.target.same_as(pi.source):
        out.append("middle terms differ")
        return out
    if not iota.is_homomorphism():
        out.append("first map is not R-linear")
    if not pi.is_homomorphism():
        out.append("second map is not R-linear")
    if not iota.is_injective():
        out.append("first map is not injective")
    if not pi.is_surjective():
        out.append("second map is not surjective")
    E = iota.target
    for deg in E.degrees():
        comp = la.matmul(pi.block(deg), iota.block(deg), p)
        if comp.any():
            out.append(f"composite is nonzero in degree {deg}")
            break
        if E.piece(deg) - la.rank(pi.block(deg), p) != la.rank(iota.block(deg), p):
            out.append(f"kernel differs from image in degree {deg}")
            break
    return out


def verify_extension(
    A_cert: GdimCertificate, B_cert: GdimCertificate, E: GradedModule, iota: ModuleMap, pi: ModuleMap
) -> GdimCertificate:
    """Certificate for E from 0 -> A -> E -> B -> 0 with certified ends."""
    for c in (A_cert, B_cert):
        if not c.exact:
            raise InputError("extension ends need exact certificates")
    if not iota.source.same_as(A_cert.module):
        raise InputError("the sub-object is not the certified module")
    if not pi.target.same_as(B_cert.module):
        raise InputError("the quotient is not the certified module")
    if not iota.target.same_as(E):
        raise InputError("the middle term is not E")
    bad = short_exact_failures(iota, pi)
    if bad:
        raise InputError("sequence is not short exact: " + "; ".join(bad))
    payload = {"sub": A_cert, "quotient": B_cert, "iota": iota, "pi": pi}
    return GdimCertificate(EXTENSION, E, payload)


def direct_sum_certificate(A_cert: GdimCertificate, B_cert: GdimCertificate) -> GdimCertificate:
    """Split extension 0 -> A -> A + B -> B -> 0."""
    A, B = A_cert.module, B_cert.module
    E = direct_sum(A, B)
    iota = {
        d: np.vstack([np.eye(A.piece(d), dtype=np.int64), np.zeros((B.piece(d), A.piece(d)), dtype=np.int64)])
        for d in A.degrees()
    }
    pi = {
        d: np.hstack([np.zeros((B.piece(d), A.piece(d)), dtype=np.int64), np.eye(B.piece(d), dtype=np.int64)])
        for d in E.degrees()
    }
    return verify_extension(A_cert, B_cert, E, ModuleMap(A, E, iota), ModuleMap(E, B, pi))


def filtration_certificate(steps: list[GdimCertificate]) -> GdimCertificate:
    """Wrap a chain of extensions M_1 c M_2 c ... c M_n into one certificate."""
    if not steps:
        raise InputError("empty filtration")
    for prev, nxt in zip(steps, steps[1:]):
        if nxt.kind != EXTENSION or not nxt.payload["sub"].module.same_as(prev.module):
            raise InputError("filtration steps do not chain")
    return GdimCertificate(FILTRATION, steps[-1].module, {"steps": steps})


def verify_certificate(cert: GdimCertificate) -> bool:
    """Re-run every check behind a certificate from its payload."""
    R = cert.module.ring
    if cert.kind == PERIODIC:
        d1 = [[R.element(1, c) for c in row] for row in cert.payload["d1"]]
        d2 = None
        if cert.payload.get("d2") is not None:
            d2 = [[R.element(1, c) for c in row] for row in cert.payload["d2"]]
        try:
            _, M = verify_periodic_cr(R, d1, d2)
        except (CertificateRejected, NotAComplex, InputError):
            return False
        return M.same_as(cert.module)
    if cert.kind == FREE:
        return is_free(cert.module)
    if cert.kind == EXTENSION:
        pl = cert.payload
        if not (verify_certificate(pl["sub"]) and verify_certificate(pl["quotient"])):
            return False
        try:
            verify_extension(pl["sub"], pl["quotient"], cert.module, pl["iota"], pl["pi"])
        except InputError:
            return False
        return True
    if cert.kind == FILTRATION:
        steps = cert.payload["steps"]
        try:
            filtration_certificate(steps)
        except InputError:
            return False
        return all(verify_certificate(s) for s in steps) and steps[-1].module.same_as(cert.module)
    if cert.kind == BOUNDED:
        again = check_gdim_zero_bounded(cert.module, cert.payload["N"])
        return again.passed == cert.passed
    return False


# ---------------------------------------------------------------------------
# Bounded check
# ---------------------------------------------------------------------------

def check_gdim_zero_bounded(M: GradedModule, N: int) -> GdimCertificate:
    """Reflexivity and Ext^i(M, R) = Ext^i(M*, R) = 0 for 1 <= i <= N.

    A semi-decision: passing does not prove G-dimension zero.
    """
    R = M.ring
    Rm = ring_module(R)
    reflexive, _ = bidual_check(M)
    e_M = ext(M, Rm, N)
    Mstar = dual(M)
    e_D = ext(Mstar, Rm, N)
    failures = []
    if not reflexive:
        failures.append("bidual")
    i = e_M.first_nonzero()
    if i is not None:
        failures.append(f"Ext^{i}(M,R)")
    i = e_D.first_nonzero()
    if i is not None:
        failures.append(f"Ext^{i}(M*,R)")
    payload = {
        "N": N,
        "reflexive": reflexive,
        "ext_M": e_M.totals(),
        "ext_dual": e_D.totals(),
        "failures": failures,
        "label": f"semi-decision up to N={N}",
    }
    return GdimCertificate(BOUNDED, M, payload, passed=not failures)


# ---------------------------------------------------------------------------
# Structure theorem verifier
# ---------------------------------------------------------------------------

@dataclass
class Theorem31Report:
    r: int
    b: int
    nonfree: bool
    certified: bool
    hilbert_ok: bool
    socle_ok: bool
    two_pieces_ok: bool
    a_eq_rb: bool
    dual_length_ok: bool
    linear_resolution_ok: bool
    bass_ok: bool
    koszul_ok: bool
    numbers: dict = field(default_factory=dict)

    FLAGS = (
        "nonfree", "certified", "hilbert_ok", "socle_ok", "two_pieces_ok", "a_eq_rb",
        "dual_length_ok", "linear_resolution_ok", "bass_ok", "koszul_ok",
    )

    @property
    def all_ok(self) -> bool:
        return all(getattr(self, f) for f in self.FLAGS)

    def failures(self) -> list[str]:
        return [f for f in self.FLAGS if not getattr(self, f)]

    def as_dict(self) -> dict:
        out = {f: getattr(self, f) for f in self.FLAGS}
        out.update(r=self.r, b=self.b, all_ok=self.all_ok, numbers=self.numbers)
        return out


def module_invariants(M: GradedModule) -> dict:
    """b = dim M/mM, a = dim mM, length and normalised Hilbert function."""
    b, _ = minimal_generators(M)
    return {"b": b, "a": M.length - b, "length": M.length, "hilbert": list(M.normalized().dims)}


def linear_module_checks(M: GradedModule, N: int = 6) -> dict:
    """Shape conclusions for a nonfree module over a ring with R2 of dimension r.

    Two nonzero pieces of dimensions (b, rb), a = rb, l(M*) = l(M) and a
    minimal resolution that is linear with every Betti number equal to b.
    """
    r = M.ring.dim2
    inv = module_invariants(M)
    b = inv["b"]
    Mstar = dual(M)
    res = minimal_resolution(M, N)
    base = M.trimmed().base_degree
    diag = res.betti.diagonal(N, shift=base)
    flags = {
        "nonfree": not is_free(M),
        "two_pieces_ok": inv["hilbert"] == [b, r * b],
        "a_eq_rb": inv["a"] == r * b,
        "dual_length_ok": Mstar.length == M.length,
        "linear_resolution_ok": res.betti.is_linear(shift=base) and diag == [b] * (N + 1),
    }
    numbers = {"module": inv, "dual_length": Mstar.length, "betti_diagonal": diag}
    return {"flags": flags, "numbers": numbers}


def verify_theorem31(
    R: GradedAlgebra, M: GradedModule, cert: GdimCertificate | None, N: int = 6, bass_depth: int | None = None
) -> Theorem31Report:
    """Check every numerical conclusion for a ring with a nonfree G-dimension zero module."""
    r = R.dim2
    lin = linear_module_checks(M, N)
    flags = lin["flags"]
    certified = cert is not None and cert.exact and cert.module.same_as(M)
    hilbert_ok = is_good_shape(R)
    socle_ok = socle(R) == degree_two_part(R)
    depth = N if bass_depth is None else bass_depth
    mu = bass_numbers(R, depth)
    bass_ok = r >= 2 and mu == expected_bass(r, depth)
    kz, kb = koszul_check(R, N)
    koszul_ok = kz and kb.diagonal(N) == expected_koszul_betti(r, N)
    numbers = dict(lin["numbers"], hilbert_R=list(R.dims), bass=mu, koszul_diagonal=kb.diagonal(N))
    return Theorem31Report(
        r, lin["numbers"]["module"]["b"], flags["nonfree"], certified, hilbert_ok, socle_ok,
        flags["two_pieces_ok"], flags["a_eq_rb"], flags["dual_length_ok"], flags["linear_resolution_ok"],
        bass_ok, koszul_ok, numbers,
    )
