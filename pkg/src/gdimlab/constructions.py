"""Explicit G-dimension zero modules: exterior matrix factorizations, the
one-parameter family coker(x I + z J), and the tools that tell them apart
(Fitting degree-one span, endomorphism algebras, sweeps)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactla as la
from .algebra import (
    DegreeTwoRingData,
    Element,
    GradedAlgebra,
    build_circulant_ring,
    find_minimal_reduction,
    is_minimal_reduction,
    quotient_by_quadric,
    random_quadric,
)
from .errors import CertificateRejected, ConstructionError, FieldTooSmall, InputError, SearchExhausted
from .gdim import (
    GdimCertificate,
    filtration_certificate,
    verify_extension,
    verify_periodic_cr,
)
from .gmodule import (
    GradedModule,
    Presentation,
    coker_with_generators,
    map_from_generator_images,
    minimal_generators,
    minimal_resolution,
)
from .homology import hom_space


# ---------------------------------------------------------------------------
# Exterior algebra matrix factorizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MatrixFactorizationData:
    n_terms: int
    pairs: tuple
    f: Element
    phi: tuple
    psi: tuple
    signed: bool = True

    @property
    def size(self) -> int:
        return 1 << self.n_terms


def _popcount_below(mask: int, i: int) -> int:
    return bin(mask & ((1 << i) - 1)).count("1")


def _element_matrix_product(S, A, B) -> np.ndarray:
    """Degree-two coordinates of A @ B for matrices of degree-one elements."""
    n = len(A)
    out = np.zeros((n, n, S.dim2), dtype=np.int64)
    for a in range(n):
        for c in range(n):
            acc = np.zeros(S.dim2, dtype=np.int64)
            for b in range(n):
                if A[a][b].is_zero() or B[b][c].is_zero():
                    continue
                acc += S.mul(A[a][b], B[b][c]).coords
            out[a, c] = acc % S.p
    return out


def exterior_phi_psi(S: DegreeTwoRingData, pairs, signed: bool = True) -> MatrixFactorizationData:
    """phi = contraction by the x's, psi = wedge with sum y_i e_i, on the exterior
    basis ordered by subset bitmask.

    The contraction carries the alternating sign of the removed factor.
    Without it phi^2 is not zero once two or more pairs are present, and the
    identity check below raises ConstructionError.
    """
    pairs = tuple(pairs)
    n = len(pairs)
    if n == 0:
        raise InputError("need at least one pair (x_i, y_i); f = 0 otherwise")
    for x, y in pairs:
        if x.degree != 1 or y.degree != 1:
            raise InputError("pairs must consist of degree-one elements")
    size = 1 << n
    zero = S.zero(1)
    phi = [[zero] * size for _ in range(size)]
    psi = [[zero] * size for _ in range(size)]
    for mask in range(size):
        members = [i for i in range(n) if mask >> i & 1]
        for pos, i in enumerate(members):
            sign = -1 if (signed and pos % 2) else 1
            tgt = mask & ~(1 << i)
            phi[tgt][mask] = S.add(phi[tgt][mask], S.scale(sign, pairs[i][0]))
        for i in range(n):
            if mask >> i & 1:
                continue
            sign = -1 if _popcount_below(mask, i) % 2 else 1
            tgt = mask | (1 << i)
            psi[tgt][mask] = S.add(psi[tgt][mask], S.scale(sign, pairs[i][1]))
    f = S.zero(2)
    for x, y in pairs:
        f = S.add(f, S.mul(x, y))
    pp = _element_matrix_product(S, phi, phi)
    ss = _element_matrix_product(S, psi, psi)
    anti = (_element_matrix_product(S, phi, psi) + _element_matrix_product(S, psi, phi)) % S.p
    target = np.zeros_like(anti)
    for a in range(size):
        target[a, a] = f.coords
    if pp.any():
        raise ConstructionError("phi^2 != 0 for this contraction convention")
    if ss.any():
        raise ConstructionError("psi^2 != 0")
    if not np.array_equal(anti, target):
        raise ConstructionError("phi psi + psi phi != f * 1")
    return MatrixFactorizationData(n, pairs, f, tuple(map(tuple, phi)), tuple(map(tuple, psi)), signed)


def random_pairs(S: DegreeTwoRingData, n: int, seed: int = 0) -> list[tuple[Element, Element]]:
    rng = np.random.default_rng(seed)
    return [
        (S.element(1, rng.integers(0, S.p, S.dim1)), S.element(1, rng.integers(0, S.p, S.dim1)))
        for _ in range(n)
    ]


def matrix_factorization_module(
    S: DegreeTwoRingData, pairs, signed: bool = True
) -> tuple[GradedAlgebra, GradedModule, GdimCertificate]:
    """R = S/fS and M = coker(phi + psi) over R with its periodic certificate."""
    data = exterior_phi_psi(S, pairs, signed)
    if data.f.is_zero():
        raise InputError("f = sum x_i y_i vanishes")
    R = quotient_by_quadric(S, data.f)
    size = data.size
    d = [[R.element(1, S.add(data.phi[a][b], data.psi[a][b]).coords) for b in range(size)] for a in range(size)]
    cert, M = verify_periodic_cr(R, d, note=f"exterior matrix factorization, {data.n_terms} terms")
    expected = [size, size * R.dim2]
    if list(M.normalized().dims) != expected:
        raise ConstructionError(f"Hilbert function {list(M.dims)} differs from {expected}")
    return R, M, cert


def sample_matrix_factorization(S: DegreeTwoRingData, n: int, seed: int = 0, budget: int = 50):
    """Random pairs until f is certified a non-zero-divisor by the resulting certificate."""
    for attempt in range(budget):
        pairs = random_pairs(S, n, seed + attempt)
        try:
            R, M, cert = matrix_factorization_module(S, pairs)
        except (CertificateRejected, InputError):
            continue
        return pairs, R, M, cert
    raise SearchExhausted(f"no certified matrix factorization in {budget} attempts")


# ---------------------------------------------------------------------------
# Cyclic modules R/xR and verified rings
# ---------------------------------------------------------------------------

def annihilator_partner(R: GradedAlgebra, x: Element) -> Element:
    """The degree-one y spanning ker(x . : R1 -> R2); over S/fS one has x y = f."""
    ker, _ = la.nullspace(R.mult_by(x), R.p)
    if ker.shape[0] != 1:
        raise InputError(f"multiplication by x kills a {ker.shape[0]}-dimensional part of R1, expected 1")
    return R.element(1, ker[0])


def cyclic_certificate(R: GradedAlgebra, x: Element) -> tuple[GdimCertificate, GradedModule]:
    """Certificate for R/xR from the complete resolution ... -> R -x-> R -y-> R -> ..."""
    if not is_minimal_reduction(R, x):
        raise InputError("x does not map R1 onto R2")
    y = annihilator_partner(R, x)
    if la.rank(np.vstack([x.coords, y.coords]), R.p) == 1:
        return verify_periodic_cr(R, [[x]], note="R/xR, one-periodic")
    return verify_periodic_cr(R, [[x]], [[y]], note="R/xR, two-periodic")


def certified_quotient(S: DegreeTwoRingData, seed: int = 0, budget: int = 50):
    """R = S/fS for a random quadric f whose R/xR certificate passes.

    The certificate is the evidence that f is a non-zero-divisor: when f kills a
    component of S the complex for R/xR stops being exact.
    """
    x = find_minimal_reduction(S, seed)
    for attempt in range(budget):
        f = random_quadric(S, seed * 7919 + attempt)
        R = quotient_by_quadric(S, f)
        xr = R.element(1, x.coords)
        try:
            cert, _ = cyclic_certificate(R, xr)
        except (CertificateRejected, InputError):
            continue
        return R, f, cert
    raise SearchExhausted(f"no certified quadric within {budget} samples")


def good_ring(r: int, p: int = la.DEFAULT_P, seed: int = 0) -> GradedAlgebra:
    """Circulant ring of type r modulo a verified random quadric."""
    return certified_quotient(build_circulant_ring(r, p), seed)[0]


# ---------------------------------------------------------------------------
# The family M([x], n)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FamilySpec:
    x: Element
    z: Element
    n: int

    def validate(self, R: GradedAlgebra) -> None:
        if self.n < 1:
            raise InputError("n must be positive")
        if not is_minimal_reduction(R, self.x):
            raise InputError("x is not a minimal reduction: x R1 != R2")
        if la.rank(np.vstack([self.x.coords, self.z.coords]), R.p) < 2:
            raise InputError("x and z must be linearly independent")


def default_z(R: GradedAlgebra, x: Element) -> Element:
    """First basis vector of R1 independent from x."""
    for i in range(R.dim1):
        e = R.basis_element(1, i)
        if la.rank(np.vstack([x.coords, e.coords]), R.p) == 2:
            return e
    raise InputError("R1 is one-dimensional")


def family_presentation(R: GradedAlgebra, x: Element, z: Element, n: int) -> Presentation:
    zero = R.zero(1)
    rows = [[x if a == b else (z if b == a + 1 else zero) for b in range(n)] for a in range(n)]
    return Presentation.from_matrix(R, rows)


@dataclass(frozen=True, eq=False)
class FamilyMember:
    spec: FamilySpec
    module: GradedModule
    certificate: GdimCertificate


def family_module(R: GradedAlgebra, spec: FamilySpec) -> tuple[GradedModule, GdimCertificate]:
    """coker of x on the diagonal and z on the superdiagonal, with a filtration certificate.

    For n = 1 the filtration has a single step, the periodic certificate of R/xR.

    Step i of the filtration is 0 -> M(i-1) -> M(i) -> R/xR -> 0 with
    e_j -> e_j on the left and e_i -> 1, e_j -> 0 (j < i) on the right.
    """
    spec.validate(R)
    base_cert, base = cyclic_certificate(R, spec.x)
    steps = [base_cert]
    prev = base
    prev_cert = base_cert
    for i in range(2, spec.n + 1):
        cur = coker_with_generators(family_presentation(R, spec.x, spec.z, i)).module
        _, gens = minimal_generators(cur)
        inc_images = [gens[j][1] for j in range(i - 1)]
        iota = map_from_generator_images(prev, cur, inc_images)
        unit = np.ones(1, dtype=np.int64)
        zero = np.zeros(1, dtype=np.int64)
        pi = map_from_generator_images(cur, base, [zero] * (i - 1) + [unit])
        prev_cert = verify_extension(prev_cert, base_cert, cur, iota, pi)
        steps.append(prev_cert)
        prev = cur
    if spec.n == 1:
        return base, filtration_certificate([base_cert])
    return prev, filtration_certificate(steps[1:])


# ---------------------------------------------------------------------------
# Invariants used to tell modules apart
# ---------------------------------------------------------------------------

def fitting_degree1(M: GradedModule) -> la.Subspace:
    """Span in R1 of the linear entries of a minimal presentation matrix."""
    R = M.ring
    res = minimal_resolution(M, 1)
    rows = []
    if res.length >= 1:
        for (gp, g), coef in res.coefficient_tensors(0).items():
            if gp - g == 1:
                rows.append(coef.reshape(-1, R.dim1))
    if not rows:
        return la.Subspace.zero(R.dim1, R.p)
    return la.Subspace.from_rows(np.vstack(rows), R.dim1, R.p)


@dataclass(frozen=True, eq=False)
class EndoAlgebra:
    dim: int
    degrees: tuple
    basis: tuple
    table: np.ndarray  # table[a, b] = coordinates of basis[a] o basis[b]
    p: int

    def degree_dims(self) -> dict:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def radical(self) -> la.Subspace:
        """Null space of the trace form Tr(L_{ab}); valid when p > dim."""
        if self.p <= self.dim:
            raise FieldTooSmall(f"trace-form radical needs p > dim = {self.dim}, got p = {self.p}")
        tr = np.einsum("ckk->c", self.table) % self.p
        gram = np.einsum("abc,c->ab", self.table, tr) % self.p
        ker, _ = la.nullspace(gram, self.p)
        return la.Subspace.from_rows(ker, self.dim, self.p)


def endomorphism_algebra(M: GradedModule) -> EndoAlgebra:
    H = hom_space(M, M)
    p = M.ring.p
    basis, degrees = [], []
    for j in sorted(H.pieces):
        for f in H.maps(j):
            basis.append(f)
            degrees.append(j)
    n = len(basis)
    offsets, k = {}, 0
    for j in sorted(H.pieces):
        offsets[j] = k
        k += H.pieces[j].dim
    table = np.zeros((n, n, n), dtype=np.int64)
    for a, fa in enumerate(basis):
        for b, fb in enumerate(basis):
            j = fa.degree + fb.degree
            pc = H.pieces.get(j)
            if pc is None or pc.dim == 0:
                continue
            comp = fa.compose(fb)
            table[a, b, offsets[j]:offsets[j] + pc.dim] = pc.coords(pc.flatten(comp.blocks) % p)
    return EndoAlgebra(n, tuple(degrees), tuple(basis), table, p)


def is_local(L: EndoAlgebra) -> bool:
    return L.dim - L.radical().dim == 1


# ---------------------------------------------------------------------------
# Sampling and sweeps
# ---------------------------------------------------------------------------

def projectively_equal(a: Element, b: Element, p: int) -> bool:
    return la.rank(np.vstack([a.coords, b.coords]), p) < 2


def sample_family_points(R: GradedAlgebra, z: Element, count: int, seed: int = 0, budget: int = 2000):
    """Distinct [x] with x R1 = R2 and certified R/xR, whose planes span{x, z} are pairwise distinct."""
    rng = np.random.default_rng(seed)
    xs: list[Element] = []
    planes: list[la.Subspace] = []
    for _ in range(budget):
        if len(xs) == count:
            break
        x = R.element(1, rng.integers(0, R.p, R.dim1))
        if x.is_zero() or projectively_equal(x, z, R.p) or not is_minimal_reduction(R, x):
            continue
        plane = la.Subspace.from_rows(np.vstack([x.coords, z.coords]), R.dim1, R.p)
        if any(plane == q for q in planes):
            continue
        try:
            cyclic_certificate(R, x)
        except (CertificateRejected, InputError):
            continue
        xs.append(x)
        planes.append(plane)
    if len(xs) < count:
        raise SearchExhausted(f"found only {len(xs)} of {count} family points")
    return xs


@dataclass
class SweepRow:
    i: int
    j: int
    n_i: int
    n_j: int
    witness: str
    distinguished: bool


@dataclass
class SweepReport:
    members: list
    rows: list = field(default_factory=list)
    duplicates: list = field(default_factory=list)

    @property
    def all_distinguished(self) -> bool:
        return all(r.distinguished for r in self.rows)


def pairwise_noniso_sweep(R: GradedAlgebra, xs, ns, z: Element | None = None) -> SweepReport:
    """Build M([x], n) for every x and n and separate every pair by
    generator count, then by the Fitting degree-one span."""
    if not xs:
        raise InputError("need at least one x")
    z = default_z(R, xs[0]) if z is None else z
    duplicates = [
        (a, b) for a in range(len(xs)) for b in range(a + 1, len(xs)) if projectively_equal(xs[a], xs[b], R.p)
    ]
    members = []
    for a, x in enumerate(xs):
        for n in ns:
            M, cert = family_module(R, FamilySpec(x, z, n))
            members.append({"x_index": a, "n": n, "module": M, "certificate": cert,
                            "generators": minimal_generators(M)[0], "fitting": fitting_degree1(M)})
    rep = SweepReport(members, duplicates=duplicates)
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            A, B = members[i], members[j]
            if A["generators"] != B["generators"]:
                witness, ok = "generators", True
            elif A["fitting"] != B["fitting"]:
                witness, ok = "fitting", True
            elif (A["x_index"], A["n"]) == (B["x_index"], B["n"]) or (A["x_index"], B["x_index"]) in duplicates:
                witness, ok = "same-construction", False
            else:
                witness, ok = "none", False
            rep.rows.append(SweepRow(i, j, A["n"], B["n"], witness, ok))
    return rep
