"""Graded modules over m^3 = 0 algebras, free modules and minimal resolutions.

Conventions
-----------
A :class:`GradedModule` stores one vector space per degree starting at
``base_degree``.  ``act1[t]`` has shape ``(dim1, dim M_{d+1}, dim M_d)`` for
``d = base_degree + t``: slice ``i`` is the matrix of multiplication by the
i-th basis vector of R1, acting on column vectors.  ``act2`` is the same for
R2, raising degree by two.

Free modules used inside resolutions are never densified.  A
:class:`FreeModule` only keeps its sorted generator degrees; its degree-d
piece is laid out as ``[R2 (x) gens of degree d-2 | R1 (x) gens of degree d-1 |
gens of degree d]``, generator-major inside each block.  Elements of free
modules are handled as row vectors.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import exactla as la
from .algebra import Element, GradedAlgebra
from .errors import DimensionError, InputError, SchemaError


def _zeros(*shape) -> np.ndarray:
    return np.zeros(shape, dtype=np.int64)


def _flat(t: np.ndarray) -> np.ndarray:
    return t.reshape(t.shape[0] * t.shape[1], t.shape[2])


@dataclass(frozen=True, eq=False)
class GradedModule:
    ring: GradedAlgebra
    dims: tuple[int, ...]
    base_degree: int
    act1: tuple[np.ndarray, ...]
    act2: tuple[np.ndarray, ...]

    def __post_init__(self):
        R = self.ring
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        n = len(dims)
        a1 = list(self.act1) + [None] * max(0, n - len(self.act1))
        a2 = list(self.act2) + [None] * max(0, n - len(self.act2))
        norm1, norm2 = [], []
        for t in range(n):
            nxt = dims[t + 1] if t + 1 < n else 0
            nxt2 = dims[t + 2] if t + 2 < n else 0
            m1 = _zeros(R.dim1, nxt, dims[t]) if a1[t] is None else np.asarray(a1[t], dtype=np.int64) % R.p
            m2 = _zeros(R.dim2, nxt2, dims[t]) if a2[t] is None else np.asarray(a2[t], dtype=np.int64) % R.p
            if m1.shape != (R.dim1, nxt, dims[t]) or m2.shape != (R.dim2, nxt2, dims[t]):
                raise DimensionError(f"action tensor shapes do not match dims {dims} at offset {t}")
            norm1.append(m1)
            norm2.append(m2)
        object.__setattr__(self, "act1", tuple(norm1))
        object.__setattr__(self, "act2", tuple(norm2))

    # -- shape helpers -----------------------------------------------------
    @property
    def top_degree(self) -> int:
        return self.base_degree + len(self.dims) - 1

    def degrees(self) -> range:
        return range(self.base_degree, self.base_degree + len(self.dims))

    def piece(self, d: int) -> int:
        t = d - self.base_degree
        return self.dims[t] if 0 <= t < len(self.dims) else 0

    def a1(self, d: int) -> np.ndarray:
        t = d - self.base_degree
        if 0 <= t < len(self.dims):
            return self.act1[t]
        return _zeros(self.ring.dim1, self.piece(d + 1), self.piece(d))

    def a2(self, d: int) -> np.ndarray:
        t = d - self.base_degree
        if 0 <= t < len(self.dims):
            return self.act2[t]
        return _zeros(self.ring.dim2, self.piece(d + 2), self.piece(d))

    def act(self, x: Element, d: int) -> np.ndarray:
        """Matrix of multiplication by a homogeneous ring element on M_d."""
        p = self.ring.p
        if x.degree == 0:
            return (int(x.coords[0]) * np.eye(self.piece(d), dtype=np.int64)) % p
        tensor = self.a1(d) if x.degree == 1 else self.a2(d)
        return np.einsum("i,ijk->jk", x.coords, tensor) % p

    @property
    def length(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.length == 0

    def hilbert(self) -> dict[int, int]:
        return {d: self.piece(d) for d in self.degrees() if self.piece(d)}

    def shifted(self, k: int) -> "GradedModule":
        """M(-k): the same module with every degree raised by ``k``."""
        return GradedModule(self.ring, self.dims, self.base_degree + k, self.act1, self.act2)

    def trimmed(self) -> "GradedModule":
        nz = [t for t, d in enumerate(self.dims) if d]
        if not nz:
            return zero_module(self.ring)
        lo, hi = nz[0], nz[-1] + 1
        return GradedModule(self.ring, self.dims[lo:hi], self.base_degree + lo, self.act1[lo:hi], self.act2[lo:hi])

    def normalized(self) -> "GradedModule":
        """Trim zero pieces and move the lowest nonzero piece to degree 0."""
        t = self.trimmed()
        return t.shifted(-t.base_degree)

    def with_range(self, lo: int, hi: int) -> "GradedModule":
        """Pad with zero pieces so that the module spans degrees lo..hi."""
        lo = min(lo, self.base_degree)
        hi = max(hi, self.top_degree)
        dims = [self.piece(d) for d in range(lo, hi + 1)]
        return GradedModule(
            self.ring, tuple(dims), lo,
            tuple(self.a1(d) for d in range(lo, hi + 1)),
            tuple(self.a2(d) for d in range(lo, hi + 1)),
        )

    # -- invariants --------------------------------------------------------
    def check(self) -> None:
        """Assert commutativity of the action and compatibility with R2."""
        R, p = self.ring, self.ring.p
        for d in self.degrees():
            A, B = self.a1(d), self.a1(d + 1)
            via2 = np.einsum("ijk,kab->ijab", R.mult11, self.a2(d)) % p
            for i in range(R.dim1):
                for j in range(R.dim1):
                    if not np.array_equal(la.matmul(B[j], A[i], p), via2[i, j]):
                        raise SchemaError(f"action is not compatible with the ring at degree {d}")
            if self.piece(d + 3) and self.piece(d):
                raise SchemaError("module has pieces three degrees apart but m^3 = 0 forces no action there")

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": "module",
            "ring": self.ring.content_hash(),
            "base_degree": self.base_degree,
            "dims": list(self.dims),
            "act1": [a.tolist() for a in self.act1],
            "act2": [a.tolist() for a in self.act2],
        }

    def content_hash(self) -> str:
        import hashlib
        import json

        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]

    def same_as(self, other: "GradedModule") -> bool:
        if self.dims != other.dims or self.base_degree != other.base_degree:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.act1, other.act1)) and all(
            np.array_equal(a, b) for a, b in zip(self.act2, other.act2)
        )

    def __repr__(self):
        return f"GradedModule(base={self.base_degree}, dims={self.dims})"


def module_from_json(data: dict, ring: GradedAlgebra) -> GradedModule:
    try:
        if data.get("schema") != 1 or data.get("kind") != "module":
            raise SchemaError("not a schema-1 module document")
        if data.get("ring") not in (None, ring.content_hash()):
            raise SchemaError("module refers to a different ring")
        dims = [int(d) for d in data["dims"]]
        M = GradedModule(
            ring, tuple(dims), int(data["base_degree"]),
            tuple(np.asarray(a, dtype=np.int64).reshape(ring.dim1, dims[t + 1] if t + 1 < len(dims) else 0, dims[t])
                  for t, a in enumerate(data["act1"])),
            tuple(np.asarray(a, dtype=np.int64).reshape(ring.dim2, dims[t + 2] if t + 2 < len(dims) else 0, dims[t])
                  for t, a in enumerate(data["act2"])),
        )
    except SchemaError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"invalid module JSON: {exc}") from exc
    M.check()
    return M


def zero_module(R: GradedAlgebra) -> GradedModule:
    return GradedModule(R, (), 0, (), ())


def residue_field(R: GradedAlgebra, degree: int = 0) -> GradedModule:
    return GradedModule(R, (1,), degree, (), ())


def ring_module(R: GradedAlgebra) -> GradedModule:
    return free_module(R, [0])


def free_module(R: GradedAlgebra, shifts) -> GradedModule:
    """Dense form of the free module with generators in the given degrees."""
    return FreeModule(R, tuple(shifts)).dense()


def matlis_dual_ring(R: GradedAlgebra) -> GradedModule:
    """Hom_k(R, k) with (a.phi)(s) = phi(a s); pieces in degrees -2, -1, 0."""
    # (x_i phi)(e_j) = phi(x_i e_j): the transpose of multiplication by x_i
    act1_m2 = R.mult11.transpose(0, 1, 2).copy()
    act1_m1 = np.eye(R.dim1, dtype=np.int64).reshape(R.dim1, 1, R.dim1)
    act2_m2 = np.eye(R.dim2, dtype=np.int64).reshape(R.dim2, 1, R.dim2)
    return GradedModule(R, (R.dim2, R.dim1, 1), -2, (act1_m2, act1_m1, None), (act2_m2, None, None)).trimmed()


def direct_sum(*mods: GradedModule) -> GradedModule:
    if not mods:
        raise InputError("direct_sum needs at least one module")
    R = mods[0].ring
    nonzero = [M for M in mods if not M.is_zero()]
    if not nonzero:
        return zero_module(R)
    lo = min(M.base_degree for M in nonzero)
    hi = max(M.top_degree for M in nonzero)
    dims, a1, a2 = [], [], []
    for d in range(lo, hi + 1):
        dims.append(sum(M.piece(d) for M in mods))
    for d in range(lo, hi + 1):
        blocks1 = [M.a1(d) for M in mods]
        blocks2 = [M.a2(d) for M in mods]
        a1.append(np.stack([_block_diag([b[i] for b in blocks1]) for i in range(R.dim1)]) if R.dim1 else None)
        a2.append(np.stack([_block_diag([b[k] for b in blocks2]) for k in range(R.dim2)]) if R.dim2 else None)
    return GradedModule(R, tuple(dims), lo, tuple(a1), tuple(a2))


def _block_diag(blocks) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = _zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


# ---------------------------------------------------------------------------
# Free modules
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FreeModule:
    ring: GradedAlgebra
    gens: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "gens", tuple(sorted(int(g) for g in self.gens)))
        counts = Counter(self.gens)
        object.__setattr__(self, "_counts", counts)

    @property
    def rank(self) -> int:
        return len(self.gens)

    def count(self, degree: int) -> int:
        return self._counts.get(degree, 0)

    def gen_offset(self, degree: int) -> int:
        """Index of the first generator of the given degree in ``gens``."""
        return sum(c for g, c in self._counts.items() if g < degree)

    def degree_range(self) -> range:
        if not self.gens:
            return range(0)
        return range(self.gens[0], self.gens[-1] + 3)

    def blocks(self, d: int) -> tuple[int, int, int]:
        """Sizes of the (R2, R1, R0) blocks in degree d."""
        R = self.ring
        return (self.count(d - 2) * R.dim2, self.count(d - 1) * R.dim1, self.count(d))

    def piece(self, d: int) -> int:
        return sum(self.blocks(d))

    def unit(self, gen_index: int) -> np.ndarray:
        """Row vector of the generator itself in its own degree."""
        g = self.gens[gen_index]
        v = _zeros(self.piece(g))
        b2, b1, _ = self.blocks(g)
        v[b2 + b1 + gen_index - self.gen_offset(g)] = 1
        return v

    def mul1(self, rows: np.ndarray, d: int) -> np.ndarray:
        """Products x_i * w for rows w of F_d: shape (n, dim1, dim F_{d+1})."""
        R, p = self.ring, self.ring.p
        rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
        n = rows.shape[0]
        b2, b1, b0 = self.blocks(d)
        n1 = self.count(d - 1)
        out = _zeros(n, R.dim1, self.piece(d + 1))
        # target layout: [R2 x gens(d-1) | R1 x gens(d) | gens(d+1)]
        if n1 and R.dim2:
            c = rows[:, b2:b2 + b1].reshape(n, n1, R.dim1)
            prod = np.einsum("ngj,jik->nigk", c, R.mult11) % p
            out[:, :, : n1 * R.dim2] = prod.reshape(n, R.dim1, n1 * R.dim2)
        if b0:
            c0 = rows[:, b2 + b1:]
            start = self.count(d - 1) * R.dim2
            blk = np.einsum("ng,ij->nigj", c0, np.eye(R.dim1, dtype=np.int64))
            out[:, :, start:start + b0 * R.dim1] = blk.reshape(n, R.dim1, b0 * R.dim1)
        return out

    def mul2(self, rows: np.ndarray, d: int) -> np.ndarray:
        """Products w_k * w for rows of F_d: shape (n, dim2, dim F_{d+2})."""
        R = self.ring
        rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
        n = rows.shape[0]
        b2, b1, b0 = self.blocks(d)
        out = _zeros(n, R.dim2, self.piece(d + 2))
        if b0 and R.dim2:
            c0 = rows[:, b2 + b1:]
            blk = np.einsum("ng,kl->nkgl", c0, np.eye(R.dim2, dtype=np.int64))
            out[:, :, : b0 * R.dim2] = blk.reshape(n, R.dim2, b0 * R.dim2)
        return out

    def coefficients(self, v: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Split an element of F_d into coefficients on generators of degrees d-2, d-1, d."""
        R = self.ring
        b2, b1, _ = self.blocks(d)
        v = np.asarray(v, dtype=np.int64)
        c2 = v[:b2].reshape(self.count(d - 2), R.dim2)
        c1 = v[b2:b2 + b1].reshape(self.count(d - 1), R.dim1)
        c0 = v[b2 + b1:]
        return c2, c1, c0

    def dense(self) -> GradedModule:
        R = self.ring
        if not self.gens:
            return zero_module(R)
        degs = list(self.degree_range())
        a1, a2 = [], []
        for d in degs:
            eye = np.eye(self.piece(d), dtype=np.int64)
            a1.append(self.mul1(eye, d).transpose(1, 2, 0))
            a2.append(self.mul2(eye, d).transpose(1, 2, 0))
        return GradedModule(R, tuple(self.piece(d) for d in degs), degs[0], tuple(a1), tuple(a2))


# ---------------------------------------------------------------------------
# Maps and presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModuleMap:
    """Homogeneous R-linear map; ``blocks[d]`` sends M_d to N_{d+degree} (column convention)."""

    source: GradedModule
    target: GradedModule
    blocks: dict
    degree: int = 0

    def block(self, d: int) -> np.ndarray:
        b = self.blocks.get(d)
        if b is None:
            return _zeros(self.target.piece(d + self.degree), self.source.piece(d))
        return b

    def is_homomorphism(self) -> bool:
        p = self.source.ring.p
        M, N, j = self.source, self.target, self.degree
        for d in M.degrees():
            if self.block(d).shape != (N.piece(d + j), M.piece(d)):
                return False
            f0, f1, f2 = self.block(d), self.block(d + 1), self.block(d + 2)
            for A_M, A_N, f_up in ((M.a1(d), N.a1(d + j), f1), (M.a2(d), N.a2(d + j), f2)):
                for i in range(A_M.shape[0]):
                    if not np.array_equal(la.matmul(f_up, A_M[i], p), la.matmul(A_N[i], f0, p)):
                        return False
        return True

    def kernel_dims(self) -> dict[int, int]:
        p = self.source.ring.p
        return {d: self.source.piece(d) - la.rank(self.block(d), p) for d in self.source.degrees()}

    def image_dims(self) -> dict[int, int]:
        p = self.source.ring.p
        return {d: la.rank(self.block(d), p) for d in self.source.degrees()}

    def is_injective(self) -> bool:
        return all(v == 0 for v in self.kernel_dims().values())

    def is_surjective(self) -> bool:
        p = self.source.ring.p
        N = self.target
        return all(la.rank(self.block(d - self.degree), p) == N.piece(d) for d in N.degrees())

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def compose(self, first: "ModuleMap") -> "ModuleMap":
        """self o first."""
        p = self.source.ring.p
        blocks = {d: la.matmul(self.block(d + first.degree), first.block(d), p) for d in first.source.degrees()}
        return ModuleMap(first.source, self.target, blocks, first.degree + self.degree)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": "map",
            "degree": self.degree,
            "blocks": {str(d): b.tolist() for d, b in sorted(self.blocks.items())},
        }


def identity_map(M: GradedModule) -> ModuleMap:
    return ModuleMap(M, M, {d: np.eye(M.piece(d), dtype=np.int64) for d in M.degrees()})


@dataclass(frozen=True, eq=False)
class Presentation:
    """Generators in degrees ``gens``; column j of ``rels`` is a relation of degree ``rel_degrees[j]``.

    ``rels[i][j]`` is an :class:`Element` of degree ``rel_degrees[j] - gens[i]``
    or ``None`` for zero.
    """

    ring: GradedAlgebra
    gens: tuple[int, ...]
    rel_degrees: tuple[int, ...]
    rels: tuple[tuple, ...]

    def __post_init__(self):
        R = self.ring
        if len(self.rels) != len(self.gens):
            raise InputError("relation matrix needs one row per generator")
        for i, row in enumerate(self.rels):
            if len(row) != len(self.rel_degrees):
                raise InputError("relation matrix rows have inconsistent length")
            for j, e in enumerate(row):
                if e is None or e.is_zero():
                    continue
                if e.degree != self.rel_degrees[j] - self.gens[i]:
                    raise InputError(
                        f"entry ({i},{j}) has degree {e.degree}, expected {self.rel_degrees[j] - self.gens[i]}"
                    )
                if e.coords.shape[0] != R.piece(e.degree):
                    raise InputError(f"entry ({i},{j}) has the wrong number of coordinates")

    @classmethod
    def from_matrix(cls, R: GradedAlgebra, matrix, gen_degree: int = 0) -> "Presentation":
        """Square or rectangular matrix of homogeneous elements of one common degree."""
        rows = [list(r) for r in matrix]
        if not rows:
            return cls(R, (), (), ())
        deg = next((e.degree for r in rows for e in r if e is not None and not e.is_zero()), 1)
        ncols = len(rows[0])
        return cls(R, (gen_degree,) * len(rows), (gen_degree + deg,) * ncols, tuple(tuple(r) for r in rows))

    def free(self) -> FreeModule:
        return FreeModule(self.ring, self.gens)

    def relation_vectors(self) -> list[tuple[int, np.ndarray]]:
        """Each relation as (degree, row vector in the free module on ``gens``)."""
        F = self.free()
        order = sorted(range(len(self.gens)), key=lambda i: (self.gens[i], i))
        position = {i: k for k, i in enumerate(order)}
        out = []
        for j, d in enumerate(self.rel_degrees):
            v = _zeros(F.piece(d))
            b2, b1, _ = F.blocks(d)
            for i, g in enumerate(self.gens):
                e = self.rels[i][j]
                if e is None or e.is_zero():
                    continue
                k = position[i] - F.gen_offset(g)
                if e.degree == 2:
                    v[k * self.ring.dim2:(k + 1) * self.ring.dim2] += e.coords
                elif e.degree == 1:
                    v[b2 + k * self.ring.dim1:b2 + (k + 1) * self.ring.dim1] += e.coords
                elif e.degree == 0:
                    v[b2 + b1 + k] += e.coords[0]
            out.append((d, v % self.ring.p))
        return out

    def generator_order(self) -> list[int]:
        """Position of each input generator in the sorted free-module basis."""
        order = sorted(range(len(self.gens)), key=lambda i: (self.gens[i], i))
        return [order.index(i) for i in range(len(self.gens))]


@dataclass(frozen=True, eq=False)
class Quotient:
    """A cokernel together with the images of the free generators."""

    module: GradedModule
    free: FreeModule
    projections: dict
    generator_images: tuple


def submodule_span(F: FreeModule, vectors: list[tuple[int, np.ndarray]]) -> dict[int, np.ndarray]:
    """Degreewise spanning rows of the submodule of F generated by homogeneous vectors."""
    R = F.ring
    out: dict[int, list[np.ndarray]] = {d: [] for d in F.degree_range()}
    for d, v in vectors:
        if d not in out:
            continue
        v = v.reshape(1, -1)
        out[d].append(v)
        if d + 1 in out:
            out[d + 1].append(F.mul1(v, d).reshape(R.dim1, -1))
        if d + 2 in out:
            out[d + 2].append(F.mul2(v, d).reshape(R.dim2, -1))
    return {d: (np.vstack(rows) if rows else _zeros(0, F.piece(d))) for d, rows in out.items()}


def coker_with_generators(pres: Presentation) -> Quotient:
    R, p = pres.ring, pres.ring.p
    F = pres.free()
    if not F.gens:
        return Quotient(zero_module(R), F, {}, ())
    for d, _ in pres.relation_vectors():
        if d < F.gens[0]:
            raise InputError("relation degree below every generator degree")
    span = submodule_span(F, pres.relation_vectors())
    degs = list(F.degree_range())
    proj, keeps = {}, {}
    for d in degs:
        proj[d], keeps[d] = la.quotient_projection(span[d], F.piece(d), p)
    a1, a2 = [], []
    for d in degs:
        nq = proj[d].shape[0]
        # the section of the projection is the inclusion of the kept unit vectors
        keep = keeps[d]
        lift = _zeros(F.piece(d), nq)
        lift[keep, np.arange(nq)] = 1
        up1 = F.mul1(lift.T, d)
        up2 = F.mul2(lift.T, d)
        P1 = proj.get(d + 1, _zeros(0, F.piece(d + 1)))
        P2 = proj.get(d + 2, _zeros(0, F.piece(d + 2)))
        a1.append(np.stack([la.matmul(P1, up1[:, i, :].T, p) for i in range(R.dim1)]) if R.dim1 else None)
        a2.append(np.stack([la.matmul(P2, up2[:, k, :].T, p) for k in range(R.dim2)]) if R.dim2 else None)
    M = GradedModule(R, tuple(proj[d].shape[0] for d in degs), degs[0], tuple(a1), tuple(a2))
    order = pres.generator_order()
    images = tuple((pres.gens[i], la.matmul(proj[pres.gens[i]], F.unit(order[i]).reshape(-1, 1), p).reshape(-1))
                   for i in range(len(pres.gens)))
    return Quotient(M, F, proj, images)


def coker(pres: Presentation) -> GradedModule:
    return coker_with_generators(pres).module


# ---------------------------------------------------------------------------
# Generators, covers, syzygies
# ---------------------------------------------------------------------------

def decomposable_part(M: GradedModule, d: int) -> np.ndarray:
    """Rows spanning (m M)_d = R1 M_{d-1} + R2 M_{d-2} inside M_d."""
    parts = []
    a1, a2 = M.a1(d - 1), M.a2(d - 2)
    if a1.size:
        parts.append(np.concatenate(list(a1), axis=1).T)
    if a2.size:
        parts.append(np.concatenate(list(a2), axis=1).T)
    if not parts:
        return _zeros(0, M.piece(d))
    return np.vstack(parts)


def minimal_generators(M: GradedModule) -> tuple[int, list[tuple[int, np.ndarray]]]:
    """Number of minimal generators and a lift of a basis of M / mM.

    Lifts are unit vectors at the non-pivot positions of the echelon form of
    (mM)_d, so they are deterministic.
    """
    gens = []
    for d in M.degrees():
        n = M.piece(d)
        if n == 0:
            continue
        for j in la.complement_columns(decomposable_part(M, d), n, M.ring.p):
            v = _zeros(n)
            v[j] = 1
            gens.append((d, v))
    return len(gens), gens


def cover_matrix(F: FreeModule, M: GradedModule, images: list[tuple[int, np.ndarray]], d: int) -> np.ndarray:
    """Rows: basis of F_d; columns: coordinates in M_d of their images."""
    p = M.ring.p
    b2, b1, b0 = F.blocks(d)
    out = _zeros(b2 + b1 + b0, M.piece(d))
    row = 0
    for a, block in ((2, b2), (1, b1), (0, b0)):
        for g, v in images:
            if g != d - a:
                continue
            if a == 0:
                out[row] = v
                row += 1
            else:
                acts = M.a1(g) if a == 1 else M.a2(g)
                for i in range(acts.shape[0]):
                    out[row] = la.matmul(acts[i], v.reshape(-1, 1), p).reshape(-1)
                    row += 1
    return out


@dataclass(frozen=True, eq=False)
class _Kernel:
    """Degreewise kernel K_d of a map out of a free module, in free-column form."""

    basis: dict
    free: dict

    def dim(self, d: int) -> int:
        b = self.basis.get(d)
        return 0 if b is None else b.shape[0]


def _kernel_of(images_by_degree: dict, F: FreeModule, p: int) -> _Kernel:
    basis, free = {}, {}
    for d in F.degree_range():
        img = images_by_degree[d]
        if F.piece(d) == 0:
            basis[d], free[d] = _zeros(0, 0), []
        elif img.shape[1] == 0:
            n = F.piece(d)
            basis[d], free[d] = np.eye(n, dtype=np.int64), list(range(n))
        else:
            basis[d], free[d] = la.nullspace(img.T, p)
    return _Kernel(basis, free)


def _kernel_generators(F: FreeModule, K: _Kernel, p: int) -> list[tuple[int, np.ndarray]]:
    R = F.ring
    gens = []
    for d in F.degree_range():
        kd = K.dim(d)
        if kd == 0:
            continue
        parts = []
        if K.dim(d - 1):
            parts.append(_flat(F.mul1(K.basis[d - 1], d - 1)))
        if K.dim(d - 2) and R.dim2:
            parts.append(_flat(F.mul2(K.basis[d - 2], d - 2)))
        dec = np.vstack(parts)[:, K.free[d]] if parts else _zeros(0, kd)
        for j in la.complement_columns(dec, kd, p):
            gens.append((d, K.basis[d][j]))
    return gens


def _images_in(F: FreeModule, Fnew: FreeModule, images: list[tuple[int, np.ndarray]]) -> dict:
    """Matrices of Fnew_d -> F_d (rows = basis of Fnew_d) for every degree of Fnew."""
    R = F.ring
    by_deg: dict[int, np.ndarray] = {}
    for g in sorted(set(Fnew.gens)):
        by_deg[g] = np.vstack([v for gg, v in images if gg == g])
    out = {}
    for d in Fnew.degree_range():
        parts = []
        if d - 2 in by_deg and R.dim2:
            parts.append(_flat(F.mul2(by_deg[d - 2], d - 2)))
        if d - 1 in by_deg:
            parts.append(_flat(F.mul1(by_deg[d - 1], d - 1)))
        if d in by_deg:
            parts.append(by_deg[d])
        out[d] = np.vstack(parts) if parts else _zeros(0, F.piece(d))
    return out


@dataclass(frozen=True, eq=False)
class BettiTable:
    beta: dict

    def get(self, i: int, j: int) -> int:
        return self.beta.get((i, j), 0)

    def total(self, i: int) -> int:
        return sum(v for (a, _), v in self.beta.items() if a == i)

    def totals(self, upto: int) -> list[int]:
        return [self.total(i) for i in range(upto + 1)]

    def diagonal(self, upto: int, shift: int = 0) -> list[int]:
        return [self.get(i, i + shift) for i in range(upto + 1)]

    def off_diagonal(self, shift: int = 0) -> dict:
        return {k: v for k, v in self.beta.items() if v and k[1] - k[0] != shift}

    def is_linear(self, shift: int = 0) -> bool:
        return not self.off_diagonal(shift)

    def rows(self) -> list[tuple[int, int, int]]:
        return sorted((i, j, v) for (i, j), v in self.beta.items() if v)


@dataclass(frozen=True, eq=False)
class Resolution:
    """Minimal graded free resolution prefix F_N -> ... -> F_0 -> M.

    ``images[i]`` lists, for each generator of F_{i+1} in sorted order, its
    image in F_i as ``(degree, row vector)``.  ``cover`` holds the images of
    the generators of F_0 in M.
    """

    module: GradedModule
    frees: tuple
    cover: tuple
    images: tuple
    betti: BettiTable

    @property
    def length(self) -> int:
        return len(self.frees) - 1

    def coefficient_tensors(self, i: int) -> dict:
        """For the map F_{i+1} -> F_i: {(g', g): array (n', n, piece)} keyed by generator degrees."""
        src, tgt = self.frees[i + 1], self.frees[i]
        out = {}
        for gp in sorted(set(src.gens)):
            vecs = np.vstack([v for g, v in self.images[i] if g == gp])
            b2, b1, _ = tgt.blocks(gp)
            R = tgt.ring
            n = vecs.shape[0]
            if b2:
                out[(gp, gp - 2)] = vecs[:, :b2].reshape(n, tgt.count(gp - 2), R.dim2)
            if b1:
                out[(gp, gp - 1)] = vecs[:, b2:b2 + b1].reshape(n, tgt.count(gp - 1), R.dim1)
            if tgt.count(gp):
                out[(gp, gp)] = vecs[:, b2 + b1:].reshape(n, tgt.count(gp), 1)
        return out

    def is_minimal(self) -> bool:
        return all(not np.any(t) for i in range(self.length) for (a, b), t in self.coefficient_tensors(i).items() if a == b)

    def check_exact(self) -> bool:
        """F_0 covers M, composites vanish and every middle spot is exact (kernel = image)."""
        p = self.module.ring.p
        M, F0 = self.module, self.frees[0]
        for d in M.degrees():
            if M.piece(d) and la.rank(cover_matrix(F0, M, list(self.cover), d), p) != M.piece(d):
                return False
        for i in range(self.length):
            F, Fn = self.frees[i], self.frees[i + 1]
            img = _images_in(F, Fn, list(self.images[i]))
            if i == 0:
                down = {d: cover_matrix(F, self.module, list(self.cover), d) for d in F.degree_range()}
            else:
                down = _images_in(self.frees[i - 1], F, list(self.images[i - 1]))
            for d in Fn.degree_range():
                nxt = down.get(d)
                if nxt is None or nxt.size == 0 or img[d].size == 0:
                    continue
                if np.any(la.matmul(img[d], nxt, p)):
                    return False
            for d in F.degree_range():
                nxt = down[d]
                ker = F.piece(d) - (la.rank(nxt, p) if nxt.size else 0)
                im = la.rank(img[d], p) if d in img and img[d].size else 0
                if ker != im:
                    return False
        return True


def minimal_resolution(M: GradedModule, N: int = 8) -> Resolution:
    """First N+1 free modules of the minimal graded free resolution of M."""
    if N < 0:
        raise InputError("resolution length must be nonnegative")
    R, p = M.ring, M.ring.p
    _, gens = minimal_generators(M)
    F = FreeModule(R, tuple(g for g, _ in gens))
    frees, images = [F], []
    betti = Counter((0, g) for g in F.gens)
    if not F.gens:
        return Resolution(M, tuple(frees), tuple(gens), (), BettiTable(dict(betti)))
    K = _kernel_of({d: cover_matrix(F, M, gens, d) for d in F.degree_range()}, F, p)
    for i in range(1, N + 1):
        kgens = _kernel_generators(F, K, p)
        Fn = FreeModule(R, tuple(g for g, _ in kgens))
        frees.append(Fn)
        images.append(tuple(kgens))
        betti.update((i, g) for g in Fn.gens)
        if not Fn.gens:
            break
        if i < N:
            K = _kernel_of(_images_in(F, Fn, kgens), Fn, p)
        F = Fn
    return Resolution(M, tuple(frees), tuple(gens), tuple(images), BettiTable(dict(betti)))


def syzygy(M: GradedModule) -> tuple[GradedModule, ModuleMap]:
    """First syzygy of M as a dense module, with its inclusion into the free cover."""
    R, p = M.ring, M.ring.p
    _, gens = minimal_generators(M)
    F = FreeModule(R, tuple(g for g, _ in gens))
    if not F.gens:
        Z = zero_module(R)
        return Z, ModuleMap(Z, Z, {})
    K = _kernel_of({d: cover_matrix(F, M, gens, d) for d in F.degree_range()}, F, p)
    degs = list(F.degree_range())
    a1, a2 = [], []
    for d in degs:
        kb = K.basis[d]
        up1 = F.mul1(kb, d) if kb.shape[0] else _zeros(0, R.dim1, F.piece(d + 1))
        up2 = F.mul2(kb, d) if kb.shape[0] else _zeros(0, R.dim2, F.piece(d + 2))
        f1 = K.free.get(d + 1, [])
        f2 = K.free.get(d + 2, [])
        a1.append(up1[:, :, f1].transpose(1, 2, 0) if f1 else _zeros(R.dim1, 0, kb.shape[0]))
        a2.append(up2[:, :, f2].transpose(1, 2, 0) if f2 else _zeros(R.dim2, 0, kb.shape[0]))
    Z = GradedModule(R, tuple(K.dim(d) for d in degs), degs[0], tuple(a1), tuple(a2))
    Fd = F.dense()
    inc = ModuleMap(Z, Fd, {d: K.basis[d].T.copy() for d in degs})
    return Z, inc


def is_free(M: GradedModule) -> bool:
    Z, _ = syzygy(M)
    return Z.is_zero()


def hilbert(M: GradedModule) -> list[int]:
    return list(M.dims)


def length(M: GradedModule) -> int:
    return M.length


def map_from_generator_images(
    M: GradedModule, N: GradedModule, images: list[np.ndarray], degree: int = 0
) -> ModuleMap:
    """The homomorphism M -> N sending the i-th minimal generator of M to ``images[i]``.

    Raises InputError when the assignment does not respect the relations of M.
    """
    p = M.ring.p
    _, gens = minimal_generators(M)
    if len(images) != len(gens):
        raise InputError(f"need {len(gens)} generator images, got {len(images)}")
    F = FreeModule(M.ring, tuple(g for g, _ in gens))
    tgt_imgs = [(g + degree, np.asarray(v, dtype=np.int64) % p) for (g, _), v in zip(gens, images)]
    for (g, v) in tgt_imgs:
        if v.shape[0] != N.piece(g):
            raise DimensionError(f"generator image has length {v.shape[0]}, expected {N.piece(g)}")
    blocks = {}
    for d in M.degrees():
        C = cover_matrix(F, M, gens, d)
        T = _cover_shifted(F, N, tgt_imgs, d, degree)
        if M.piece(d) == 0:
            blocks[d] = _zeros(N.piece(d + degree), 0)
            continue
        sel = la.pivot_columns(C.T, p)
        inv = _inverse(C[sel], p)
        f = la.matmul(inv, T[sel], p)
        if not np.array_equal(la.matmul(C, f, p), T % p):
            raise InputError("generator images do not satisfy the relations of the source module")
        blocks[d] = f.T.copy()
    return ModuleMap(M, N, blocks, degree)


def _cover_shifted(F: FreeModule, N: GradedModule, imgs, d: int, degree: int) -> np.ndarray:
    p = N.ring.p
    b2, b1, b0 = F.blocks(d)
    out = _zeros(b2 + b1 + b0, N.piece(d + degree))
    row = 0
    for a, block in ((2, b2), (1, b1), (0, b0)):
        for g, v in imgs:
            if g - degree != d - a:
                continue
            if a == 0:
                out[row] = v
                row += 1
            else:
                acts = N.a1(g) if a == 1 else N.a2(g)
                for i in range(acts.shape[0]):
                    out[row] = la.matmul(acts[i], v.reshape(-1, 1), p).reshape(-1)
                    row += 1
    return out


def _inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    red, piv = la.rref(np.hstack([a % p, np.eye(n, dtype=np.int64)]), p)
    if list(piv[:n]) != list(range(n)):
        raise InputError("matrix is not invertible")
    return red[:, n:]


def kernel_module(f: ModuleMap) -> tuple[GradedModule, ModuleMap]:
    """ker(f) as a graded module together with its inclusion into the source."""
    M, p, R = f.source, f.source.ring.p, f.source.ring
    if f.degree:
        raise InputError("kernel_module expects a degree-zero map")
    if M.is_zero():
        Z = zero_module(R)
        return Z, ModuleMap(Z, M, {})
    basis, free = {}, {}
    for d in M.degrees():
        n = M.piece(d)
        blk = f.block(d)
        if n == 0:
            basis[d], free[d] = _zeros(0, 0), []
        elif blk.shape[0] == 0:
            basis[d], free[d] = np.eye(n, dtype=np.int64), list(range(n))
        else:
            basis[d], free[d] = la.nullspace(blk, p)
    a1, a2 = [], []
    for d in M.degrees():
        kb = basis[d]
        for step, tensor, store in ((1, M.a1(d), a1), (2, M.a2(d), a2)):
            cols = free.get(d + step, [])
            out = _zeros(tensor.shape[0], len(cols), kb.shape[0])
            if kb.shape[0] and cols:
                for i in range(tensor.shape[0]):
                    out[i] = la.matmul(tensor[i], kb.T, p)[cols]
            store.append(out)
    K = GradedModule(R, tuple(basis[d].shape[0] for d in M.degrees()), M.base_degree, tuple(a1), tuple(a2))
    return K, ModuleMap(K, M, {d: basis[d].T.copy() for d in M.degrees()})
