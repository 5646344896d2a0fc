"""Hom, duals, biduality, Ext, Bass numbers and the Koszul test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exactla as la
from .algebra import GradedAlgebra
from .gmodule import (
    BettiTable,
    GradedModule,
    ModuleMap,
    Resolution,
    matlis_dual_ring,
    minimal_resolution,
    residue_field,
    ring_module,
)
from .errors import InputError


def _same_ring(M: GradedModule, N: GradedModule) -> None:
    if M.ring is not N.ring and not M.ring.same_as(N.ring):
        raise InputError("modules live over different algebras")


@dataclass(frozen=True, eq=False)
class _HomPiece:
    """Maps of one internal degree j, as rows over the stacked block unknowns."""

    layout: tuple  # (d, offset, rows, cols) for the block f_d : M_d -> N_{d+j}
    size: int
    basis: np.ndarray
    free: list

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def blocks(self, vec: np.ndarray) -> dict:
        return {d: vec[o:o + r * c].reshape(r, c) for d, o, r, c in self.layout}

    def flatten(self, blocks: dict) -> np.ndarray:
        v = np.zeros(self.size, dtype=np.int64)
        for d, o, r, c in self.layout:
            b = blocks.get(d)
            if b is not None:
                v[o:o + r * c] = b.reshape(-1)
        return v

    def coords(self, vec: np.ndarray) -> np.ndarray:
        return vec[self.free]


@dataclass(frozen=True, eq=False)
class HomSpace:
    source: GradedModule
    target: GradedModule
    pieces: dict

    @property
    def graded_dims(self) -> dict:
        return {j: pc.dim for j, pc in sorted(self.pieces.items()) if pc.dim}

    @property
    def dim(self) -> int:
        return sum(pc.dim for pc in self.pieces.values())

    def maps(self, j: int) -> list[ModuleMap]:
        pc = self.pieces.get(j)
        if pc is None:
            return []
        return [ModuleMap(self.source, self.target, pc.blocks(v), j) for v in pc.basis]

    @property
    def basis(self) -> list[ModuleMap]:
        return [f for j in sorted(self.pieces) for f in self.maps(j)]

    def coords_of(self, f: ModuleMap) -> np.ndarray:
        pc = self.pieces[f.degree]
        return pc.coords(pc.flatten(f.blocks) % self.source.ring.p)


def _hom_piece(M: GradedModule, N: GradedModule, j: int) -> _HomPiece:
    p = M.ring.p
    layout, off = [], 0
    for d in M.degrees():
        r, c = N.piece(d + j), M.piece(d)
        if r and c:
            layout.append((d, off, r, c))
            off += r * c
    where = {d: (o, r, c) for d, o, r, c in layout}
    eqs = []
    for d in M.degrees():
        if d not in where:
            continue
        o, r, c = where[d]
        for step, AM_all, AN_all in ((1, M.a1(d), N.a1(d + j)), (2, M.a2(d), N.a2(d + j))):
            rows_out = N.piece(d + step + j)
            if rows_out == 0:
                continue
            up = where.get(d + step)
            for i in range(AM_all.shape[0]):
                # A_N f_d - f_{d+step} A_M = 0, vectorised row-major
                E = np.zeros((rows_out * c, off), dtype=np.int64)
                E[:, o:o + r * c] = np.kron(AN_all[i], np.eye(c, dtype=np.int64))
                if up is not None:
                    o2, r2, c2 = up
                    E[:, o2:o2 + r2 * c2] -= np.kron(np.eye(r2, dtype=np.int64), AM_all[i].T)
                eqs.append(E % p)
    if off == 0:
        return _HomPiece(tuple(layout), 0, np.zeros((0, 0), dtype=np.int64), [])
    if eqs:
        basis, free = la.nullspace(np.vstack(eqs), p)
    else:
        basis, free = np.eye(off, dtype=np.int64), list(range(off))
    return _HomPiece(tuple(layout), off, basis, free)


def _hom_degrees(M: GradedModule, N: GradedModule) -> range:
    if M.is_zero() or N.is_zero():
        return range(0)
    return range(N.base_degree - M.top_degree, N.top_degree - M.base_degree + 1)


def hom_space(M: GradedModule, N: GradedModule) -> HomSpace:
    """All homogeneous R-linear maps M -> N, one linear system per internal degree."""
    _same_ring(M, N)
    return HomSpace(M, N, {j: _hom_piece(M, N, j) for j in _hom_degrees(M, N)})


def _module_of_homs(H: HomSpace) -> GradedModule:
    """Hom(M, N) as a graded module with its raw grading, via (a.f)(m) = a f(m)."""
    M, N = H.source, H.target
    R, p = M.ring, M.ring.p
    degs = [j for j in sorted(H.pieces)]
    if not degs or not any(H.pieces[j].dim for j in degs):
        from .gmodule import zero_module

        return zero_module(R)
    lo, hi = degs[0], degs[-1]
    dims, a1, a2 = [], [], []
    for j in range(lo, hi + 1):
        pc = H.pieces.get(j)
        dims.append(pc.dim if pc else 0)
    for j in range(lo, hi + 1):
        pc = H.pieces.get(j)
        n = pc.dim if pc else 0
        acts = []
        for step, dim_a in ((1, R.dim1), (2, R.dim2)):
            tgt = H.pieces.get(j + step)
            nt = tgt.dim if tgt else 0
            out = np.zeros((dim_a, nt, n), dtype=np.int64)
            if n and nt:
                for col, v in enumerate(pc.basis):
                    blocks = pc.blocks(v)
                    for i in range(dim_a):
                        moved = {}
                        for d, f in blocks.items():
                            A = N.a1(d + j) if step == 1 else N.a2(d + j)
                            moved[d] = la.matmul(A[i], f, p)
                        out[i, :, col] = tgt.coords(tgt.flatten(moved))
            acts.append(out)
        a1.append(acts[0])
        a2.append(acts[1])
    return GradedModule(R, tuple(dims), lo, tuple(a1), tuple(a2))


@dataclass(frozen=True, eq=False)
class Dual:
    module: GradedModule
    raw_offset: int
    hom: HomSpace


def dual_raw(M: GradedModule) -> Dual:
    H = hom_space(M, ring_module(M.ring))
    D = _module_of_homs(H)
    return Dual(D, D.base_degree, H)


def dual(M: GradedModule, normalize: bool = True) -> GradedModule:
    """M* = Hom(M, R); by default shifted so its lowest nonzero piece sits in degree 0."""
    D = dual_raw(M).module
    return D.normalized() if normalize else D


def bidual_check(M: GradedModule) -> tuple[bool, ModuleMap]:
    """Evaluation M -> M** and whether it is bijective in every degree."""
    R, p = M.ring, M.ring.p
    dl = dual_raw(M)
    D, H = dl.module, dl.hom
    HH = hom_space(D, ring_module(R))
    DD = _module_of_homs(HH)
    blocks = {}
    for d in M.degrees():
        pc = HH.pieces.get(d)
        n = M.piece(d)
        if pc is None or pc.dim == 0:
            blocks[d] = np.zeros((0, n), dtype=np.int64)
            continue
        ev = np.zeros((pc.dim, n), dtype=np.int64)
        for col in range(n):
            m = np.zeros(n, dtype=np.int64)
            m[col] = 1
            # ev(m) restricted to D_j sends phi to phi(m) in R_{d+j}
            parts = {}
            for j in D.degrees():
                hp = H.pieces.get(j)
                if hp is None or hp.dim == 0 or R.piece(d + j) == 0:
                    continue
                cols = []
                for v in hp.basis:
                    f = hp.blocks(v).get(d)
                    cols.append(np.zeros(R.piece(d + j), dtype=np.int64) if f is None else la.matmul(f, m.reshape(-1, 1), p).reshape(-1))
                parts[j] = np.stack(cols, axis=1)
            ev[:, col] = pc.coords(pc.flatten(parts))
        blocks[d] = ev
    ev_map = ModuleMap(M, DD, blocks)
    ok = all(
        M.piece(d) == DD.piece(d) and (M.piece(d) == 0 or la.rank(ev_map.block(d), p) == M.piece(d))
        for d in set(M.degrees()) | set(DD.degrees())
    )
    return ok, ev_map


@dataclass(frozen=True, eq=False)
class ExtReport:
    """dim Ext^i(M, N)_j for 0 <= i <= i_max, labelled as computed up to i_max."""

    dims: dict
    i_max: int

    def total(self, i: int) -> int:
        return sum(v for (a, _), v in self.dims.items() if a == i)

    def totals(self) -> list[int]:
        return [self.total(i) for i in range(self.i_max + 1)]

    def vanishes(self, lo: int = 1, hi: int | None = None) -> bool:
        hi = self.i_max if hi is None else hi
        return all(self.total(i) == 0 for i in range(lo, hi + 1))

    def first_nonzero(self, lo: int = 1) -> int | None:
        for i in range(lo, self.i_max + 1):
            if self.total(i):
                return i
        return None


def _action_tensor(N: GradedModule, a: int, d: int) -> np.ndarray:
    if a == 0:
        return np.eye(N.piece(d), dtype=np.int64).reshape(1, N.piece(d), N.piece(d))
    return N.a1(d) if a == 1 else N.a2(d)


def _cochain_layout(F, N: GradedModule, j: int) -> list[tuple[int, int, int]]:
    """(generator degree, count, block size) for C_j = prod over generators e of N_{deg e + j}."""
    return [(g, F.count(g), N.piece(g + j)) for g in sorted(set(F.gens))]


def cochain_differential(res: Resolution, i: int, N: GradedModule, j: int) -> np.ndarray:
    """Hom(F_i, N)_j -> Hom(F_{i+1}, N)_j, with columns indexed by F_i generators."""
    p = N.ring.p
    src, tgt = res.frees[i], res.frees[i + 1]
    cols = _cochain_layout(src, N, j)
    rows = _cochain_layout(tgt, N, j)
    col_off, c = {}, 0
    for g, n, s in cols:
        col_off[g] = c
        c += n * s
    row_off, r = {}, 0
    for g, n, s in rows:
        row_off[g] = r
        r += n * s
    out = np.zeros((r, c), dtype=np.int64)
    if r == 0 or c == 0:
        return out
    for (gp, g), coef in res.coefficient_tensors(i).items():
        a = gp - g
        A = _action_tensor(N, a, g + j)
        if A.size == 0:
            continue
        blk = np.einsum("abi,ixy->axby", coef, A) % p
        n_out, s_out, n_in, s_in = blk.shape
        out[row_off[gp]:row_off[gp] + n_out * s_out, col_off[g]:col_off[g] + n_in * s_in] = blk.reshape(
            n_out * s_out, n_in * s_in
        )
    return out


def ext_from_resolution(res: Resolution, N: GradedModule, i_max: int) -> ExtReport:
    if i_max + 1 > res.length and res.frees[-1].gens:
        raise InputError(f"resolution of length {res.length} cannot give Ext up to {i_max}")
    p = N.ring.p
    frees = list(res.frees)
    if N.is_zero():
        return ExtReport({}, i_max)
    gens_all = [g for F in frees for g in F.gens]
    if not gens_all:
        return ExtReport({}, i_max)
    js = range(N.base_degree - max(gens_all), N.top_degree - min(gens_all) + 1)
    dims = {}

    def rank_of(i, j):
        if i < 0 or i + 1 >= len(frees):
            return 0
        m = cochain_differential(res, i, N, j)
        return la.rank(m, p) if m.size else 0

    for j in js:
        prev = 0
        for i in range(0, i_max + 1):
            if i >= len(frees):
                break
            size = sum(n * s for _, n, s in _cochain_layout(frees[i], N, j))
            cur = rank_of(i, j)
            v = size - cur - prev
            if v:
                dims[(i, j)] = v
            prev = cur
    return ExtReport(dims, i_max)


def ext(M: GradedModule, N: GradedModule, i_max: int) -> ExtReport:
    """dim Ext^i_R(M, N)_j for 0 <= i <= i_max from a minimal resolution prefix."""
    _same_ring(M, N)
    res = minimal_resolution(M, i_max + 1)
    return ext_from_resolution(res, N, i_max)


def bass_numbers(R: GradedAlgebra, N: int, method: str = "matlis") -> list[int]:
    """mu_i = dim_k Ext^i_R(k, R) for 0 <= i <= N.

    ``method="matlis"`` reads them off as the Betti numbers of Hom_k(R, k);
    ``method="ext"`` takes cohomology of Hom(resolution of k, R).
    """
    if method == "matlis":
        res = minimal_resolution(matlis_dual_ring(R), N)
        return res.betti.totals(N)
    if method == "ext":
        return ext(residue_field(R), ring_module(R), N).totals()
    raise InputError(f"unknown method {method!r}")


def expected_bass(r: int, N: int) -> list[int]:
    """Coefficients of (r - t)/(1 - r t)."""
    return [r] + [r ** (i - 1) * (r * r - 1) for i in range(1, N + 1)]


def expected_koszul_betti(r: int, N: int) -> list[int]:
    return [sum(r ** e for e in range(i + 1)) for i in range(N + 1)]


def koszul_check(R: GradedAlgebra, N: int) -> tuple[bool, BettiTable]:
    """Linear resolution of k up to step N (no off-diagonal Tor)."""
    res = minimal_resolution(residue_field(R), N)
    return res.betti.is_linear(), res.betti
