"""Exact dense linear algebra over a prime field F_p.

Matrices are plain numpy integer arrays whose entries lie in ``[0, p)``.
Elimination is blocked: pivots are found on narrow column panels and the
trailing submatrix is updated with a float64 matrix product.  Every partial
sum is kept below 2**53, so the BLAS path is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError

DEFAULT_P = 101
MAX_P = 1 << 26
_PANEL = 32
_BASE = 8
_EXACT = float(1 << 53)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_P

    def __post_init__(self):
        if not (3 <= self.p < MAX_P) or not is_prime(self.p):
            raise InputError(f"p must be a prime in [3, {MAX_P}), got {self.p}")

    def inv(self, a: int) -> int:
        return pow(int(a) % self.p, -1, self.p)

    def matrix(self, rows) -> np.ndarray:
        return as_matrix(rows, self.p)

    def random_matrix(self, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)


def as_matrix(rows, p: int, cols: int | None = None) -> np.ndarray:
    a = np.asarray(rows, dtype=np.int64)
    if a.size == 0:
        if a.ndim == 2:
            return np.zeros(a.shape, dtype=np.int64)
        return np.zeros((0, cols or 0), dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact product of two matrices with entries in [0, p), reduced mod p."""
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return _fmatmul(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64), p).astype(np.int64)


def _fmatmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    k = a.shape[1]
    if k == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]))
    chunk = max(1, int(_EXACT // float((p - 1) ** 2)) - 1)
    if k <= chunk:
        return np.mod(a @ b, p)
    out = np.zeros((a.shape[0], b.shape[1]))
    for s in range(0, k, chunk):
        out = np.mod(out + a[:, s:s + chunk] @ b[s:s + chunk], p)
    return out


def _lu_base(a: np.ndarray, p: int, r0: int, c0: int, c1: int) -> list[int]:
    """Unblocked elimination of columns [c0, c1) below row r0; whole rows are swapped."""
    slab = a[r0:, c0:c1].copy()
    h, w = slab.shape
    perm = np.arange(h)
    piv: list[int] = []
    k = 0
    for j in range(w):
        if k == h:
            break
        nz = np.flatnonzero(slab[k:, j])
        if nz.size == 0:
            continue
        i = k + int(nz[0])
        if i != k:
            slab[[k, i]] = slab[[i, k]]
            perm[[k, i]] = perm[[i, k]]
        mult = np.mod(slab[k + 1:, j] * pow(int(slab[k, j]), -1, p), p)
        if j + 1 < w:
            slab[k + 1:, j + 1:] = np.mod(slab[k + 1:, j + 1:] - np.outer(mult, slab[k, j + 1:]), p)
        slab[k + 1:, j] = mult
        piv.append(c0 + j)
        k += 1
    moved = np.flatnonzero(perm != np.arange(h))
    if moved.size:
        a[r0 + moved] = a[r0 + perm[moved]]
    a[r0:, c0:c1] = slab
    return piv


def _trsm_unit_lower(low: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Solve ``low @ x = b`` for unit lower triangular ``low``."""
    k = low.shape[0]
    if k <= _PANEL:
        x = b.copy()
        for t in range(1, k):
            x[t] = np.mod(x[t] - _fmatmul(low[t:t + 1, :t], x[:t], p)[0], p)
        return x
    h = k // 2
    x1 = _trsm_unit_lower(low[:h, :h], b[:h], p)
    rest = np.mod(b[h:] - _fmatmul(low[h:, :h], x1, p), p)
    return np.vstack([x1, _trsm_unit_lower(low[h:, h:], rest, p)])


def _lu(a: np.ndarray, p: int, r0: int, c0: int, c1: int) -> list[int]:
    """Recursive LU (LAPACK storage) of columns [c0, c1) below row r0.

    Pivot rows land in r0, r0+1, ...; multipliers are stored below them in
    the pivot columns.  Columns outside [c0, c1) are swapped but not updated.
    """
    if c1 - c0 <= _BASE:
        return _lu_base(a, p, r0, c0, c1)
    mid = (c0 + c1) // 2
    left = _lu(a, p, r0, c0, mid)
    k = len(left)
    if k:
        block = a[r0:, left]
        low = np.tril(block[:k], -1) + np.eye(k)
        top = _trsm_unit_lower(low, a[r0:r0 + k, mid:c1], p)
        a[r0:r0 + k, mid:c1] = top
        if a.shape[0] > r0 + k:
            a[r0 + k:, mid:c1] = np.mod(a[r0 + k:, mid:c1] - _fmatmul(block[k:], top, p), p)
    if r0 + k == a.shape[0]:
        return left
    return left + _lu(a, p, r0 + k, mid, c1)


def _row_echelon(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row echelon form (float64, pivot rows only) and pivot columns."""
    a = np.array(a, dtype=np.float64)
    if a.size == 0:
        return a[:0], []
    pivots = _lu(a, p, 0, 0, a.shape[1])
    u = a[: len(pivots)]
    for t, j in enumerate(pivots):
        u[t + 1:, j] = 0
    return u, pivots


def _inv_upper(t: np.ndarray, p: int) -> np.ndarray:
    n = t.shape[0]
    if n <= _PANEL:
        aug = np.hstack([t, np.eye(n)])
        for i in range(n - 1, -1, -1):
            aug[i] = np.mod(aug[i] * pow(int(aug[i, i]), -1, p), p)
            if i:
                aug[:i] = np.mod(aug[:i] - np.outer(aug[:i, i], aug[i]), p)
        return aug[:, n:]
    h = n // 2
    ai = _inv_upper(t[:h, :h], p)
    di = _inv_upper(t[h:, h:], p)
    out = np.zeros_like(t)
    out[:h, :h] = ai
    out[h:, h:] = di
    out[:h, h:] = np.mod(-_fmatmul(_fmatmul(ai, t[:h, h:], p), di, p), p)
    return out


def _reduced(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    u, pivots = _row_echelon(a, p)
    if not pivots:
        return u, pivots
    return _fmatmul(_inv_upper(u[:, pivots], p), u, p), pivots


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form of ``m`` (same shape, zero rows at the bottom)
    together with its pivot columns; ``len(pivots)`` is the rank."""
    m = np.asarray(m)
    out = np.zeros(m.shape, dtype=np.int64)
    red, pivots = _reduced(m, p)
    out[: len(pivots)] = red.astype(np.int64)
    return out, tuple(pivots)


def rank(m: np.ndarray, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    if m.shape[0] > m.shape[1]:
        m = m.T
    return len(_row_echelon(m, p)[1])


def pivot_columns(m: np.ndarray, p: int) -> list[int]:
    """Column rank profile: the lexicographically first independent columns."""
    m = np.asarray(m)
    if m.size == 0:
        return []
    return _row_echelon(m, p)[1]


def nullspace(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Basis of ``{v : m @ v = 0}`` as rows, plus the free columns.

    The basis restricted to the free columns is the identity, so the
    coordinates of any kernel vector ``w`` are simply ``w[free]``.
    """
    m = np.asarray(m)
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n, dtype=np.int64), list(range(n))
    red, pivots = _reduced(m, p)
    pset = set(pivots)
    free = [j for j in range(n) if j not in pset]
    basis = np.zeros((len(free), n), dtype=np.int64)
    if free:
        basis[:, free] = np.eye(len(free), dtype=np.int64)
        if pivots:
            basis[:, pivots] = np.mod(-red[:, free].T, p).astype(np.int64)
    return basis, free


def _spans_everything(rows: np.ndarray, n: int, p: int) -> bool:
    # rank(A @ rows) <= rank(rows), so a full-rank random compression is a proof
    rng = np.random.default_rng(0x5EED)
    a = rng.integers(0, p, size=(n + 4, rows.shape[0])).astype(np.float64)
    return rank(_fmatmul(a, np.asarray(rows, dtype=np.float64), p), p) == n


def complement_columns(rows: np.ndarray, n: int, p: int) -> list[int]:
    """Standard basis positions completing the row span of ``rows`` to F_p^n."""
    if rows.shape[0] == 0:
        return list(range(n))
    if rows.shape[0] > 2 * n and _spans_everything(rows, n, p):
        return []
    piv = set(pivot_columns(rows, p))
    return [j for j in range(n) if j not in piv]


def quotient_projection(rows: np.ndarray, n: int, p: int) -> tuple[np.ndarray, list[int]]:
    """Projection F_p^n -> F_p^n / span(rows) in the basis of non-pivot unit vectors.

    Returns ``(proj, keep)`` with ``proj`` of shape ``(len(keep), n)`` acting on
    column vectors; the section is the inclusion of the unit vectors ``keep``.
    """
    if rows.shape[0] == 0:
        return np.eye(n, dtype=np.int64), list(range(n))
    red, pivots = _reduced(rows, p)
    pset = set(pivots)
    keep = [j for j in range(n) if j not in pset]
    proj = np.zeros((len(keep), n), dtype=np.int64)
    if keep:
        proj[:, keep] = np.eye(len(keep), dtype=np.int64)
        if pivots:
            proj[:, pivots] = np.mod(-red[:, keep].T, p).astype(np.int64)
    return proj, keep


def solve(m: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some ``x`` with ``m @ x = b``, or None when the system is inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if m.shape[0] != b.shape[0]:
        raise DimensionError(f"rhs length {b.shape[0]} does not match {m.shape[0]} rows")
    n = m.shape[1]
    aug = np.hstack([m % p, (b % p).reshape(-1, 1)])
    red, pivots = rref(aug, p)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = red[i, n]
    return x


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of F_p^n held by its reduced echelon basis (one row per vector)."""

    ambient_dim: int
    basis: np.ndarray
    p: int
    pivots: tuple[int, ...] = ()

    @classmethod
    def from_rows(cls, rows, ambient_dim: int, p: int) -> "Subspace":
        a = as_matrix(rows, p, cols=ambient_dim)
        if a.shape[0] == 0:
            return cls(ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), p, ())
        if a.shape[1] != ambient_dim:
            raise DimensionError(f"vectors of length {a.shape[1]} in ambient dimension {ambient_dim}")
        red, pivots = rref(a, p)
        return cls(ambient_dim, red[: len(pivots)], p, pivots)

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls.from_rows(np.zeros((0, ambient_dim)), ambient_dim, p)

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls.from_rows(np.eye(ambient_dim, dtype=np.int64), ambient_dim, p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, v) -> bool:
        v = as_matrix(v, self.p, cols=self.ambient_dim)
        if v.shape[1] != self.ambient_dim:
            raise DimensionError("vector length does not match ambient dimension")
        return rank(np.vstack([self.basis, v]), self.p) == self.dim

    def coords(self, v) -> np.ndarray:
        """Coordinates of ``v`` in the echelon basis (assumes membership)."""
        v = np.asarray(v, dtype=np.int64) % self.p
        return v[..., list(self.pivots)]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.p == other.p
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.p, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"


def _check_same_space(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim or a.p != b.p:
        raise DimensionError(f"subspaces live in different spaces: {a} vs {b}")


def kernel_basis(m: np.ndarray, p: int) -> Subspace:
    m = np.asarray(m)
    basis, _ = nullspace(m, p)
    return Subspace.from_rows(basis, m.shape[1], p)


def image_basis(m: np.ndarray, p: int) -> Subspace:
    """Column space of ``m``."""
    m = np.asarray(m)
    return Subspace.from_rows(m.T, m.shape[0], p)


def subspace_equal(a: Subspace, b: Subspace) -> bool:
    _check_same_space(a, b)
    return a == b


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_same_space(a, b)
    return Subspace.from_rows(np.vstack([a.basis, b.basis]), a.ambient_dim, a.p)


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    _check_same_space(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.p)
    stacked = np.vstack([a.basis, np.mod(-b.basis, a.p)]).T
    coeffs, _ = nullspace(stacked, a.p)
    return Subspace.from_rows(matmul(coeffs[:, : a.dim], a.basis, a.p), a.ambient_dim, a.p)
