"""Graded commutative algebras R = R0 + R1 + R2 with m^3 = 0.

An algebra is stored by its structure constants ``mult11[i, j, :]``: the
coordinates in the fixed R2 basis of the product of the i-th and j-th
degree-one basis vectors.  Associativity is automatic because every triple
product of positive-degree elements vanishes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import exactla as la
from .errors import InputError, SearchExhausted


@dataclass(frozen=True, eq=False)
class Element:
    degree: int
    coords: np.ndarray

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise InputError(f"elements live in degrees 0, 1, 2; got {self.degree}")
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=np.int64).reshape(-1))

    def is_zero(self) -> bool:
        return not self.coords.any()

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.degree, self.coords.tobytes()))

    def __repr__(self):
        return f"Element(deg={self.degree}, {self.coords.tolist()})"


@dataclass(frozen=True, eq=False)
class _Truncation:
    p: int
    dim1: int
    dim2: int
    mult11: np.ndarray
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        la.PrimeField(self.p)
        m = np.asarray(self.mult11, dtype=np.int64).reshape(self.dim1, self.dim1, self.dim2) % self.p
        object.__setattr__(self, "mult11", m)
        if not np.array_equal(m, m.transpose(1, 0, 2)):
            raise InputError("mult11 is not symmetric; the algebra must be commutative")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(self.dim1)))

    @property
    def dims(self) -> tuple[int, int, int]:
        return (1, self.dim1, self.dim2)

    def piece(self, degree: int) -> int:
        return self.dims[degree] if 0 <= degree <= 2 else 0

    def element(self, degree: int, coords) -> Element:
        coords = np.asarray(coords, dtype=np.int64).reshape(-1) % self.p
        if coords.shape[0] != self.piece(degree):
            raise InputError(f"degree-{degree} piece has dimension {self.piece(degree)}")
        return Element(degree, coords)

    def basis_element(self, degree: int, index: int) -> Element:
        v = np.zeros(self.piece(degree), dtype=np.int64)
        v[index] = 1
        return Element(degree, v)

    def one(self) -> Element:
        return Element(0, np.ones(1, dtype=np.int64))

    def zero(self, degree: int) -> Element:
        return Element(degree, np.zeros(self.piece(degree), dtype=np.int64))

    def mul(self, a: Element, b: Element) -> Element:
        d = a.degree + b.degree
        if d > 2:
            return None
        if a.degree == 0:
            return Element(d, (a.coords[0] * b.coords) % self.p)
        if b.degree == 0:
            return Element(d, (b.coords[0] * a.coords) % self.p)
        return Element(2, np.einsum("i,j,ijk->k", a.coords, b.coords, self.mult11) % self.p)

    def add(self, a: Element, b: Element) -> Element:
        if a.degree != b.degree:
            raise InputError("cannot add elements of different degrees")
        return Element(a.degree, (a.coords + b.coords) % self.p)

    def scale(self, c: int, a: Element) -> Element:
        return Element(a.degree, (int(c) * a.coords) % self.p)

    def mult_matrix(self, a: Element, source_degree: int) -> np.ndarray:
        """Matrix of multiplication by ``a`` from R_s to R_{s+deg a} (column convention)."""
        t = source_degree + a.degree
        rows, cols = self.piece(t), self.piece(source_degree)
        if rows == 0 or cols == 0:
            return np.zeros((rows, cols), dtype=np.int64)
        if a.degree == 0:
            return (a.coords[0] * np.eye(rows, dtype=np.int64)) % self.p
        if source_degree == 0:
            return a.coords.reshape(-1, 1) % self.p
        return np.einsum("i,ijk->kj", a.coords, self.mult11) % self.p

    def mult_by(self, x: Element) -> np.ndarray:
        """Multiplication by a degree-one element, degree 1 -> degree 2."""
        return self.mult_matrix(x, 1)

    def square(self, x: Element) -> Element:
        return self.mul(x, x)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": self._kind,
            "p": self.p,
            "dim1": self.dim1,
            "dim2": self.dim2,
            "mult11": self.mult11.tolist(),
            "names": list(self.names),
        }

    def content_hash(self) -> str:
        payload = {k: v for k, v in self.to_json().items() if k != "names"}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]

    def same_as(self, other) -> bool:
        return (
            type(self) is type(other)
            and self.p == other.p
            and self.dims == other.dims
            and np.array_equal(self.mult11, other.mult11)
        )


@dataclass(frozen=True, eq=False)
class GradedAlgebra(_Truncation):
    """R = k + R1 + R2 with m^3 = 0, given by R1 x R1 -> R2."""

    _kind = "algebra"

    def __repr__(self):
        return f"GradedAlgebra(p={self.p}, hilbert={self.dims})"


@dataclass(frozen=True, eq=False)
class DegreeTwoRingData(_Truncation):
    """Degree <= 2 truncation of a positive-dimensional graded ring S."""

    _kind = "degree_two"

    def __repr__(self):
        return f"DegreeTwoRingData(p={self.p}, dims={self.dims})"


def _monomials(n: int) -> list[tuple[int, int]]:
    return list(combinations_with_replacement(range(n), 2))


def parse_quadric(text: str, names: list[str], p: int) -> dict[tuple[int, int], int]:
    """Parse a homogeneous quadratic form such as ``"x*y - z*w"`` or ``"x^2"``."""
    import sympy

    symbols = sympy.symbols(names)
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals=dict(zip(names, symbols)))
        poly = sympy.Poly(sympy.expand(expr), *symbols)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise InputError(f"cannot parse quadric {text!r}: {exc}") from exc
    out: dict[tuple[int, int], int] = {}
    for exps, coeff in poly.terms():
        if sum(exps) != 2:
            raise InputError(f"{text!r} is not a homogeneous quadric")
        if not coeff.is_integer:
            coeff = sympy.Rational(coeff)
            coeff = int(coeff.p) * pow(int(coeff.q), -1, p)
        idx = [i for i, e in enumerate(exps) for _ in range(e)]
        key = (idx[0], idx[1])
        out[key] = (out.get(key, 0) + int(coeff)) % p
    return out


def parse_linear(text: str, R: "_Truncation") -> Element:
    """A degree-one element written in the variable names of R, e.g. ``"x - 2*y"`` or ``"0"``."""
    import sympy

    symbols = sympy.symbols(list(R.names))
    try:
        expr = sympy.expand(sympy.sympify(str(text).replace("^", "**"), locals=dict(zip(R.names, symbols))))
        poly = sympy.Poly(expr, *symbols)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise InputError(f"cannot parse linear form {text!r}: {exc}") from exc
    coords = np.zeros(R.dim1, dtype=np.int64)
    for exps, coeff in poly.terms():
        if coeff == 0:
            continue
        if sum(exps) != 1:
            raise InputError(f"{text!r} is not a linear form")
        c = sympy.Rational(coeff)
        coords[exps.index(1)] = int(c.p) * pow(int(c.q), -1, R.p) % R.p
    return Element(1, coords)


def _quadric_rows(num_vars: int, quadrics, p: int) -> np.ndarray:
    monos = _monomials(num_vars)
    index = {m: i for i, m in enumerate(monos)}
    rows = np.zeros((len(quadrics), len(monos)), dtype=np.int64)
    for r, q in enumerate(quadrics):
        for key, c in dict(q).items():
            if len(key) != 2:
                raise InputError(f"quadric term {key} is not of degree two")
            i, j = sorted(int(t) for t in key)
            if not (0 <= i and j < num_vars):
                raise InputError(f"variable index out of range in {key}")
            rows[r, index[(i, j)]] = (rows[r, index[(i, j)]] + int(c)) % p
    return rows


def _from_sym2_relations(num_vars: int, rows: np.ndarray, p: int, names=()) -> tuple[int, np.ndarray]:
    monos = _monomials(num_vars)
    proj, _ = la.quotient_projection(rows, len(monos), p)
    dim2 = proj.shape[0]
    mult = np.zeros((num_vars, num_vars, dim2), dtype=np.int64)
    for k, (i, j) in enumerate(monos):
        mult[i, j] = proj[:, k]
        mult[j, i] = proj[:, k]
    return dim2, mult


def build_quadratic_quotient(num_vars: int, quadrics, p: int = la.DEFAULT_P, names=()) -> GradedAlgebra:
    """k[X_0..X_{n-1}] / (I + m^3) for an ideal I generated by quadrics.

    Each quadric is a mapping ``{(i, j): coeff}`` over monomials X_i X_j, or a
    string parsed with the variable ``names``.  The R2 basis is the set of
    monomials that are not echelon pivots of the quadrics, in lex order.
    """
    if num_vars < 0:
        raise InputError("num_vars must be nonnegative")
    names = tuple(names) or tuple(f"x{i}" for i in range(num_vars))
    parsed = [parse_quadric(q, list(names), p) if isinstance(q, str) else q for q in quadrics]
    rows = _quadric_rows(num_vars, parsed, p)
    dim2, mult = _from_sym2_relations(num_vars, rows, p)
    return GradedAlgebra(p, num_vars, dim2, mult, names)


def circulant_minors(r: int) -> list[dict[tuple[int, int], int]]:
    """2-minors of the 2 x (r+1) matrix with rows (X_0..X_r) and (X_1..X_r, X_0)."""
    n = r + 1
    top = list(range(n))
    bottom = [(i + 1) % n for i in range(n)]
    minors = []
    for i in range(n):
        for j in range(i + 1, n):
            q: dict[tuple[int, int], int] = {}
            for key, c in (((top[i], bottom[j]), 1), ((top[j], bottom[i]), -1)):
                key = tuple(sorted(key))
                q[key] = q.get(key, 0) + c
            minors.append(q)
    return minors


def build_circulant_ring(r: int, p: int = la.DEFAULT_P) -> DegreeTwoRingData:
    if r < 2:
        raise InputError(f"circulant ring needs r >= 2, got {r}")
    n = r + 1
    rows = _quadric_rows(n, circulant_minors(r), p)
    dim2, mult = _from_sym2_relations(n, rows, p)
    if dim2 != n:
        raise InputError(f"circulant minors give dim S2 = {dim2}, expected {n} (p = {p})")
    return DegreeTwoRingData(p, n, dim2, mult, tuple(f"X{i}" for i in range(n)))


def veliche_ring(p: int = la.DEFAULT_P) -> GradedAlgebra:
    names = ("x", "y", "z", "w")
    quadrics = ["x^2", "x*y - z*w", "x*y - w^2", "x*z - y*w", "x*w - y^2", "x*w - y*z", "x*w - z^2"]
    return build_quadratic_quotient(4, quadrics, p, names)


def quotient_by_quadric(S: _Truncation, f: Element) -> GradedAlgebra:
    """R = S / fS truncated at degree two: R1 = S1, R2 = S2 / k f."""
    if f.degree != 2 or f.coords.shape[0] != S.dim2:
        raise InputError("f must be a degree-two element of S")
    if f.is_zero():
        raise InputError("cannot divide by the zero quadric")
    proj, _ = la.quotient_projection(f.coords.reshape(1, -1) % S.p, S.dim2, S.p)
    mult = np.einsum("kl,ijl->ijk", proj, S.mult11) % S.p
    return GradedAlgebra(S.p, S.dim1, proj.shape[0], mult, S.names)


def hilbert_coeffs(R: _Truncation) -> tuple[int, int, int]:
    return R.dims


def is_good_shape(R: _Truncation) -> bool:
    """Hilbert series (1+t)(1+rt) with r >= 2."""
    return R.dim1 == R.dim2 + 1 and R.dim2 >= 2


def socle(R: GradedAlgebra) -> la.Subspace:
    """(0 :_R m) inside m = R1 + R2, coordinates (R1 | R2)."""
    n = R.dim1 + R.dim2
    if R.dim1 == 0:
        return la.Subspace.full(n, R.p)
    # a1 in R1 is in the socle iff a1 * w = 0 for every basis vector w of R1
    stacked = R.mult11.transpose(1, 2, 0).reshape(R.dim1 * R.dim2, R.dim1)
    ker, _ = la.nullspace(stacked, R.p)
    rows = np.zeros((ker.shape[0] + R.dim2, n), dtype=np.int64)
    rows[: ker.shape[0], : R.dim1] = ker
    rows[ker.shape[0]:, R.dim1:] = np.eye(R.dim2, dtype=np.int64)
    return la.Subspace.from_rows(rows, n, R.p)


def degree_two_part(R: GradedAlgebra) -> la.Subspace:
    n = R.dim1 + R.dim2
    rows = np.zeros((R.dim2, n), dtype=np.int64)
    rows[:, R.dim1:] = np.eye(R.dim2, dtype=np.int64)
    return la.Subspace.from_rows(rows, n, R.p)


def socle_type(R: GradedAlgebra) -> int:
    """r = dim_k Hom_R(k, R) = dim of the socle."""
    return socle(R).dim


def is_minimal_reduction(S: _Truncation, x: Element) -> bool:
    if x.degree != 1 or x.is_zero():
        return False
    return la.rank(S.mult_by(x), S.p) == S.dim2


def find_minimal_reduction(S: _Truncation, seed: int = 0, budget: int = 200) -> Element:
    """Seeded random search for x in S1 with x * S1 = S2 (re-verified)."""
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        x = S.element(1, rng.integers(0, S.p, size=S.dim1))
        if is_minimal_reduction(S, x):
            return x
    raise SearchExhausted(f"no minimal reduction found in {budget} samples (p = {S.p})")


def random_quadric(S: _Truncation, seed: int = 0) -> Element:
    rng = np.random.default_rng(seed)
    while True:
        f = S.element(2, rng.integers(0, S.p, size=S.dim2))
        if not f.is_zero():
            return f


def trivial_square_ring(num_vars: int = 2, p: int = la.DEFAULT_P) -> GradedAlgebra:
    """k[x_1..x_n]/(x_1..x_n)^2, the m^2 = 0 ring."""
    return GradedAlgebra(p, num_vars, 0, np.zeros((num_vars, num_vars, 0), dtype=np.int64))


def algebra_from_json(data: dict):
    from .errors import SchemaError

    try:
        if data.get("schema") != 1:
            raise SchemaError(f"unsupported schema {data.get('schema')!r}")
        cls = {"algebra": GradedAlgebra, "degree_two": DegreeTwoRingData}[data.get("kind", "algebra")]
        mult = np.asarray(data["mult11"], dtype=np.int64).reshape(data["dim1"], data["dim1"], data["dim2"])
        return cls(int(data["p"]), int(data["dim1"]), int(data["dim2"]), mult, tuple(data.get("names", ())))
    except SchemaError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"invalid ring JSON: {exc}") from exc
