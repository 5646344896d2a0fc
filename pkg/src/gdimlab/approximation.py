"""Why the residue field of S/x^2 S has no approximation by G-dimension zero modules.

Two routes are provided.  The arithmetic route enumerates every admissible
shape of a minimal approximation 0 -> Y -> X -> k -> 0 (u free summands and
nonfree summands with s_j generators) and shows that the x-exactness forced
on Y by the Ext^1 condition never matches the graded dimensions of Y.  The
audit route takes concrete candidate sequences and reports which conditions
they break.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from . import exactla as la
from .algebra import DegreeTwoRingData, Element, GradedAlgebra, is_good_shape, is_minimal_reduction, quotient_by_quadric
from .errors import InputError
from .gdim import GdimCertificate, short_exact_failures
from .gmodule import GradedModule, ModuleMap, kernel_module, residue_field
from .homology import ext


def build_R_from_reduction(S: DegreeTwoRingData, x: Element) -> GradedAlgebra:
    """R = S / x^2 S for a minimal reduction x of S."""
    if not is_minimal_reduction(S, x):
        raise InputError("x is not a minimal reduction: x S1 != S2")
    x2 = S.square(x)
    if x2.is_zero():
        raise InputError("x^2 = 0 in S2")
    R = quotient_by_quadric(S, x2)
    if not is_good_shape(R):
        raise InputError(f"S/x^2 S has Hilbert function {R.dims}, not (1, r+1, r) with r >= 2")
    return R


def wakamatsu_check(Xprime: GradedModule, Y: GradedModule) -> bool:
    """Ext^1(X', Y) = 0, computed exactly from a minimal resolution of X'."""
    if Xprime.is_zero() or Y.is_zero():
        return True
    return ext(Xprime, Y, 1).total(1) == 0


def x_exactness_failures(Y: GradedModule, x: Element) -> list[int]:
    """Degrees d where ker(x : Y_d -> Y_{d+1}) differs from x Y_{d-1}."""
    p = Y.ring.p
    bad = []
    for d in Y.degrees():
        n = Y.piece(d)
        if n == 0:
            continue
        out = Y.act(x, d)
        ker_dim = n - (la.rank(out, p) if out.size else 0)
        inc = Y.act(x, d - 1)
        im_dim = la.rank(inc, p) if inc.size else 0
        if ker_dim != im_dim:
            bad.append(d)
    return bad


@dataclass(frozen=True)
class YConstraint:
    r: int
    u: int
    s: tuple
    dims: tuple
    lhs: int
    rhs: int

    @property
    def satisfied(self) -> bool:
        return self.lhs == self.rhs

    @property
    def margin(self) -> int:
        return self.rhs - self.lhs


def y_dimension_constraints(r: int, u: int, s) -> YConstraint:
    """Graded dimensions of Y and the equation dim Y0 + dim Y2 = dim Y1 forced by x-exactness."""
    s = tuple(int(v) for v in s)
    if r < 1:
        raise InputError("r must be positive")
    if u < 0 or any(v < 1 for v in s):
        raise InputError("u must be nonnegative and every s_j positive")
    if u == 0 and not s:
        raise InputError("X = 0 cannot map onto k")
    total = sum(s)
    y0 = u + total - 1
    y1 = u * (r + 1) + r * total
    y2 = r * u
    return YConstraint(r, u, s, (y0, y1, y2), y0 + y2, y1)


def closed_form_margin(r: int, s) -> int:
    return (r - 1) * sum(s) + 1


def symbolic_reduction() -> dict:
    """The exactness equation with u and the s-sum kept symbolic."""
    import sympy

    r, u, total = sympy.symbols("r u Sigma_s", integer=True)
    y0 = u + total - 1
    y1 = u * (r + 1) + r * total
    y2 = r * u
    reduced = sympy.expand((y0 + y2) - y1)
    solution = sympy.solve(sympy.Eq(reduced, 0), total)
    return {
        "equation": f"{sympy.sstr(y0 + y2)} = {sympy.sstr(y1)}",
        "reduced": f"{sympy.sstr(sympy.factor(reduced + 1))} = 1",
        "u_cancels": u not in reduced.free_symbols,
        "sigma_s": [sympy.sstr(v) for v in solution],
    }


@dataclass
class ObstructionTable:
    r: int
    rows: list
    symbolic: dict
    out_of_hypothesis: bool

    @property
    def satisfiable(self) -> list:
        return [row for row in self.rows if row.satisfied]

    @property
    def margins_match(self) -> bool:
        return all(row.margin == closed_form_margin(row.r, row.s) for row in self.rows)


def obstruction_unsatisfiable(r: int, u_max: int, s_max: int, length_max: int) -> ObstructionTable:
    """Enumerate u <= u_max and multisets s of length <= length_max with entries <= s_max."""
    rows = []
    for u in range(u_max + 1):
        for length in range(length_max + 1):
            for s in combinations_with_replacement(range(1, s_max + 1), length):
                if u == 0 and not s:
                    continue
                rows.append(y_dimension_constraints(r, u, s))
    return ObstructionTable(r, rows, symbolic_reduction(), out_of_hypothesis=r < 2)


@dataclass(frozen=True, eq=False)
class ApproximationCandidate:
    """0 -> Y -> X -> k -> 0 with X certified and its decomposition shape declared."""

    X: GradedModule
    X_cert: GdimCertificate
    pi: ModuleMap
    u: int
    s: tuple
    iota: ModuleMap | None = None


@dataclass
class AuditReport:
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None

    @property
    def survives(self) -> bool:
        return not self.failures


def candidate_audit(c: ApproximationCandidate, battery, x: Element) -> AuditReport:
    """Check a candidate approximation of k against the conditions a real one must meet.

    ``battery`` is a list of certified modules X'; the candidate must have
    Ext^1(X', Y) = 0 for each.  Failures are listed in the order: Ext^1
    battery, declared shape versus dimensions, x-exactness of Y.
    """
    X, R = c.X, c.X.ring
    k = residue_field(R)
    if X.is_zero():
        raise InputError("X = 0 cannot map onto k")
    if not c.X_cert.exact or not c.X_cert.module.same_as(X):
        raise InputError("X needs an exact G-dimension zero certificate")
    if not c.pi.source.same_as(X) or c.pi.target.dims != k.dims or c.pi.target.base_degree != 0:
        raise InputError("pi must map X to k")
    if not c.pi.is_homomorphism() or not c.pi.is_surjective():
        raise InputError("pi is not a surjective homomorphism onto k")
    if c.iota is None:
        Y, iota = kernel_module(c.pi)
    else:
        Y, iota = c.iota.source, c.iota
        bad = short_exact_failures(iota, c.pi)
        if bad:
            raise InputError("candidate sequence is not exact: " + "; ".join(bad))
    rep = AuditReport()
    for idx, cert in enumerate(battery):
        if not wakamatsu_check(cert.module, Y):
            rep.failures.append(f"ext1:battery[{idx}]")
    r = R.dim2
    con = y_dimension_constraints(r, c.u, c.s)
    X_expected = (con.dims[0] + 1, con.dims[1], con.dims[2])
    X_dims = tuple(X.piece(d) for d in range(3))
    Y_dims = tuple(Y.piece(d) for d in range(3))
    if X_dims != X_expected:
        rep.failures.append("declared-shape")
    if not con.satisfied:
        rep.failures.append("dimension-equation")
    bad = x_exactness_failures(Y, x)
    if bad:
        rep.failures.append(f"x-exactness:degree {bad[0]}")
    rep.details = {
        "X_dims": list(X_dims),
        "Y_dims": list(Y_dims),
        "Y_expected": list(con.dims),
        "margin": con.margin,
        "battery_size": len(battery),
    }
    return rep


def projection_to_k(X: GradedModule, generator_index: int | None = None) -> ModuleMap:
    """X -> k sending every degree-0 generator (or one chosen generator) to 1."""
    k = residue_field(X.ring)
    n0 = X.piece(0)
    if n0 == 0:
        raise InputError("X has nothing in degree 0 to map onto k")
    row = np.ones((1, n0), dtype=np.int64) if generator_index is None else np.eye(n0, dtype=np.int64)[[generator_index]]
    blocks = {d: (row if d == 0 else np.zeros((0, X.piece(d)), dtype=np.int64)) for d in X.degrees()}
    return ModuleMap(X, k, blocks)
