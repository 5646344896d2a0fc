"""Experiment presets: each one rebuilds a family of rings and modules and
re-checks the corresponding structural statements, producing a report.

Reports are deterministic given the preset parameters.  The only varying
content is the timestamp on the first line of the CSV file.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import exactla as la
from .algebra import (
    build_circulant_ring,
    degree_two_part,
    find_minimal_reduction,
    hilbert_coeffs,
    socle,
    trivial_square_ring,
    veliche_ring,
)
from .approximation import (
    ApproximationCandidate,
    build_R_from_reduction,
    candidate_audit,
    obstruction_unsatisfiable,
    projection_to_k,
)
from .constructions import (
    cyclic_certificate,
    default_z,
    endomorphism_algebra,
    certified_quotient,
    pairwise_noniso_sweep,
    sample_family_points,
    sample_matrix_factorization,
)
from .errors import CertificateRejected, ConstructionError, InputError, SearchExhausted
from .gdim import (
    FILTRATION,
    check_gdim_zero_bounded,
    direct_sum_certificate,
    free_certificate,
    linear_module_checks,
    verify_certificate,
    verify_periodic_cr,
    verify_theorem31,
)
from .gmodule import Presentation, coker, is_free, minimal_generators, residue_field, ring_module
from .homology import bidual_check, ext, expected_bass, expected_koszul_betti
from .serialize import SCHEMA, SessionStore, dumps

PRESETS = ("thm31", "thm42", "thm51", "thm61", "negcontrols")

# desk-scale limits
MAX_R = 6
MAX_N_TERMS = 5
MAX_DEPTH = 8
MAX_COUNT = 10
MAX_SAMPLES = 200


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    r_values: tuple = ()
    p: int = la.DEFAULT_P
    seed: int = 0
    n_values: tuple = ()
    N: int = 6
    count: int = 5
    samples: int = 50
    bound: int = 3

    def validate(self) -> "ExperimentPreset":
        if self.name not in PRESETS:
            raise InputError(f"unknown preset {self.name!r}; choose from {', '.join(PRESETS)}")
        la.PrimeField(self.p)
        for r in self.r_values:
            if r < 2:
                raise InputError(f"r = {r}: the ring must be non-Gorenstein, which needs r >= 2")
            if r > MAX_R:
                raise InputError(f"r = {r} exceeds the desk-scale limit {MAX_R}")
        for n in self.n_values:
            if not 1 <= n <= MAX_N_TERMS:
                raise InputError(f"n = {n} outside 1..{MAX_N_TERMS}")
        if not 1 <= self.N <= MAX_DEPTH:
            raise InputError(f"resolution depth {self.N} outside 1..{MAX_DEPTH}")
        if not 1 <= self.count <= MAX_COUNT:
            raise InputError(f"count {self.count} outside 1..{MAX_COUNT}")
        if not 1 <= self.samples <= MAX_SAMPLES:
            raise InputError(f"samples {self.samples} outside 1..{MAX_SAMPLES}")
        if not 1 <= self.bound <= 5:
            raise InputError("enumeration bound must lie in 1..5")
        return self


DEFAULTS = {
    "thm31": ExperimentPreset("thm31", r_values=(2, 3), N=6),
    "thm42": ExperimentPreset("thm42", r_values=(2, 3, 4), n_values=(1, 2, 3), N=6),
    "thm51": ExperimentPreset("thm51", r_values=(2,), n_values=(1, 2, 3), count=5, seed=42, N=6),
    "thm61": ExperimentPreset("thm61", r_values=(2, 3, 4, 5, 6), bound=3),
    "negcontrols": ExperimentPreset("negcontrols", N=4, samples=50),
}


def make_preset(name: str, **overrides) -> ExperimentPreset:
    if name not in DEFAULTS:
        raise InputError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    given = {k: v for k, v in overrides.items() if v is not None}
    for key in ("r_values", "n_values"):
        if key in given:
            given[key] = tuple(int(v) for v in given[key])
    return replace(DEFAULTS[name], **given).validate()


@dataclass
class Check:
    group: str
    name: str
    ok: bool
    value: object = None
    expected: object = None
    witness: dict | None = None


@dataclass
class PresetReport:
    preset: ExperimentPreset
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def add(self, group, name, ok, value=None, expected=None, witness=None) -> bool:
        self.checks.append(Check(group, name, bool(ok), value, expected, witness))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_failure(self) -> dict | None:
        for c in self.checks:
            if not c.ok:
                return {"group": c.group, "check": c.name, "value": c.value, "expected": c.expected,
                        "witness": c.witness}
        return None

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "report",
            "preset": self.preset.name,
            "params": asdict(self.preset),
            "ok": self.ok,
            "n_checks": len(self.checks),
            "n_failed": sum(not c.ok for c in self.checks),
            "first_failure": self.first_failure,
            "checks": [{k: v for k, v in asdict(c).items() if k != "witness"} for c in self.checks],
            "tables": self.tables,
        }

    def to_csv(self, timestamp: str) -> str:
        buf = io.StringIO()
        buf.write(f"# {self.preset.name} generated {timestamp}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["group", "check", "ok", "value", "expected"])
        for c in self.checks:
            w.writerow([c.group, c.name, "pass" if c.ok else "FAIL", _cell(c.value), _cell(c.expected)])
        return buf.getvalue()


def _cell(v) -> str:
    if v is None:
        return ""
    return v if isinstance(v, str) else json.dumps(v, sort_keys=True, default=int)


def write_reports(report: PresetReport, out_dir, timestamp: str | None = None) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stamp = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    jpath = out / f"{report.preset.name}.json"
    cpath = out / f"{report.preset.name}.csv"
    jpath.write_text(dumps(report.to_json()) + "\n")
    cpath.write_text(report.to_csv(stamp))
    return jpath, cpath


# ---------------------------------------------------------------------------
# Individual presets
# ---------------------------------------------------------------------------

def _ring_shape(rep: PresetReport, group: str, R, r: int) -> None:
    rep.add(group, "hilbert", hilbert_coeffs(R) == (1, r + 1, r), list(hilbert_coeffs(R)), [1, r + 1, r])
    rep.add(group, "socle = R2", socle(R) == degree_two_part(R), socle(R).dim, r)


def _linear_checks(rep: PresetReport, group: str, M, N: int) -> dict:
    lin = linear_module_checks(M, N)
    for flag, ok in lin["flags"].items():
        value = lin["numbers"]["betti_diagonal"] if flag == "linear_resolution_ok" else None
        rep.add(group, flag, ok, value, witness={"module": M.to_json()})
    return lin


def _run_thm31(cfg: ExperimentPreset, store: SessionStore | None) -> PresetReport:
    rep = PresetReport(cfg)
    rows = []
    for r in cfg.r_values:
        S = build_circulant_ring(r, cfg.p)
        R, _, cert = certified_quotient(S, cfg.seed)
        M = cert.module
        g = f"r={r}"
        t = verify_theorem31(R, M, cert, N=cfg.N)
        for flag in t.FLAGS:
            rep.add(g, flag, getattr(t, flag), witness={"module": M.to_json()})
        mu = t.numbers["bass"]
        rep.add(g, "bass numbers", mu == expected_bass(r, cfg.N), mu, expected_bass(r, cfg.N))
        rep.add(g, "mu_1 = r^2 - 1", len(mu) > 1 and mu[1] == r * r - 1, mu[1] if len(mu) > 1 else None, r * r - 1)
        kd = t.numbers["koszul_diagonal"]
        upto = min(5, cfg.N)
        rep.add(g, "Betti numbers of k", kd[: upto + 1] == expected_koszul_betti(r, upto), kd[: upto + 1],
                expected_koszul_betti(r, upto))
        rows.append({"r": r, **t.as_dict()})
        if store is not None:
            store.put_certificate(f"thm31-r{r}-cyclic", cert)
    rep.tables["structure"] = rows
    return rep


def _run_thm42(cfg: ExperimentPreset, store: SessionStore | None) -> PresetReport:
    rep = PresetReport(cfg)
    rows = []
    for r in cfg.r_values:
        S = build_circulant_ring(r, cfg.p)
        R, _, _ = certified_quotient(S, cfg.seed)
        _ring_shape(rep, f"ring r={r}", R, r)
        for n in cfg.n_values:
            g = f"mf r={r} n={n}"
            try:
                _, Rf, M, cert = sample_matrix_factorization(S, n, cfg.seed)
            except (SearchExhausted, ConstructionError, InputError) as exc:
                rep.add(g, "matrix factorization certificate", False, str(exc))
                continue
            rep.add(g, "phi^2 = psi^2 = 0, phi psi + psi phi = f", True)
            rep.add(g, "periodic certificate", verify_certificate(cert), cert.kind)
            _ring_shape(rep, g, Rf, r)
            hil = list(M.normalized().dims)
            rep.add(g, "Hilbert 2^n (1, r)", hil == [2 ** n, 2 ** n * r], hil, [2 ** n, 2 ** n * r])
            lin = _linear_checks(rep, g, M, cfg.N)
            rows.append({"r": r, "n_terms": n, "hilbert": hil, "certificate": cert.kind,
                         "betti_diagonal": lin["numbers"]["betti_diagonal"], "module_hash": M.content_hash()})
            if store is not None:
                store.put_certificate(f"thm42-mf-r{r}-n{n}", cert)
    # fixed four-variable example with a two-periodic certificate
    V = veliche_ring(cfg.p)
    g = "veliche"
    rep.add(g, "hilbert", hilbert_coeffs(V) == (1, 4, 3), list(hilbert_coeffs(V)), [1, 4, 3])
    e = {name: V.basis_element(1, i) for i, name in enumerate(V.names)}
    neg = lambda a: V.scale(-1, a)  # noqa: E731
    d1 = [[e["z"], e["x"]], [e["w"], e["y"]]]
    d2 = [[e["y"], neg(e["x"])], [neg(e["w"]), e["z"]]]
    try:
        cert, M = verify_periodic_cr(V, d1, d2, note="two-periodic, four variables")
        rep.add(g, "two-periodic certificate", verify_certificate(cert), cert.kind)
        _linear_checks(rep, g, M, cfg.N)
        rows.append({"r": 3, "n_terms": None, "hilbert": list(M.normalized().dims), "certificate": cert.kind,
                     "betti_diagonal": None, "module_hash": M.content_hash()})
        if store is not None:
            store.put_certificate("thm42-veliche", cert)
    except (CertificateRejected, InputError) as exc:
        rep.add(g, "two-periodic certificate", False, str(exc))
    rep.tables["modules"] = rows
    return rep


def _run_thm51(cfg: ExperimentPreset, store: SessionStore | None) -> PresetReport:
    rep = PresetReport(cfg)
    for r in cfg.r_values:
        S = build_circulant_ring(r, cfg.p)
        R, _, _ = certified_quotient(S, cfg.seed)
        _ring_shape(rep, f"ring r={r}", R, r)
        x0 = find_minimal_reduction(R, cfg.seed)
        z = default_z(R, x0)
        xs = sample_family_points(R, z, cfg.count, cfg.seed)
        sweep = pairwise_noniso_sweep(R, xs, cfg.n_values, z)
        rows = []
        for idx, m in enumerate(sweep.members):
            M, cert, n = m["module"], m["certificate"], m["n"]
            g = f"r={r} x{m['x_index']} n={n}"
            wit = {"module": M.to_json()}
            rep.add(g, "filtration certificate", cert.kind == FILTRATION and verify_certificate(cert), cert.kind,
                    FILTRATION, wit)
            rep.add(g, "minimal generators = n", m["generators"] == n, m["generators"], n, wit)
            L = endomorphism_algebra(M)
            rad = L.radical().dim
            rep.add(g, "endomorphism algebra local", L.dim - rad == 1, L.dim - rad, 1, wit)
            _linear_checks(rep, g, M, cfg.N)
            rows.append({
                "index": idx,
                "x_index": m["x_index"],
                "x": [int(v) for v in xs[m["x_index"]].coords],
                "n": n,
                "hilbert": list(M.normalized().dims),
                "generators": m["generators"],
                "certificate": cert.kind,
                "endo_dim": L.dim,
                "radical_dim": rad,
                "fitting_dim": m["fitting"].dim,
                "module_hash": M.content_hash(),
            })
            if store is not None:
                store.put_certificate(f"thm51-r{r}-x{m['x_index']}-n{n}", cert)
        g = f"sweep r={r}"
        rep.add(g, "distinct points", not sweep.duplicates, sweep.duplicates, [])
        bad = [(row.i, row.j) for row in sweep.rows if not row.distinguished]
        rep.add(g, "pairwise non-isomorphic", not bad, bad, [])
        rep.add(g, "module count", len(sweep.members) == cfg.count * len(cfg.n_values), len(sweep.members),
                cfg.count * len(cfg.n_values))
        witnesses = {}
        for row in sweep.rows:
            witnesses[row.witness] = witnesses.get(row.witness, 0) + 1
        rep.tables[f"modules r={r}"] = rows
        rep.tables[f"witnesses r={r}"] = dict(sorted(witnesses.items()))
    return rep


def _run_thm61(cfg: ExperimentPreset, store: SessionStore | None) -> PresetReport:
    rep = PresetReport(cfg)
    obstruction_rows, audit_rows = [], []
    for r in cfg.r_values:
        g = f"obstruction r={r}"
        table = obstruction_unsatisfiable(r, cfg.bound, cfg.bound, cfg.bound)
        sat = [[row.u, list(row.s)] for row in table.satisfiable]
        rep.add(g, "no shape satisfies the exactness equation", not sat, sat, [])
        rep.add(g, "margin = (r-1) sum(s) + 1", table.margins_match)
        rep.add(g, "u cancels", table.symbolic["u_cancels"], table.symbolic["reduced"])
        obstruction_rows.append({
            "r": r,
            "instances": len(table.rows),
            "satisfiable": len(sat),
            "min_margin": min(row.margin for row in table.rows),
            "reduced": table.symbolic["reduced"],
        })
    for r in cfg.r_values[:2]:
        g = f"audit r={r}"
        S = build_circulant_ring(r, cfg.p)
        x = find_minimal_reduction(S, cfg.seed)
        R = build_R_from_reduction(S, x)
        xr = R.element(1, x.coords)
        cyc, _ = cyclic_certificate(R, xr)
        free = free_certificate(ring_module(R))
        battery = [cyc, free]
        cands = {
            "R": ApproximationCandidate(free.module, free, projection_to_k(free.module), 1, ()),
        }
        summed = direct_sum_certificate(cyc, free)
        cands["R/xR + R"] = ApproximationCandidate(summed.module, summed, projection_to_k(summed.module), 1, (1,))
        for label, c in cands.items():
            audit = candidate_audit(c, battery, xr)
            rep.add(g, f"{label} is not an approximation", not audit.survives, audit.failures)
            audit_rows.append({"r": r, "candidate": label, "failures": audit.failures, **audit.details})
        rep.add(g, "R/x^2R has type (1, r+1, r)", hilbert_coeffs(R) == (1, r + 1, r), list(hilbert_coeffs(R)))
    rep.tables["obstruction"] = obstruction_rows
    rep.tables["audits"] = audit_rows
    return rep


def random_two_generated(R, rng, max_relations: int = 3):
    """coker of a random 2 x m matrix of linear forms, m >= 1, not the zero matrix."""
    while True:
        m = int(rng.integers(1, max_relations + 1))
        rows = [[R.element(1, rng.integers(0, R.p, R.dim1)) for _ in range(m)] for _ in range(2)]
        if any(not e.is_zero() for row in rows for e in row):
            return coker(Presentation.from_matrix(R, rows))


def _run_negcontrols(cfg: ExperimentPreset, store: SessionStore | None) -> PresetReport:
    rep = PresetReport(cfg)
    R = trivial_square_ring(2, cfg.p)
    k = residue_field(R)
    ok, _ = bidual_check(k)
    rep.add("residue field", "k is not reflexive", not ok)
    e1 = ext(k, ring_module(R), 1).total(1)
    rep.add("residue field", "Ext^1(k, R) != 0", e1 > 0, e1)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(cfg.samples):
        M = random_two_generated(R, rng)
        b, _ = minimal_generators(M)
        g = f"sample {i}"
        rep.add(g, "two generators, nonfree", b == 2 and not is_free(M), b, 2, {"module": M.to_json()})
        cert = check_gdim_zero_bounded(M, cfg.N)
        rep.add(g, "bounded check fails", not cert.passed, cert.payload["failures"], None, {"module": M.to_json()})
        rows.append({"sample": i, "hilbert": list(M.dims), "failures": cert.payload["failures"]})
    rep.tables["samples"] = rows
    return rep


RUNNERS = {
    "thm31": _run_thm31,
    "thm42": _run_thm42,
    "thm51": _run_thm51,
    "thm61": _run_thm61,
    "negcontrols": _run_negcontrols,
}


def run_preset(preset: ExperimentPreset, store: SessionStore | None = None) -> PresetReport:
    preset.validate()
    return RUNNERS[preset.name](preset, store)
