"""``gdimlab`` command line.

Objects live in a session directory (``--out``, overridden by GDIMLAB_OUT):
rings are stored under their content hash, modules and certificates under
names.  Exit codes: 0 when every check passes, 1 when a mathematical check
fails (a witness is written to ``witness.json``), 2 for bad input.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import exactla as la
from .algebra import (
    build_circulant_ring,
    build_quadratic_quotient,
    find_minimal_reduction,
    hilbert_coeffs,
    is_good_shape,
    parse_linear,
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
    FamilySpec,
    certified_quotient,
    cyclic_certificate,
    default_z,
    endomorphism_algebra,
    family_module,
    is_local,
    pairwise_noniso_sweep,
    sample_family_points,
    sample_matrix_factorization,
)
from .errors import GdimlabError, InputError, SchemaError
from .gdim import (
    check_gdim_zero_bounded,
    direct_sum_certificate,
    free_certificate,
    verify_periodic_cr,
    verify_theorem31,
)
from .gmodule import (
    free_module,
    matlis_dual_ring,
    minimal_generators,
    minimal_resolution,
    module_from_json,
    residue_field,
    ring_module,
)
from .gmodule import coker as coker_module
from .homology import bass_numbers, expected_bass, expected_koszul_betti, ext, koszul_check
from .presets import PRESETS, make_preset, run_preset, write_reports
from .serialize import SessionStore, certificate_from_json, dumps, presentation_from_json, ring_from_json

EXIT_OK, EXIT_MATH, EXIT_INPUT = 0, 1, 2


class MathFailure(Exception):
    """A check ran to completion and came out false."""

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


@dataclass
class Session:
    p: int
    seed: int | None
    n: int | None
    out: Path

    @property
    def store(self) -> SessionStore:
        return SessionStore(self.out)

    def seed_or(self, default: int = 0) -> int:
        return default if self.seed is None else self.seed

    @property
    def depth(self) -> int:
        return 8 if self.n is None else self.n


def _emit(doc: dict) -> None:
    click.echo(dumps(doc))


def _int_list(text: str | None) -> tuple | None:
    if text is None:
        return None
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from exc


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def _ring_summary(R, content_hash: str) -> dict:
    return {
        "ring": content_hash,
        "p": R.p,
        "names": list(R.names),
        "hilbert": list(hilbert_coeffs(R)),
        "good_shape": is_good_shape(R),
        "socle_dim": socle(R).dim,
    }


def _module_summary(name: str, M) -> dict:
    b, _ = minimal_generators(M)
    return {"module": name, "ring": M.ring.content_hash(), "base_degree": M.base_degree, "hilbert": list(M.dims),
            "generators": b, "hash": M.content_hash()}


def _ring_arg(sess: Session, ring: str | None):
    if ring is None:
        raise InputError("--ring HASH is required (create one with `gdimlab ring`)")
    return sess.store.get_ring(ring)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--p", "p", type=int, default=la.DEFAULT_P, show_default=True, help="prime field size")
@click.option("--seed", type=int, default=None, help="random seed [default: 0, presets use their own]")
@click.option("--n", "depth", type=int, default=None, help="resolution depth [default: 8, presets use their own]")
@click.option("--out", type=click.Path(file_okay=False), default="gdimlab-out", show_default=True,
              help="session directory (GDIMLAB_OUT overrides)")
@click.pass_context
def cli(ctx, p, seed, depth, out):
    """Exact computations with graded rings R = R0 + R1 + R2 and their modules."""
    la.PrimeField(p)
    if depth is not None and depth < 0:
        raise InputError("--n must be nonnegative")
    ctx.obj = Session(p, seed, depth, Path(os.environ.get("GDIMLAB_OUT") or out))


# ---------------------------------------------------------------------------
# rings and modules
# ---------------------------------------------------------------------------

@cli.command()
@click.argument("kind", type=click.Choice(["circulant", "quotient", "reduction", "veliche", "trivial", "quadrics",
                                           "json"]))
@click.option("--r", "r", type=int, default=2, show_default=True)
@click.option("--vars", "names", default=None, help="comma-separated variable names for `quadrics`")
@click.option("--rel", "rels", multiple=True, help="quadric relation, e.g. 'x*y - z^2' (repeatable)")
@click.option("--file", "path", default=None, help="ring JSON for `json`")
@click.option("--export", "export", default=None, help="also write the ring JSON here")
@click.pass_obj
def ring(sess: Session, kind, r, names, rels, path, export):
    """Build a ring and store it under its content hash.

    circulant: the 2-minors ring of type r.  quotient: circulant modulo a
    certified random quadric.  reduction: circulant modulo x^2 for a minimal
    reduction x.  trivial: k[x_1..x_r]/m^2.
    """
    seed = sess.seed_or()
    if kind == "circulant":
        R = build_circulant_ring(r, sess.p)
    elif kind == "quotient":
        R = certified_quotient(build_circulant_ring(r, sess.p), seed)[0]
    elif kind == "reduction":
        S = build_circulant_ring(r, sess.p)
        R = build_R_from_reduction(S, find_minimal_reduction(S, seed))
    elif kind == "veliche":
        R = veliche_ring(sess.p)
    elif kind == "trivial":
        R = trivial_square_ring(r, sess.p)
    elif kind == "quadrics":
        if not names:
            raise InputError("--vars is required for `quadrics`")
        var = [v.strip() for v in names.split(",") if v.strip()]
        R = build_quadratic_quotient(len(var), list(rels), sess.p, var)
    else:
        if path is None:
            raise InputError("--file is required for `json`")
        R = ring_from_json(_load_json(path))
    h = sess.store.put_ring(R)
    if export:
        Path(export).write_text(dumps(R.to_json()) + "\n")
    _emit(_ring_summary(R, h))


@cli.command()
@click.argument("kind", type=click.Choice(["residue", "ring", "free", "matlis", "cyclic", "presentation", "json"]))
@click.option("--ring", "ring_hash", default=None, help="ring content hash")
@click.option("--name", required=True, help="store the module under this name")
@click.option("--shifts", default="0", show_default=True, help="generator degrees for `free`")
@click.option("--x", "x_text", default=None, help="linear form for `cyclic` (default: a seeded minimal reduction)")
@click.option("--file", "path", default=None, help="JSON for `presentation` or `json`")
@click.pass_obj
def module(sess: Session, kind, ring_hash, name, shifts, x_text, path):
    """Build a module over a stored ring."""
    R = _ring_arg(sess, ring_hash)
    if kind == "residue":
        M = residue_field(R)
    elif kind == "ring":
        M = ring_module(R)
    elif kind == "free":
        M = free_module(R, _int_list(shifts))
    elif kind == "matlis":
        M = matlis_dual_ring(R)
    elif kind == "cyclic":
        x = parse_linear(x_text, R) if x_text else find_minimal_reduction(R, sess.seed_or())
        cert, M = cyclic_certificate(R, x)
        sess.store.put_certificate(name, cert)
    elif kind == "presentation":
        if path is None:
            raise InputError("--file is required")
        M = coker_module(presentation_from_json(_load_json(path), R))
    else:
        if path is None:
            raise InputError("--file is required")
        M = module_from_json(_load_json(path), R)
    sess.store.put_module(name, M)
    _emit(_module_summary(name, M))


# ---------------------------------------------------------------------------
# homological invariants
# ---------------------------------------------------------------------------

@cli.command()
@click.argument("name")
@click.pass_obj
def resolve(sess: Session, name):
    """Minimal graded free resolution of a stored module up to --n."""
    M = sess.store.get_module(name)
    res = minimal_resolution(M, sess.depth)
    rows = res.betti.rows()
    doc = {"module": name, "steps": sess.depth, "totals": res.betti.totals(sess.depth), "table": rows,
           "exact": res.check_exact()}
    sess.store.put_report(f"resolve-{name}", doc)
    _emit(doc)
    if not doc["exact"]:
        raise MathFailure("resolution is not exact", {"module": M.to_json()})


@cli.command("ext")
@click.argument("name")
@click.option("--target", default=None, help="stored module name (default: the ring itself)")
@click.pass_obj
def ext_cmd(sess: Session, name, target):
    """Graded dimensions of Ext^i(M, N) for 0 <= i <= --n."""
    M = sess.store.get_module(name)
    N = ring_module(M.ring) if target is None else sess.store.get_module(target)
    rep = ext(M, N, sess.depth)
    doc = {"module": name, "target": target or "R", "totals": rep.totals(),
           "graded": {f"{i},{j}": v for (i, j), v in sorted(rep.dims.items()) if v}}
    sess.store.put_report(f"ext-{name}-{target or 'R'}", doc)
    _emit(doc)


@cli.command()
@click.option("--ring", "ring_hash", required=True)
@click.option("--method", type=click.Choice(["matlis", "ext"]), default="matlis", show_default=True)
@click.pass_obj
def bass(sess: Session, ring_hash, method):
    """Bass numbers dim Ext^i(k, R) for i <= --n, compared with (r - t)/(1 - rt)."""
    R = _ring_arg(sess, ring_hash)
    mu = bass_numbers(R, sess.depth, method)
    doc = {"ring": ring_hash, "bass": mu}
    if is_good_shape(R):
        doc["expected"] = expected_bass(R.dim2, sess.depth)
        doc["ok"] = mu == doc["expected"]
    sess.store.put_report(f"bass-{ring_hash}", doc)
    _emit(doc)
    if doc.get("ok") is False:
        raise MathFailure("Bass numbers differ from (r - t)/(1 - rt)", doc)


@cli.command()
@click.option("--ring", "ring_hash", required=True)
@click.pass_obj
def koszul(sess: Session, ring_hash):
    """Resolve k to --n and test linearity; compares with (r^{i+1} - 1)/(r - 1) in the good case."""
    R = _ring_arg(sess, ring_hash)
    ok, table = koszul_check(R, sess.depth)
    doc = {"ring": ring_hash, "linear": ok, "diagonal": table.diagonal(sess.depth), "off_diagonal": {f"{i},{j}": v for (i, j), v in sorted(table.off_diagonal().items())}}
    if is_good_shape(R):
        doc["expected"] = expected_koszul_betti(R.dim2, sess.depth)
        ok = ok and doc["diagonal"] == doc["expected"]
    doc["ok"] = ok
    sess.store.put_report(f"koszul-{ring_hash}", doc)
    _emit(doc)
    if not ok:
        raise MathFailure("the residue field does not have the expected linear resolution", doc)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def _matrix_from_json(R, path: str):
    doc = _load_json(path)
    rows = doc["matrix"] if isinstance(doc, dict) else doc
    if not isinstance(rows, list) or not rows:
        raise SchemaError("matrix file must hold a nonempty list of rows")
    return [[parse_linear(e, R) if isinstance(e, str) else R.element(1, e) for e in row] for row in rows]


@cli.command()
@click.option("--ring", "ring_hash", default=None)
@click.option("--matrix", "matrix_path", default=None, help="JSON rows of linear forms (strings or coordinates)")
@click.option("--partner", "partner_path", default=None, help="second matrix for a two-periodic complex")
@click.option("--name", default=None, help="store the certificate and module under this name")
@click.option("--load", "load_path", default=None, help="re-verify a certificate JSON file instead")
@click.pass_obj
def certify(sess: Session, ring_hash, matrix_path, partner_path, name, load_path):
    """Verify a periodic complete resolution, or re-verify a saved certificate."""
    if load_path:
        doc = _load_json(load_path)
        R = sess.store.get_ring(doc.get("module", {}).get("ring", ""))
        cert = certificate_from_json(doc, R)
        if name:
            sess.store.put_certificate(name, cert)
        _emit({"certificate": cert.kind, "verified": True, "module_hilbert": list(cert.module.dims)})
        return
    if matrix_path is None:
        raise InputError("give --matrix (and optionally --partner) or --load")
    R = _ring_arg(sess, ring_hash)
    d1 = _matrix_from_json(R, matrix_path)
    d2 = _matrix_from_json(R, partner_path) if partner_path else None
    cert, M = verify_periodic_cr(R, d1, d2)
    if name:
        sess.store.put_certificate(name, cert)
        sess.store.put_module(name, M)
    _emit({"certificate": cert.kind, "verified": True, "module_hilbert": list(M.dims), "name": name})


@cli.command()
@click.argument("name")
@click.option("--structure", is_flag=True, help="also check the shape conclusions using the stored certificate")
@click.pass_obj
def check(sess: Session, name, structure):
    """Bounded G-dimension zero check (reflexive, Ext vanishing up to --n) for a stored module."""
    M = sess.store.get_module(name)
    cert = check_gdim_zero_bounded(M, sess.depth)
    doc = {"module": name, "passed": cert.passed, **{k: v for k, v in cert.payload.items()}}
    if structure:
        exact = sess.store.get_certificate(name)
        rep = verify_theorem31(M.ring, M, exact, N=min(sess.depth, 6))
        doc["structure"] = rep.as_dict()
        doc["passed"] = doc["passed"] and rep.all_ok
    sess.store.put_report(f"check-{name}", doc)
    _emit(doc)
    if not doc["passed"]:
        raise MathFailure(f"{name} fails the check", {"module": M.to_json(), "report": doc})


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

@cli.command()
@click.option("--r", "r", type=int, default=2, show_default=True)
@click.option("--terms", type=int, default=2, show_default=True, help="number of pairs (x_i, y_i)")
@click.option("--name", default=None)
@click.pass_obj
def mf(sess: Session, r, terms, name):
    """Exterior-algebra matrix factorization of a random f = sum x_i y_i over the circulant ring.

    Pairs are resampled until the periodic certificate passes, which also
    shows that f is a non-zero-divisor.
    """
    S = build_circulant_ring(r, sess.p)
    _, R, M, cert = sample_matrix_factorization(S, terms, sess.seed_or())
    name = name or f"mf-r{r}-n{terms}"
    sess.store.put_module(name, M)
    sess.store.put_certificate(name, cert)
    _emit({**_module_summary(name, M), "certificate": cert.kind, "normalized": list(M.normalized().dims),
           "expected": [2 ** terms, 2 ** terms * r]})


@cli.command()
@click.option("--r", "r", type=int, default=2, show_default=True)
@click.option("--n-gens", "n", type=int, default=2, show_default=True, help="size of the presentation matrix")
@click.option("--x", "x_text", default=None, help="linear form for the diagonal")
@click.option("--z", "z_text", default=None, help="linear form for the superdiagonal")
@click.option("--name", default=None)
@click.pass_obj
def family(sess: Session, r, n, x_text, z_text, name):
    """coker(x I + z J) over a certified quotient of the circulant ring, with its filtration certificate."""
    R, _, base = certified_quotient(build_circulant_ring(r, sess.p), sess.seed_or())
    x = parse_linear(x_text, R) if x_text else R.element(1, base.payload["d1"][0][0])
    z = parse_linear(z_text, R) if z_text else default_z(R, x)
    M, cert = family_module(R, FamilySpec(x, z, n))
    name = name or f"family-r{r}-n{n}"
    sess.store.put_module(name, M)
    sess.store.put_certificate(name, cert)
    L = endomorphism_algebra(M)
    _emit({**_module_summary(name, M), "certificate": cert.kind, "endo_dim": L.dim, "local": is_local(L),
           "x": x.coords.tolist(), "z": z.coords.tolist()})


@cli.command()
@click.option("--r", "r", type=int, default=2, show_default=True)
@click.option("--count", type=int, default=5, show_default=True)
@click.option("--nmax", type=int, default=3, show_default=True)
@click.pass_obj
def sweep(sess: Session, r, count, nmax):
    """Pairwise non-isomorphism of the family over sampled points x and n <= nmax."""
    R, _, base = certified_quotient(build_circulant_ring(r, sess.p), sess.seed_or())
    z = default_z(R, R.element(1, base.payload["d1"][0][0]))
    xs = sample_family_points(R, z, count, sess.seed_or())
    rep = pairwise_noniso_sweep(R, xs, range(1, nmax + 1), z)
    doc = {
        "modules": [{"x": xs[m["x_index"]].coords.tolist(), "n": m["n"], "generators": m["generators"],
                     "fitting_dim": m["fitting"].dim, "certificate": m["certificate"].kind} for m in rep.members],
        "pairs": len(rep.rows),
        "undistinguished": [[row.i, row.j, row.witness] for row in rep.rows if not row.distinguished],
        "ok": rep.all_distinguished and not rep.duplicates,
    }
    sess.store.put_report(f"sweep-r{r}", doc)
    _emit(doc)
    if not doc["ok"]:
        raise MathFailure("two family members could not be told apart", doc)


@cli.command()
@click.option("--r", "r_values", default="2,3,4,5,6", show_default=True)
@click.option("--bound", type=int, default=3, show_default=True, help="bound on u, on each s_j, and on len(s)")
@click.pass_obj
def obstruction(sess: Session, r_values, bound):
    """Enumerate approximation shapes (u, s) and test the exactness equation on Y."""
    doc = {"rows": []}
    ok = True
    for r in _int_list(r_values):
        t = obstruction_unsatisfiable(r, bound, bound, bound)
        sat = [[row.u, list(row.s)] for row in t.satisfiable]
        ok = ok and not sat and t.margins_match
        doc["rows"].append({"r": r, "instances": len(t.rows), "satisfiable": sat, "margins_match": t.margins_match,
                            "out_of_hypothesis": t.out_of_hypothesis})
        doc["symbolic"] = t.symbolic
    doc["ok"] = ok
    sess.store.put_report("obstruction", doc)
    _emit(doc)
    if not ok:
        raise MathFailure("some shape satisfies the exactness equation", doc)


@cli.command()
@click.option("--r", "r", type=int, default=2, show_default=True)
@click.option("--cert", "cert_name", default=None, help="stored certificate of a candidate X over R = S/x^2 S")
@click.option("--u", "u", type=int, default=None, help="declared number of free summands of X")
@click.option("--s", "s", default="", help="declared generator counts of the nonfree summands")
@click.pass_obj
def audit(sess: Session, r, cert_name, u, s):
    """Audit candidate approximations X -> k over R = S/x^2 S (exit 0 when none survives)."""
    S = build_circulant_ring(r, sess.p)
    x = find_minimal_reduction(S, sess.seed_or())
    R = build_R_from_reduction(S, x)
    xr = R.element(1, x.coords)
    cyc, _ = cyclic_certificate(R, xr)
    free = free_certificate(ring_module(R))
    battery = [cyc, free]
    cands = {}
    if cert_name:
        cert = sess.store.get_certificate(cert_name)
        if cert.module.ring.content_hash() != R.content_hash():
            raise InputError("the certificate lives over a different ring; build it over `ring reduction`")
        if u is None:
            raise InputError("--u is required with --cert")
        cands[cert_name] = ApproximationCandidate(cert.module, cert, projection_to_k(cert.module), u, _int_list(s))
    else:
        summed = direct_sum_certificate(cyc, free)
        cands["R"] = ApproximationCandidate(free.module, free, projection_to_k(free.module), 1, ())
        cands["R/xR + R"] = ApproximationCandidate(summed.module, summed, projection_to_k(summed.module), 1, (1,))
    doc = {"ring": R.content_hash(), "audits": []}
    for label, c in cands.items():
        a = candidate_audit(c, battery, xr)
        doc["audits"].append({"candidate": label, "failures": a.failures, **a.details})
    doc["ok"] = all(a["failures"] for a in doc["audits"])
    sess.store.put_ring(R)
    sess.store.put_report(f"audit-r{r}", doc)
    _emit(doc)
    if not doc["ok"]:
        raise MathFailure("a candidate passed every audit", doc)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

@cli.command()
@click.argument("name", type=click.Choice(PRESETS))
@click.option("--r", "r_values", default=None, help="comma-separated r values")
@click.option("--nmax", type=int, default=None, help="largest n (n ranges over 1..nmax)")
@click.option("--count", type=int, default=None)
@click.option("--samples", type=int, default=None)
@click.option("--bound", type=int, default=None)
@click.option("--save-certificates", is_flag=True, help="store every certificate in the session")
@click.pass_obj
def preset(sess: Session, name, r_values, nmax, count, samples, bound, save_certificates):
    """Run an experiment preset and write <name>.json and <name>.csv to the session directory."""
    cfg = make_preset(
        name,
        r_values=_int_list(r_values),
        n_values=None if nmax is None else tuple(range(1, nmax + 1)),
        count=count,
        samples=samples,
        bound=bound,
        seed=sess.seed,
        p=sess.p,
        N=sess.n,
    )
    rep = run_preset(cfg, sess.store if save_certificates else None)
    jpath, cpath = write_reports(rep, sess.out)
    click.echo(f"{name}: {len(rep.checks) - sum(not c.ok for c in rep.checks)}/{len(rep.checks)} checks passed")
    click.echo(f"reports: {jpath} {cpath}")
    if not rep.ok:
        raise MathFailure(f"{name}: {rep.first_failure['group']}: {rep.first_failure['check']}", rep.first_failure)


def _write_witness(out: Path, exc: MathFailure) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / "witness.json"
    path.write_text(dumps({"schema": 1, "kind": "witness", "message": str(exc), "witness": exc.witness}) + "\n")
    return path


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="gdimlab", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    except MathFailure as exc:
        out = Path(os.environ.get("GDIMLAB_OUT") or _out_from_argv(argv))
        path = _write_witness(out, exc)
        click.echo(f"check failed: {exc} (witness: {path})", err=True)
        return EXIT_MATH
    except GdimlabError as exc:
        failure = MathFailure(f"{type(exc).__name__}: {exc}")
        path = _write_witness(Path(os.environ.get("GDIMLAB_OUT") or _out_from_argv(argv)), failure)
        click.echo(f"check failed: {failure} (witness: {path})", err=True)
        return EXIT_MATH
    return EXIT_OK


def _out_from_argv(argv) -> str:
    args = list(sys.argv[1:] if argv is None else argv)
    for i, a in enumerate(args):
        if a == "--out" and i + 1 < len(args):
            return args[i + 1]
        if a.startswith("--out="):
            return a.split("=", 1)[1]
    return "gdimlab-out"


if __name__ == "__main__":
    sys.exit(main())
