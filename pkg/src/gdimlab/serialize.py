"""JSON interchange for rings, modules, maps and certificates, plus the session store.

Every document carries ``"schema": 1``.  Modules name their ring by content
hash.  Certificates are re-verified on load, so stale or tampered evidence is
never trusted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import Element, GradedAlgebra, algebra_from_json
from .errors import CertificateRejected, SchemaError
from .gdim import BOUNDED, EXTENSION, FILTRATION, FREE, PERIODIC, GdimCertificate, verify_certificate
from .gmodule import GradedModule, ModuleMap, Presentation, module_from_json

SCHEMA = 1


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_default)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def map_to_json(f: ModuleMap) -> dict:
    return f.to_json()


def map_from_json(data: dict, source: GradedModule, target: GradedModule) -> ModuleMap:
    try:
        if data.get("schema") != SCHEMA or data.get("kind") != "map":
            raise SchemaError("not a schema-1 map document")
        blocks = {}
        for key, b in data["blocks"].items():
            d = int(key)
            arr = np.asarray(b, dtype=np.int64).reshape(target.piece(d + int(data["degree"])), source.piece(d))
            blocks[d] = arr
        f = ModuleMap(source, target, blocks, int(data["degree"]))
    except SchemaError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"invalid map JSON: {exc}") from exc
    if not f.is_homomorphism():
        raise SchemaError("map does not commute with the ring action")
    return f


def certificate_to_json(cert: GdimCertificate) -> dict:
    out = {"schema": SCHEMA, "kind": "certificate", "type": cert.kind, "module": cert.module.to_json(),
           "passed": cert.passed}
    pl = cert.payload
    if cert.kind == PERIODIC:
        out["payload"] = {"d1": pl["d1"], "d2": pl.get("d2"), "note": pl.get("note", "")}
    elif cert.kind == EXTENSION:
        out["payload"] = {
            "sub": certificate_to_json(pl["sub"]),
            "quotient": certificate_to_json(pl["quotient"]),
            "iota": map_to_json(pl["iota"]),
            "pi": map_to_json(pl["pi"]),
        }
    elif cert.kind == FILTRATION:
        out["payload"] = {"steps": [certificate_to_json(s) for s in pl["steps"]]}
    elif cert.kind == BOUNDED:
        out["payload"] = {k: pl[k] for k in ("N", "reflexive", "ext_M", "ext_dual", "failures", "label")}
    elif cert.kind == FREE:
        out["payload"] = {}
    else:
        raise SchemaError(f"unknown certificate kind {cert.kind!r}")
    return out


def _certificate_unverified(data: dict, ring: GradedAlgebra) -> GdimCertificate:
    try:
        if data.get("schema") != SCHEMA or data.get("kind") != "certificate":
            raise SchemaError("not a schema-1 certificate document")
        kind = data["type"]
        M = module_from_json(data["module"], ring)
        pl = data.get("payload", {})
        if kind == PERIODIC:
            payload = {"d1": pl["d1"], "d2": pl.get("d2"), "note": pl.get("note", "")}
        elif kind == EXTENSION:
            sub = _certificate_unverified(pl["sub"], ring)
            quo = _certificate_unverified(pl["quotient"], ring)
            payload = {
                "sub": sub,
                "quotient": quo,
                "iota": map_from_json(pl["iota"], sub.module, M),
                "pi": map_from_json(pl["pi"], M, quo.module),
            }
        elif kind == FILTRATION:
            payload = {"steps": [_certificate_unverified(s, ring) for s in pl["steps"]]}
        elif kind == BOUNDED:
            payload = dict(pl)
        elif kind == FREE:
            payload = {}
        else:
            raise SchemaError(f"unknown certificate kind {kind!r}")
        return GdimCertificate(kind, M, payload, bool(data.get("passed", True)))
    except SchemaError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise SchemaError(f"invalid certificate JSON: {exc}") from exc


def certificate_from_json(data: dict, ring: GradedAlgebra) -> GdimCertificate:
    """Load and re-verify; raises CertificateRejected when the evidence does not check out."""
    cert = _certificate_unverified(data, ring)
    if not verify_certificate(cert):
        raise CertificateRejected(f"{cert.kind} certificate failed re-verification")
    return cert


def presentation_to_json(pres: Presentation) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "presentation",
        "ring": pres.ring.content_hash(),
        "gens": list(pres.gens),
        "rel_degrees": list(pres.rel_degrees),
        "rels": [[None if e is None else e.coords.tolist() for e in row] for row in pres.rels],
    }


def presentation_from_json(data: dict, ring: GradedAlgebra) -> Presentation:
    """Entries are coordinate lists, null for zero, or strings in the ring's variable names."""
    from .algebra import parse_linear

    try:
        if data.get("schema") != SCHEMA or data.get("kind") != "presentation":
            raise SchemaError("not a schema-1 presentation document")
        if data.get("ring") not in (None, ring.content_hash()):
            raise SchemaError("presentation refers to a different ring")
        gens = tuple(int(g) for g in data.get("gens", [0] * len(data["rels"])))
        rows = data["rels"]
        ncols = len(rows[0]) if rows else 0
        rel_degrees = tuple(int(d) for d in data.get("rel_degrees", [gens[0] + 1 if gens else 1] * ncols))
        rels = []
        for i, row in enumerate(rows):
            out = []
            for j, e in enumerate(row):
                if e is None:
                    out.append(None)
                elif isinstance(e, str):
                    out.append(parse_linear(e, ring))
                else:
                    out.append(Element(rel_degrees[j] - gens[i], np.asarray(e, dtype=np.int64) % ring.p))
            rels.append(tuple(out))
        return Presentation(ring, gens, rel_degrees, tuple(rels))
    except SchemaError:
        raise
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise SchemaError(f"invalid presentation JSON: {exc}") from exc


def ring_to_json(R) -> dict:
    return R.to_json()


def ring_from_json(data: dict):
    return algebra_from_json(data)


@dataclass
class SessionStore:
    """A directory of named JSON artifacts: rings/, modules/, certificates/, reports/."""

    root: Path

    def __post_init__(self):
        self.root = Path(self.root)
        for sub in ("rings", "modules", "certificates", "reports"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    def _write(self, sub: str, name: str, doc: dict) -> Path:
        path = self.root / sub / f"{name}.json"
        path.write_text(dumps(doc) + "\n")
        return path

    def _read(self, sub: str, name: str) -> dict:
        path = self.root / sub / f"{name}.json"
        try:
            return json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise SchemaError(f"no {sub[:-1]} named {name!r} in {self.root}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path} is not valid JSON: {exc}") from exc

    def put_ring(self, R) -> str:
        h = R.content_hash()
        self._write("rings", h, R.to_json())
        return h

    def get_ring(self, content_hash: str):
        R = ring_from_json(self._read("rings", content_hash))
        if R.content_hash() != content_hash:
            raise SchemaError("ring file does not match its content hash")
        return R

    def put_module(self, name: str, M: GradedModule) -> Path:
        self.put_ring(M.ring)
        return self._write("modules", name, M.to_json())

    def get_module(self, name: str) -> GradedModule:
        doc = self._read("modules", name)
        return module_from_json(doc, self.get_ring(doc.get("ring", "")))

    def put_certificate(self, name: str, cert: GdimCertificate) -> Path:
        self.put_ring(cert.module.ring)
        return self._write("certificates", name, certificate_to_json(cert))

    def get_certificate(self, name: str) -> GdimCertificate:
        doc = self._read("certificates", name)
        ring = self.get_ring(doc.get("module", {}).get("ring", ""))
        return certificate_from_json(doc, ring)

    def certificates(self) -> list[GdimCertificate]:
        return [self.get_certificate(p.stem) for p in sorted((self.root / "certificates").glob("*.json"))]

    def put_report(self, name: str, doc: dict) -> Path:
        return self._write("reports", name, doc)
