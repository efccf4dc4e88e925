"""JSON documents: bases in, certificates and reports out.

Exact values are written as ``"num/den"`` strings so that certificates can be
re-checked by independent tools without loss of precision.
"""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from .certifier import FeasibilityCertificate, pattern_str
from .families import FamilySpec
from .operator_core import BlochVector, HermitianOp, InvalidStateError, QuditBasis, basis_from_bloch, density_to_bloch
from .quasirep import QuasiRep, q_function

VERSION = 1


class DocumentError(ValueError):
    """Malformed or invalid input document."""


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_number(value: Any):
    """JSON number or ``"num/den"`` string; integers and strings stay exact."""
    if isinstance(value, bool):
        raise DocumentError(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DocumentError(f"non-finite number {value!r}")
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"cannot parse {value!r} as a rational") from exc
    raise DocumentError(f"expected a number, got {type(value).__name__}")


def canonical_hash(data: Any) -> str:
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _parse_vectors(entry, dim: int) -> QuditBasis:
    vecs = entry.get("vectors")
    if not isinstance(vecs, list) or len(vecs) != dim:
        raise DocumentError(f"'vectors' must list {dim} vectors")
    rows = []
    for v in vecs:
        if not isinstance(v, list) or len(v) != dim:
            raise DocumentError(f"each vector needs {dim} components")
        comps = []
        for c in v:
            if not isinstance(c, dict) or set(c) - {"re", "im"}:
                raise DocumentError("vector components are {re, im} objects")
            comps.append(float(parse_number(c.get("re", 0))) + 1j * float(parse_number(c.get("im", 0))))
        rows.append(comps)
    try:
        return QuditBasis.from_vectors(np.array(rows, dtype=complex))
    except (InvalidStateError, ValueError) as exc:
        raise DocumentError(f"invalid basis: {exc}") from exc


def load_bases(data: Any) -> tuple[int, list]:
    """Validate a bases document; qubit entries become QubitBasis objects.

    Raises
    ------
    DocumentError
        On any structural or physical problem (non-unit Bloch vector,
        non-orthonormal vectors, wrong dimension).
    """
    if not isinstance(data, dict):
        raise DocumentError("top level must be an object")
    if data.get("version", VERSION) != VERSION:
        raise DocumentError(f"unsupported version {data.get('version')!r}")
    dim = data.get("dim", 2)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise DocumentError("'dim' must be an integer >= 2")
    bases = data.get("bases")
    if not isinstance(bases, list) or not bases:
        raise DocumentError("'bases' must be a non-empty list")
    out = []
    for k, entry in enumerate(bases):
        if not isinstance(entry, dict):
            raise DocumentError(f"basis {k} must be an object")
        if "bloch" in entry:
            if dim != 2:
                raise DocumentError("'bloch' entries need dim = 2")
            comps = entry["bloch"]
            if not isinstance(comps, list) or len(comps) != 3:
                raise DocumentError(f"basis {k}: 'bloch' needs three components")
            try:
                out.append(basis_from_bloch(BlochVector([parse_number(c) for c in comps])))
            except InvalidStateError as exc:
                raise DocumentError(f"basis {k}: {exc}") from exc
        elif "vectors" in entry:
            basis = _parse_vectors(entry, dim)
            if dim == 2:
                r = density_to_bloch(HermitianOp(basis.elements[0].to_numpy()))
                out.append(basis_from_bloch(BlochVector(r.as_array() / r.norm())))
            else:
                out.append(basis)
        else:
            raise DocumentError(f"basis {k} needs 'bloch' or 'vectors'")
    return dim, out


def bases_document(bases, dim: int = 2, **extra) -> dict:
    entries = []
    for b in bases:
        comps = b.direction.components
        entries.append({"bloch": [fraction_str(c) if isinstance(c, Fraction) else c for c in comps]})
    return {"version": VERSION, "dim": dim, **extra, "bases": entries}


def _value(x, exact: bool):
    return fraction_str(x) if exact else float(x)


def certificate_document(cert: FeasibilityCertificate, input_hash: str) -> dict:
    exact = cert.exact
    doc = {"version": VERSION, "mode": cert.mode, "verdict": cert.verdict, "input_sha256": input_hash,
           "n_bases": cert.problem.n_bases}
    if cert.feasible:
        doc["witness"] = {"type": "q", "values": {pattern_str(s): _value(v, exact) for s, v in cert.q.items()}}
        res = cert.residuals()
        doc["residuals"] = {"rows": {k: _value(v, exact) for k, v in res["rows"].items()},
                            "min_q": _value(res["min_q"], exact)}
    else:
        doc["witness"] = {"type": "farkas", "values": {k: _value(v, exact) for k, v in cert.farkas.items()}}
        res = cert.residuals()
        doc["residuals"] = {"max_yA": _value(res["max_yA"], exact), "yb": _value(res["yb"], exact)}
    doc["verified"] = bool(cert.verify())
    doc["frame_check"] = cert.frame_check
    doc["symmetrized"] = bool(cert.symmetrized)
    doc["rhs_shift"] = float(cert.rhs_shift)
    return doc


def read_witness(doc: dict) -> dict:
    """Witness values of a certificate document, as Fractions in exact mode."""
    exact = doc["mode"] == "exact"
    return {k: Fraction(v) if exact else float(v) for k, v in doc["witness"]["values"].items()}


def _complex_matrix(m: np.ndarray) -> list:
    return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in m]


def family_document(spec: FamilySpec, bases, rep: QuasiRep | None = None) -> dict:
    doc = bases_document(bases, family={"kind": spec.kind, "theta": spec.theta, "phi": spec.phi, "q0": spec.q0})
    if rep is not None:
        q = q_function(rep)
        doc["frame"] = [{"point": list(lam) if isinstance(lam, tuple) else lam, "q": float(q[lam]),
                         "F": _complex_matrix(rep.F_at(lam).to_numpy()),
                         "G": _complex_matrix(rep.G_at(lam).to_numpy())} for lam in rep.space]
    return doc


def tag_numbers(obj: Any) -> Any:
    """Wrap every number as {"mode": ..., "value": ...}.

    Integers and Fractions are exact (Fractions as "num/den"), floats are
    float-mode values.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return {"mode": "exact", "value": int(obj)}
    if isinstance(obj, Fraction):
        return {"mode": "exact", "value": fraction_str(obj)}
    if isinstance(obj, (float, np.floating)):
        return {"mode": "float", "value": float(obj)}
    if isinstance(obj, dict):
        return {str(k): tag_numbers(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [tag_numbers(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
