"""JSON rendering of kernel verdicts.

``to_json_obj`` turns any finished result into plain data; ``emit_report``
serializes it with sorted keys so identical inputs give identical bytes.
Rationals appear as canonical strings such as "1/2".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import singledispatch
from typing import Any

from ..cech import BatchelorReport, CocycleReport
from ..derivations import (
    AdaptednessReport,
    EigenDecomposition,
    LeibnizReport,
    SuperDerivation,
    format_derivation,
)
from ..grassmann import GrassmannElement, format_element
from ..presentation import GradedPiece, Membership, NoCertificate, Presentation, SplitCertificate


@dataclass
class QueryResult:
    """A command outcome; ``ok`` is False for a "no" verdict or an error."""

    query: str
    payload: dict
    ok: bool = True


def _text(a: GrassmannElement | None) -> str | None:
    return None if a is None else format_element(a)


def derivation_json(D: SuperDerivation) -> dict:
    sig = D.signature
    return {
        "text": format_derivation(D),
        "parity": D.parity,
        "even": {n: format_element(c) for n, c in zip(sig.even_names, D.even_coeffs) if c},
        "odd": {n: format_element(c) for n, c in zip(sig.odd_names, D.odd_coeffs) if c},
    }


@singledispatch
def to_json_obj(result: Any) -> Any:
    raise TypeError(f"no JSON rendering for {type(result).__name__}")


@to_json_obj.register
def _(result: QueryResult) -> dict:
    return {"query": result.query, **result.payload}


@to_json_obj.register
def _(result: SplitCertificate) -> dict:
    return {"query": "split", "status": "certificate", "d": result.d, "D": result.D,
            "derivation": derivation_json(result.derivation), "checks": result.checks()}


@to_json_obj.register
def _(result: NoCertificate) -> dict:
    return {"query": "split", "status": "no-certificate", "d": result.d, "D": result.D,
            "derivation": None, "checks": [{"name": "linear system", "passed": False,
                                            "unknowns": result.unknowns, "equations": result.equations}]}


@to_json_obj.register
def _(result: GradedPiece) -> dict:
    return {"query": "gr", "k": result.k, "D": result.D, "rank": result.rank,
            "dimension": result.dimension, "basis": [_text(b) for b in result.basis],
            "generators": [_text(g) for g in result.generators]}


@to_json_obj.register
def _(result: EigenDecomposition) -> dict:
    out = {"query": "euler", "decomposable": result.decomposable,
           "weights": {str(k): _text(c) for k, c in sorted(result.components.items())}}
    if not result.decomposable:
        out["residual"] = _text(result.residual)
    return out


@to_json_obj.register
def _(result: Membership) -> dict:
    cert = None
    if result.certificate is not None:
        cert = {str(i + 1): _text(q) for i, q in result.certificate.items()}
    return {"query": "member", "element": _text(result.element), "member": result.member,
            "D": result.D, "certificate": cert}


@to_json_obj.register
def _(result: LeibnizReport) -> dict:
    return {"query": "leibniz", "passed": result.passed, "checked": result.checked,
            "witness": None if result.witness is None else [_text(w) for w in result.witness],
            "lhs": _text(result.lhs), "rhs": _text(result.rhs)}


@to_json_obj.register
def _(result: AdaptednessReport) -> dict:
    return {"query": "adapted", "passed": result.passed, "D": result.max_degree,
            "checked": result.checked, "failing_k": result.failing_k,
            "witness": _text(result.witness), "image": _text(result.image)}


@to_json_obj.register
def _(result: CocycleReport) -> dict:
    return {"query": "cocycles", "passed": result.passed,
            "violations": [{"kind": v.kind, "charts": list(v.charts), "generator": v.generator,
                            "expected": _text(v.expected), "actual": _text(v.actual)}
                           for v in result.violations]}


def _region(s) -> str:
    return ",".join(s)


def _check(c: dict) -> dict:
    out = dict(c)
    for key in ("region", "charts"):
        if key in out:
            out[key] = _region(out[key])
    return out


@to_json_obj.register
def _(result: BatchelorReport) -> dict:
    return {
        "query": "batchelor",
        "status": result.status,
        "passed": result.passed,
        "stages": [{"weight": s.weight, "obstruction_entries": s.obstruction_entries,
                    "coboundary_verified": s.coboundary_verified} for s in result.stages],
        "sigma": {_region(s): [_text(v) for v in imgs] for s, imgs in result.sigma.items()},
        "epsilon": {_region(s): [_text(v) for v in imgs] for s, imgs in result.epsilon.items()},
        "phi": {f"{_region(s)}@{a}": [_text(v) for v in m.images] for (s, a), m in result.phi.items()},
        "checks": [_check(c) for c in result.checks],
    }


@to_json_obj.register
def _(result: Presentation) -> dict:
    sig = result.signature
    return {"p": sig.p, "q": sig.q, "d": result.d, "D": result.D,
            "relations": [_text(r) for r in result.relations]}


def _default(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, GrassmannElement):
        return format_element(value)
    if isinstance(value, SuperDerivation):
        return format_derivation(value)
    return to_json_obj(value)


def emit_report(result: Any, indent: int | None = None) -> str:
    """Deterministic JSON text for a verdict or a list of verdicts."""
    data = [to_json_obj(r) for r in result] if isinstance(result, list) else to_json_obj(result)
    return json.dumps(data, sort_keys=True, indent=indent, default=_default)
