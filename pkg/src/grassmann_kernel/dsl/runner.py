"""Execute the commands of a parsed model against the kernel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..cech import check_cocycles, project_and_split
from ..derivations import adapted_check, derive_apply, eigen_decompose, euler_field, leibniz_check
from ..errors import KernelError
from ..grassmann import format_element
from ..presentation import (
    graded_basis,
    member,
    normal_form,
    quotient_basis,
    reduced_presentation,
    split_search,
)
from .parser import Command, Model
from .report import QueryResult, derivation_json, to_json_obj


@dataclass
class Outcome:
    command: Command
    result: Any
    ok: bool
    summary: str

    def to_json(self) -> dict:
        return to_json_obj(self.result)


def run_model(model: Model, seed: int = 0, max_degree: int | None = None) -> list[Outcome]:
    return [run_command(model, cmd, seed, max_degree) for cmd in model.commands]


def run_command(model: Model, cmd: Command, seed: int = 0, max_degree: int | None = None) -> Outcome:
    try:
        return _dispatch(model, cmd, seed, max_degree)
    except KernelError as exc:
        result = QueryResult(cmd.name, {"status": "error", "error": type(exc).__name__, "message": str(exc)}, False)
        return Outcome(cmd, result, False, f"{cmd.name}: error: {exc}")


def _dispatch(model: Model, cmd: Command, seed: int, max_degree: int | None) -> Outcome:
    name, args = cmd.name, cmd.args
    if name == "split":
        pres = model.presentation(max_degree)
        d, D = args
        verdict = split_search(pres, d, D)
        if verdict:
            return Outcome(cmd, verdict, verdict.valid,
                           f"split: certificate at d={verdict.d} D={verdict.D}: {verdict.derivation}")
        return Outcome(cmd, verdict, False,
                       f"split: no certificate at d={verdict.d} D={verdict.D} (bounded verdict)")
    if name == "gr":
        piece = graded_basis(model.presentation(max_degree), args[0])
        gens = ", ".join(format_element(g) for g in piece.generators) or "none"
        return Outcome(cmd, piece, True, f"gr {args[0]}: rank {piece.rank}, generators {gens}")
    if name == "euler":
        sig = model.signature
        E = euler_field(sig)
        if args[0] is None:
            result = QueryResult("euler", {"derivation": derivation_json(E)})
            return Outcome(cmd, result, True, f"euler: {E}")
        dec = eigen_decompose(args[0], E)
        parts = ", ".join(f"{k}: {format_element(c)}" for k, c in sorted(dec.components.items()))
        return Outcome(cmd, dec, dec.decomposable, f"euler: {{{parts}}}")
    if name == "apply":
        D = model.derivations[args[0]]
        value = derive_apply(D, args[1])
        result = QueryResult("apply", {"derivation": args[0], "input": format_element(args[1]),
                                       "result": format_element(value)})
        return Outcome(cmd, result, True, f"apply {args[0]}: {value}")
    if name == "member":
        m = member(args[0], model.presentation(max_degree))
        return Outcome(cmd, m, m.member, f"member {args[0]}: {'yes' if m.member else 'no'}")
    if name == "normal":
        nf = normal_form(args[0], model.presentation(max_degree))
        result = QueryResult("normal", {"input": format_element(args[0]), "result": format_element(nf)})
        return Outcome(cmd, result, True, f"normal {args[0]}: {nf}")
    if name == "reduce":
        red = reduced_presentation(model.presentation(max_degree))
        basis = quotient_basis(red)
        result = QueryResult("reduce", {"relations": [format_element(r) for r in red.relations],
                                        "basis": [format_element(b) for b in basis], "D": red.D})
        return Outcome(cmd, result, True,
                       f"reduce: relations [{', '.join(map(str, red.relations))}], basis [{', '.join(map(str, basis))}]")
    if name == "leibniz":
        D = model.derivations[args[0]]
        report = leibniz_check(D, trials=args[1] or 500, seed=seed)
        if report.passed:
            return Outcome(cmd, report, True, f"leibniz {args[0]}: pass ({report.checked} pairs)")
        r, s = report.witness
        return Outcome(cmd, report, False, f"leibniz {args[0]}: fail at ({r}, {s})")
    if name == "adapted":
        E = model.derivations[args[0]] if args[0] else euler_field(model.signature)
        pres = model.presentation(max_degree)
        report = adapted_check(E, None if pres.is_free() else pres, pres.D)
        label = args[0] or "E_theta"
        if report.passed:
            return Outcome(cmd, report, True, f"adapted {label}: pass up to D={report.max_degree}")
        return Outcome(cmd, report, False,
                       f"adapted {label}: fail at k={report.failing_k}, witness {report.witness}")
    if name == "cocycles":
        report = check_cocycles(model.cover.gluing())
        if report.passed:
            return Outcome(cmd, report, True, "cocycles: pass")
        v = report.violations[0]
        return Outcome(cmd, report, False,
                       f"cocycles: {len(report.violations)} violation(s), first {v.kind} on {','.join(v.charts)} at {v.generator}")
    if name == "batchelor":
        g = model.cover.gluing()
        report = project_and_split(g, model.cover.partition(g))
        stages = ", ".join(f"w{s.weight}:{s.obstruction_entries}" for s in report.stages)
        return Outcome(cmd, report, report.passed, f"batchelor: {report.status} (obstructions {stages})")
    raise KernelError(f"unknown command {name!r}")
