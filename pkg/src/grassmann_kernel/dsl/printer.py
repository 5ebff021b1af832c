"""Canonical text for parsed models; parse(print(m)) reproduces m."""

from __future__ import annotations

from fractions import Fraction

from ..derivations import SuperDerivation, format_derivation
from ..grassmann import AlgebraSignature, GrassmannElement, format_element
from .parser import Command, CoverSpec, Model


def print_element(a: GrassmannElement, unicode: bool = False) -> str:
    return format_element(a, unicode=unicode)


def print_derivation(D: SuperDerivation, unicode: bool = False) -> str:
    return format_derivation(D, unicode=unicode)


def _ring(sig: AlgebraSignature) -> str:
    return f"ring p={sig.p} q={sig.q};"


def _bounds(d: int | None, D: int | None) -> str:
    parts = ["bounds"]
    if d is not None:
        parts.append(f"d={d}")
    if D is not None:
        parts.append(f"D={D}")
    return " ".join(parts) + ";"


def _command(cmd: Command) -> str:
    words = [cmd.name]
    if cmd.name == "split":
        d, D = cmd.args
        if d is not None:
            words.append(f"d={d}")
        if D is not None:
            words.append(f"D={D}")
    elif cmd.name == "gr":
        words.append(str(cmd.args[0]))
    elif cmd.name in ("euler", "member", "normal"):
        if cmd.args[0] is not None:
            words.append(print_element(cmd.args[0]))
    elif cmd.name == "apply":
        words += [cmd.args[0], print_element(cmd.args[1])]
    elif cmd.name == "leibniz":
        words.append(cmd.args[0])
        if cmd.args[1] is not None:
            words.append(str(cmd.args[1]))
    elif cmd.name == "adapted":
        if cmd.args[0] is not None:
            words.append(cmd.args[0])
    return " ".join(words) + ";"


def _fraction(v: Fraction) -> str:
    return str(v)


def _cover(spec: CoverSpec) -> list[str]:
    lines = ["cover {"]
    for chart in spec.charts.values():
        lines.append(f"  chart {chart.name}: {_ring(chart.signature)}")
        for r in chart.relations:
            lines.append(f"  relation {print_element(r)};")
        if chart.d is not None or chart.D is not None:
            lines.append(f"  {_bounds(chart.d, chart.D)}")
    for names in spec.overlaps:
        lines.append(f"  overlap {' '.join(names)};")
    for (a, b), pairs in spec.transitions.items():
        body = "; ".join(f"{n} -> {print_element(img)}" for n, img in pairs)
        lines.append(f"  transition {a}->{b} {{ {body} }};" if body else f"  transition {a}->{b} {{ }};")
    if spec.weights is not None:
        body = " ".join(f"{n}={_fraction(w)}" for n, w in spec.weights.items())
        lines.append(f"  weights {body};")
    lines.append("}")
    return lines


def print_model(model: Model) -> str:
    lines: list[str] = []
    for item in model.items:
        kind = item[0]
        if kind == "ring":
            lines.append(_ring(item[1]))
        elif kind == "relation":
            lines.append(f"relation {print_element(item[1])};")
        elif kind == "bounds":
            lines.append(_bounds(item[1], item[2]))
        elif kind == "element":
            lines.append(f"element {item[1]} = {print_element(item[2])};")
        elif kind == "derivation":
            lines.append(f"derivation {item[1]} = {print_derivation(item[2])};")
        elif kind == "cover":
            lines.extend(_cover(item[1]))
        elif kind == "command":
            lines.append(_command(item[1]))
    return "\n".join(lines) + ("\n" if lines else "")
