"""Recursive-descent parser for the model language.

Grammar (every item ends at ';', braces delimit cover blocks and transition
maps, '#' starts a comment):

    doc        := item*
    item       := ring | relation | bounds | element | derivation | cover | command
    ring       := "ring" "p" "=" INT "q" "=" INT ";"
    relation   := "relation" expr ";"
    bounds     := "bounds" ["d" "=" INT] ["D" "=" INT] ";"
    element    := "element" IDENT "=" expr ";"
    derivation := "derivation" IDENT "=" dexpr ";"
    cover      := "cover" "{" citem* "}"
    citem      := "chart" IDENT ":" ring | relation | bounds
                | "overlap" IDENT IDENT [IDENT] ";"
                | "transition" IDENT "->" IDENT "{" [map (";" map)* [";"]] "}" [";"]
                | "weights" (IDENT "=" number)+ ";"
    map        := IDENT "->" expr
    command    := "split" ["d" "=" INT] ["D" "=" INT] ";" | "gr" INT ";"
                | "euler" [expr] ";" | "apply" IDENT expr ";" | "member" expr ";"
                | "normal" expr ";" | "reduce" ";" | "leibniz" IDENT [INT] ";"
                | "adapted" [IDENT] ";" | "cocycles" ";" | "batchelor" ";"
    expr       := ["+" | "-"] term (("+" | "-") term)*
    term       := power (("*" power) | ("/" INT))*
    power      := primary ["^" INT]
    primary    := INT | IDENT | ATOM "(" expr ")" | "(" expr ")"
    dexpr      := "0" | ["+" | "-"] dterm (("+" | "-") dterm)*
    dterm      := DERIV | power (("*" power) | ("/" INT))* "*" DERIV
    number     := INT ["/" INT]

Identifiers in expressions are generators (x1..xp, t1..tq) or previously
declared element names.  Parsing never raises: problems become diagnostics
with a code, a position and, for syntax errors, the expected tokens.

    E100 lexical    E200 syntax       E300 unknown name   E301 no ring
    E302 parity     E303 bounds       E304 cover          E305 transition
    E306 duplicate  E307 evaluation
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from ..cech import GluingData, PartitionWeights
from ..coeff import ATOMS, atom
from ..derivations import SuperDerivation
from ..errors import KernelError, ParityError
from ..grassmann import AlgebraSignature, GrassmannElement, apply_smooth
from ..morphisms import Morphism
from ..presentation import Presentation
from .lexer import Diagnostic, Token, tokenize

COMMANDS = ("split", "gr", "euler", "apply", "member", "normal", "reduce",
            "leibniz", "adapted", "cocycles", "batchelor")
KEYWORDS = ("ring", "relation", "bounds", "element", "derivation", "cover") + COMMANDS


@dataclass
class ChartSpec:
    name: str
    signature: AlgebraSignature
    relations: list[GrassmannElement] = field(default_factory=list)
    d: int | None = None
    D: int | None = None

    def presentation(self) -> Presentation:
        return Presentation(self.signature, tuple(self.relations), self.d, self.D)


@dataclass
class CoverSpec:
    charts: dict[str, ChartSpec] = field(default_factory=dict)
    overlaps: list[tuple[str, ...]] = field(default_factory=list)
    transitions: dict[tuple[str, str], list[tuple[str, GrassmannElement]]] = field(default_factory=dict)
    weights: dict[str, Fraction] | None = None

    def gluing(self) -> GluingData:
        morphisms = {}
        for (a, b), pairs in self.transitions.items():
            sa, sb = self.charts[a].signature, self.charts[b].signature
            morphisms[(a, b)] = Morphism.from_mapping(sa, sb, dict(pairs))
        return GluingData({n: c.presentation() for n, c in self.charts.items()},
                          self.overlaps, morphisms)

    def partition(self, gluing: GluingData) -> PartitionWeights | None:
        if self.weights is None:
            return None
        return PartitionWeights.from_chart_weights(gluing.regions, self.weights)


@dataclass
class Command:
    name: str
    args: tuple = ()
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Model:
    signature: AlgebraSignature | None = None
    relations: list[GrassmannElement] = field(default_factory=list)
    bounds: tuple[int | None, int | None] = (None, None)
    elements: dict[str, GrassmannElement] = field(default_factory=dict)
    derivations: dict[str, SuperDerivation] = field(default_factory=dict)
    cover: CoverSpec | None = None
    commands: list[Command] = field(default_factory=list)
    items: list[tuple] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def presentation(self, max_degree: int | None = None) -> Presentation:
        d, D = self.bounds
        if max_degree is not None:
            D = max_degree
            if d is not None:
                d = min(d, D)
        return Presentation(self.signature, tuple(self.relations), d, D)


class _Abort(Exception):
    pass


class _Parser:
    def __init__(self, text: str):
        self.tokens, lex_diags = tokenize(text)
        self.pos = 0
        self.model = Model()
        self.model.diagnostics.extend(lex_diags)
        self.bounds_token: Token | None = None

    # -- token helpers ---------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind in ("PUNCT", "IDENT") and self.tok.text == text

    def fail(self, code: str, message: str, tok: Token | None = None, expected: tuple[str, ...] = ()):
        tok = tok or self.tok
        self.model.diagnostics.append(Diagnostic(code, message, tok.line, tok.col, expected))
        raise _Abort

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.fail("E200", f"unexpected {found!r}", expected=(repr(text),))
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            self.fail("E200", f"unexpected {found!r}", expected=(what,))
        return self.advance()

    def integer(self) -> int:
        return int(self.expect_kind("INT", "integer").text)

    def number(self) -> Fraction:
        value = Fraction(self.integer())
        if self.at("/"):
            self.advance()
            tok = self.tok
            den = self.integer()
            if den == 0:
                self.fail("E307", "division by zero", tok)
            value /= den
        return value

    def sync(self, start: int, stop_at_brace: bool = False) -> None:
        """Skip past the next ';' (or up to a closing brace inside a block).

        Nothing is skipped when the failed item already consumed its ';'.
        """
        last = self.tokens[self.pos - 1] if self.pos > start else None
        if last is not None and last.kind == "PUNCT" and last.text in (";", "}"):
            return
        while self.tok.kind != "EOF":
            if stop_at_brace and self.at("}"):
                return
            if self.advance().text == ";" and self.tokens[self.pos - 1].kind == "PUNCT":
                return

    # -- document --------------------------------------------------------------

    def parse(self) -> Model:
        while self.tok.kind != "EOF":
            start = self.pos
            try:
                self.item()
            except _Abort:
                self.sync(start)
            except (KernelError, RecursionError) as exc:
                tok = self.tokens[start]
                self.model.diagnostics.append(Diagnostic("E307", f"cannot evaluate: {exc}", tok.line, tok.col))
                self.sync(start)
                if self.pos == start:
                    self.advance()
        self.finish()
        return self.model

    def item(self) -> None:
        tok = self.tok
        if tok.kind != "IDENT" or tok.text not in KEYWORDS:
            self.fail("E200", f"unexpected {tok.text or 'end of input'!r}", expected=("declaration", "command"))
        word = tok.text
        if word == "ring":
            sig = self.ring()
            if self.model.signature is not None:
                self.fail("E306", "ring declared twice", tok)
            self.model.signature = sig
            self.model.items.append(("ring", sig))
        elif word == "relation":
            rel = self.relation(self.require_ring(tok), tok)
            self.model.relations.append(rel)
            self.model.items.append(("relation", rel))
        elif word == "bounds":
            d, D = self.bounds()
            self.model.bounds = (d, D)
            self.bounds_token = tok
            self.model.items.append(("bounds", d, D))
        elif word == "element":
            self.element(tok)
        elif word == "derivation":
            self.derivation(tok)
        elif word == "cover":
            self.cover(tok)
        else:
            cmd = self.command()
            self.model.commands.append(cmd)
            self.model.items.append(("command", cmd))

    def require_ring(self, tok: Token) -> AlgebraSignature:
        if self.model.signature is None:
            self.fail("E301", "no ring declared before this item", tok)
        return self.model.signature

    def ring(self) -> AlgebraSignature:
        self.expect("ring")
        self.expect("p")
        self.expect("=")
        p = self.integer()
        self.expect("q")
        self.expect("=")
        tok = self.tok
        q = self.integer()
        if q > 62:
            self.fail("E303", "at most 62 odd generators are supported", tok)
        self.expect(";")
        return AlgebraSignature(p, q)

    def relation(self, sig: AlgebraSignature, tok: Token, env=None) -> GrassmannElement:
        self.expect("relation")
        start = self.tok
        rel = self.expr(sig, self.model.elements if env is None else env)
        self.expect(";")
        if not rel:
            self.fail("E307", "relation is zero", start)
        if rel.parity() is None:
            self.fail("E302", "relation not parity-homogeneous", start)
        return rel

    def bounds(self) -> tuple[int | None, int | None]:
        self.expect("bounds")
        d = D = None
        if self.at("d"):
            self.advance()
            self.expect("=")
            d = self.integer()
        if self.at("D"):
            self.advance()
            self.expect("=")
            D = self.integer()
        if d is None and D is None:
            self.fail("E200", "empty bounds", expected=("'d'", "'D'"))
        self.expect(";")
        return d, D

    def fresh_name(self, sig: AlgebraSignature | None) -> Token:
        tok = self.expect_kind("IDENT", "name")
        name = tok.text
        if name in KEYWORDS or name in ATOMS:
            self.fail("E306", f"{name!r} is reserved", tok)
        if sig is not None and name in sig.generator_names:
            self.fail("E306", f"{name!r} is a generator name", tok)
        if name in self.model.elements or name in self.model.derivations:
            self.fail("E306", f"{name!r} is already declared", tok)
        return tok

    def element(self, tok: Token) -> None:
        sig = self.require_ring(tok)
        self.expect("element")
        name = self.fresh_name(sig).text
        self.expect("=")
        value = self.expr(sig, self.model.elements)
        self.expect(";")
        self.model.elements[name] = value
        self.model.items.append(("element", name, value))

    def derivation(self, tok: Token) -> None:
        sig = self.require_ring(tok)
        self.expect("derivation")
        name = self.fresh_name(sig).text
        self.expect("=")
        D = self.dexpr(sig)
        self.expect(";")
        self.model.derivations[name] = D
        self.model.items.append(("derivation", name, D))

    # -- cover blocks ------------------------------------------------------------

    def cover(self, tok: Token) -> None:
        if self.model.cover is not None:
            self.fail("E306", "cover declared twice", tok)
        self.expect("cover")
        self.expect("{")
        spec = CoverSpec()
        current: ChartSpec | None = None
        while not self.at("}"):
            if self.tok.kind == "EOF":
                self.fail("E200", "unterminated cover block", expected=("'}'",))
            start = self.pos
            try:
                current = self.cover_item(spec, current)
            except _Abort:
                self.sync(start, stop_at_brace=True)
                if self.pos == start:
                    self.advance()
        self.expect("}")
        if self.at(";"):
            self.advance()
        self.model.cover = spec
        self.model.items.append(("cover", spec))

    def cover_item(self, spec: CoverSpec, current: ChartSpec | None) -> ChartSpec | None:
        tok = self.tok
        word = tok.text if tok.kind == "IDENT" else ""
        if word == "chart":
            self.advance()
            name_tok = self.expect_kind("IDENT", "chart name")
            self.expect(":")
            sig = self.ring()
            if name_tok.text in spec.charts:
                self.fail("E306", f"chart {name_tok.text!r} declared twice", name_tok)
            chart = ChartSpec(name_tok.text, sig)
            spec.charts[chart.name] = chart
            return chart
        if word in ("relation", "bounds"):
            if current is None:
                self.fail("E304", f"{word} inside a cover must follow a chart", tok)
            if word == "relation":
                current.relations.append(self.relation(current.signature, tok, env={}))
            else:
                current.d, current.D = self.bounds()
            return current
        if word == "overlap":
            self.advance()
            names = [self.chart_ref(spec), self.chart_ref(spec)]
            if self.tok.kind == "IDENT":
                names.append(self.chart_ref(spec))
            self.expect(";")
            if len(set(names)) != len(names):
                self.fail("E304", "overlap repeats a chart", tok)
            spec.overlaps.append(tuple(names))
            return current
        if word == "transition":
            self.transition(spec)
            return current
        if word == "weights":
            self.advance()
            weights = {}
            while self.tok.kind == "IDENT":
                name_tok = self.tok
                name = self.chart_ref(spec)
                self.expect("=")
                if name in weights:
                    self.fail("E306", f"weight for {name!r} given twice", name_tok)
                weights[name] = self.number()
            if not weights:
                self.fail("E200", "empty weights", expected=("chart name",))
            self.expect(";")
            if spec.weights is not None:
                self.fail("E306", "weights declared twice", tok)
            spec.weights = weights
            return current
        self.fail("E200", f"unexpected {tok.text or 'end of input'!r}",
                  expected=("'chart'", "'relation'", "'bounds'", "'overlap'", "'transition'", "'weights'", "'}'"))

    def chart_ref(self, spec: CoverSpec) -> str:
        tok = self.expect_kind("IDENT", "chart name")
        if tok.text not in spec.charts:
            self.fail("E304", f"unknown chart {tok.text!r}", tok)
        return tok.text

    def transition(self, spec: CoverSpec) -> None:
        self.expect("transition")
        head = self.tok
        a = self.chart_ref(spec)
        self.expect("->")
        b = self.chart_ref(spec)
        if (a, b) in spec.transitions:
            self.fail("E306", f"transition {a}->{b} declared twice", head)
        sa, sb = spec.charts[a].signature, spec.charts[b].signature
        self.expect("{")
        pairs: list[tuple[str, GrassmannElement]] = []
        while not self.at("}"):
            gen_tok = self.expect_kind("IDENT", "generator")
            if gen_tok.text not in sa.generator_names:
                self.fail("E305", f"{gen_tok.text!r} is not a generator of chart {a}", gen_tok)
            if any(n == gen_tok.text for n, _ in pairs):
                self.fail("E306", f"{gen_tok.text!r} mapped twice", gen_tok)
            self.expect("->")
            start = self.tok
            image = self.expr(sb, {})
            odd = gen_tok.text in sa.odd_names
            if (odd and not image.is_odd()) or (not odd and not image.is_even()):
                self.fail("E305", f"image of {gen_tok.text} has the wrong parity", start)
            pairs.append((gen_tok.text, image))
            if self.at(";"):
                self.advance()
            elif not self.at("}"):
                self.fail("E200", f"unexpected {self.tok.text or 'end of input'!r}", expected=("';'", "'}'"))
        self.expect("}")
        if self.at(";"):
            self.advance()
        if (sa.p, sa.q) != (sb.p, sb.q) and len(pairs) < sa.p + sa.q:
            self.fail("E305", f"charts {a} and {b} differ in dimension; every generator needs an image", head)
        spec.transitions[(a, b)] = pairs

    # -- commands ------------------------------------------------------------------

    def command(self) -> Command:
        tok = self.advance()
        name = tok.text
        sig = self.model.signature
        args: tuple = ()
        needs_ring = name in ("split", "gr", "euler", "apply", "member", "normal", "reduce", "leibniz", "adapted")
        if needs_ring and sig is None:
            self.fail("E301", f"command {name!r} needs a ring", tok)
        if name == "split":
            d = D = None
            if self.at("d"):
                self.advance()
                self.expect("=")
                d = self.integer()
            if self.at("D"):
                self.advance()
                self.expect("=")
                D = self.integer()
            args = (d, D)
        elif name == "gr":
            args = (self.integer(),)
        elif name == "euler":
            args = (None if self.at(";") else self.expr(sig, self.model.elements),)
        elif name == "apply":
            args = (self.derivation_ref(), self.expr(sig, self.model.elements))
        elif name in ("member", "normal"):
            args = (self.expr(sig, self.model.elements),)
        elif name == "leibniz":
            D = self.derivation_ref()
            trials = None
            if self.tok.kind == "INT":
                num_tok = self.tok
                trials = self.integer()
                if trials < 1:
                    self.fail("E200", "trial count must be positive", num_tok)
            args = (D, trials)
        elif name == "adapted":
            args = (self.derivation_ref() if self.tok.kind == "IDENT" else None,)
        elif name in ("cocycles", "batchelor"):
            if self.model.cover is None:
                self.fail("E304", f"command {name!r} needs a cover declared before it", tok)
        self.expect(";")
        return Command(name, args, tok.line, tok.col)

    def derivation_ref(self) -> str:
        tok = self.expect_kind("IDENT", "derivation name")
        if tok.text not in self.model.derivations:
            self.fail("E300", f"unknown derivation {tok.text!r}", tok)
        return tok.text

    # -- expressions -----------------------------------------------------------------

    def expr(self, sig: AlgebraSignature, env: dict) -> GrassmannElement:
        sign = 1
        if self.at("+") or self.at("-"):
            sign = -1 if self.advance().text == "-" else 1
        total = self.term(sig, env).scale(sign)
        while self.at("+") or self.at("-"):
            sign = -1 if self.advance().text == "-" else 1
            total = total + self.term(sig, env).scale(sign)
        return total

    def term(self, sig: AlgebraSignature, env: dict) -> GrassmannElement:
        value = self.power(sig, env)
        while self.at("*") or self.at("/"):
            if self.advance().text == "*":
                value = value * self.power(sig, env)
            else:
                tok = self.tok
                den = self.integer()
                if den == 0:
                    self.fail("E307", "division by zero", tok)
                value = value.scale(Fraction(1, den))
        return value

    def power(self, sig: AlgebraSignature, env: dict) -> GrassmannElement:
        base = self.primary(sig, env)
        if self.at("^"):
            self.advance()
            base = base ** self.integer()
        return base

    def primary(self, sig: AlgebraSignature, env: dict) -> GrassmannElement:
        tok = self.tok
        if tok.kind == "INT":
            self.advance()
            return GrassmannElement.scalar(sig, int(tok.text))
        if self.at("("):
            self.advance()
            value = self.expr(sig, env)
            self.expect(")")
            return value
        if tok.kind == "IDENT":
            self.advance()
            name = tok.text
            if name in ATOMS and self.at("("):
                self.advance()
                arg = self.expr(sig, env)
                self.expect(")")
                try:
                    return apply_smooth(atom(name), [arg])
                except KernelError as exc:
                    self.fail("E307", f"cannot evaluate {name}: {exc}", tok)
            if name in sig.even_names:
                return GrassmannElement.x(sig, sig.even_names.index(name) + 1)
            if name in sig.odd_names:
                return GrassmannElement.theta(sig, sig.odd_names.index(name) + 1)
            if name in env:
                return env[name]
            self.fail("E300", f"unknown identifier {name!r}", tok)
        self.fail("E200", f"unexpected {tok.text or 'end of input'!r}", expected=("integer", "identifier", "'('"))

    def dexpr(self, sig: AlgebraSignature) -> SuperDerivation:
        names = sig.generator_names
        coeffs = {n: GrassmannElement.zero(sig) for n in names}
        start = self.tok
        if start.kind == "INT" and start.text == "0" and self.tokens[self.pos + 1].text == ";":
            self.advance()
            return SuperDerivation.zero(sig)
        first = True
        while first or self.at("+") or self.at("-"):
            sign = 1
            if self.at("+") or self.at("-"):
                sign = -1 if self.advance().text == "-" else 1
            elif not first:
                break
            first = False
            coef, gen = self.dterm(sig)
            coeffs[gen] = coeffs[gen] + coef.scale(sign)
        try:
            return SuperDerivation.from_images(sig, [coeffs[n] for n in names])
        except ParityError as exc:
            self.fail("E302", str(exc), start)

    def dterm(self, sig: AlgebraSignature) -> tuple[GrassmannElement, str]:
        coef = GrassmannElement.one(sig)
        if self.tok.kind != "DERIV":
            coef = self.power(sig, self.model.elements)
            while True:
                if self.at("/"):
                    self.advance()
                    tok = self.tok
                    den = self.integer()
                    if den == 0:
                        self.fail("E307", "division by zero", tok)
                    coef = coef.scale(Fraction(1, den))
                    continue
                self.expect("*")
                if self.tok.kind == "DERIV":
                    break
                coef = coef * self.power(sig, self.model.elements)
        tok = self.advance()
        if tok.kind != "DERIV":
            self.fail("E200", f"unexpected {tok.text!r}", tok, expected=("d/d<generator>",))
        gen = tok.text[3:]
        if gen not in sig.generator_names:
            self.fail("E300", f"unknown generator {gen!r} in {tok.text}", tok)
        return coef, gen

    # -- whole-document checks -----------------------------------------------------------

    def finish(self) -> None:
        model = self.model
        if model.signature is not None:
            try:
                model.presentation()
            except KernelError as exc:
                tok = self.bounds_token or self.tokens[0]
                model.diagnostics.append(Diagnostic("E303", str(exc), tok.line, tok.col))
        elif model.bounds != (None, None) and self.bounds_token is not None:
            tok = self.bounds_token
            model.diagnostics.append(Diagnostic("E301", "bounds given without a ring", tok.line, tok.col))
        if model.cover is not None:
            tok = next(t for t in self.tokens if t.text == "cover")
            try:
                for chart in model.cover.charts.values():
                    chart.presentation()
            except KernelError as exc:
                model.diagnostics.append(Diagnostic("E303", str(exc), tok.line, tok.col))
                return
            try:
                gluing = model.cover.gluing()
                model.cover.partition(gluing)
            except KernelError as exc:
                model.diagnostics.append(Diagnostic("E305" if "transition" in str(exc) or "infer" in str(exc) else "E304",
                                                    str(exc), tok.line, tok.col))
        model.diagnostics.sort(key=lambda d: (d.line, d.col))


def parse_model(text: str) -> Model:
    """Parse a document into a Model; problems are collected in ``model.diagnostics``."""
    return _Parser(text).parse()
