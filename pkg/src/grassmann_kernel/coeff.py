"""Exact coefficient arithmetic.

Multivariate polynomials over the rationals stand in for smooth functions on
R^p.  A small closed registry of analytic atoms (exp, sin, cos, log) can be
expanded into exact Taylor polynomials at centers where their Taylor data is
rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import ArgumentError, DomainError, UnsupportedCenterError

Exponent = tuple[int, ...]
Rational = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ArgumentError(f"expected an exact rational, got {value!r}")
    return Fraction(value)


def grlex_key(exp: Exponent) -> tuple:
    """Sort key for graded lexicographic order (larger key = larger monomial)."""
    return (sum(exp), exp)


class Polynomial:
    """Polynomial in ``nvars`` even variables with exact rational coefficients.

    Terms are stored as ``{exponent tuple: Fraction}`` with zero coefficients
    dropped, so two polynomials are equal iff their term maps are equal.
    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Rational] | None = None):
        if nvars < 0:
            raise ArgumentError("number of variables must be non-negative")
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ArgumentError(f"bad exponent {exp} for {nvars} variables")
            c = as_fraction(c)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> "Polynomial":
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: Rational) -> "Polynomial":
        value = as_fraction(value)
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        """The coordinate function x^index (1-based)."""
        if not 1 <= index <= nvars:
            raise ArgumentError(f"variable index {index} out of range 1..{nvars}")
        exp = [0] * nvars
        exp[index - 1] = 1
        return cls._raw(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: Rational = 1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): coeff})

    # -- views ---------------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self._terms.items())

    def sorted_items(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def truncate(self, order: int) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: c for e, c in self._terms.items() if sum(e) <= order})

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise ArgumentError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.constant(self.nvars, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c: Rational) -> "Polynomial":
        c = as_fraction(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: dict[Exponent, Fraction] = {}
        mul_into(out, self._terms, other._terms, 1)
        return Polynomial._raw(self.nvars, out)

    def __rmul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ArgumentError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"

    def __str__(self) -> str:
        return format_polynomial(self)


def mul_into(acc: dict, a: Mapping[Exponent, Fraction], b: Mapping[Exponent, Fraction], sign: int) -> None:
    """Accumulate ``sign * a * b`` into the term map ``acc`` (zeros removed)."""
    for ea, ca in a.items():
        if sign < 0:
            ca = -ca
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = acc.get(e)
            if v is None:
                acc[e] = ca * cb
            else:
                v += ca * cb
                if v:
                    acc[e] = v
                else:
                    del acc[e]


def default_names(n: int, prefix: str = "x") -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def format_monomial(exp: Exponent, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_polynomial(poly: Polynomial, names: Sequence[str] | None = None) -> str:
    """Canonical text form, e.g. ``3/2*x1^2*x2 - x3 + 7``."""
    names = names or default_names(poly.nvars)
    if poly.is_zero():
        return "0"
    out = []
    for i, (exp, c) in enumerate(poly.sorted_items()):
        mono = format_monomial(exp, names)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if i == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(("+ " if c > 0 else "- ") + body)
    return " ".join(out)


# -- calculus ------------------------------------------------------------------


def partial_derivative(h: Polynomial, j: int) -> Polynomial:
    """dh/dx^j for 1 <= j <= nvars."""
    if not 1 <= j <= h.nvars:
        raise ArgumentError(f"derivative index {j} out of range 1..{h.nvars}")
    i = j - 1
    out: dict[Exponent, Fraction] = {}
    for exp, c in h.items():
        e = exp[i]
        if e:
            new = exp[:i] + (e - 1,) + exp[i + 1:]
            out[new] = c * e
    return Polynomial._raw(h.nvars, out)


def substitute(h: Polynomial, args: Sequence[Polynomial]) -> Polynomial:
    """Compose ``h(args[0], ..., args[k-1])`` and expand."""
    if len(args) != h.nvars:
        raise ArgumentError(f"arity mismatch: h takes {h.nvars} arguments, got {len(args)}")
    if not args:
        raise ArgumentError("cannot infer the target ring of a nullary substitution")
    n = args[0].nvars
    for a in args:
        if a.nvars != n:
            raise ArgumentError("substitution arguments live in different rings")
    powers: list[list[Polynomial]] = [[Polynomial.constant(n, 1)] for _ in args]

    def power(i: int, e: int) -> Polynomial:
        cache = powers[i]
        while len(cache) <= e:
            cache.append(cache[-1] * args[i])
        return cache[e]

    acc: dict[Exponent, Fraction] = {}
    for exp, c in h.items():
        term: Polynomial | None = None
        for i, e in enumerate(exp):
            if e:
                term = power(i, e) if term is None else term * power(i, e)
        if term is None:
            term = Polynomial.constant(n, 1)
        for e2, c2 in term.items():
            v = acc.get(e2, Fraction(0)) + c * c2
            if v:
                acc[e2] = v
            else:
                acc.pop(e2, None)
    return Polynomial._raw(n, acc)


def evaluate(h: Polynomial, point: Sequence[Rational]) -> Fraction:
    if len(point) != h.nvars:
        raise ArgumentError("point dimension does not match the polynomial")
    point = [as_fraction(v) for v in point]
    total = Fraction(0)
    for exp, c in h.items():
        term = c
        for v, e in zip(point, exp):
            if e:
                term *= v ** e
        total += term
    return total


# -- smooth atoms and atom expressions ---------------------------------------


class Expr:
    """Symbolic smooth function of variables t1..tk built from atoms."""

    def __add__(self, other):
        return Add((self, _lift(other)))

    def __radd__(self, other):
        return Add((_lift(other), self))

    def __sub__(self, other):
        return Add((self, Mul((Const(Fraction(-1)), _lift(other)))))

    def __rsub__(self, other):
        return Add((_lift(other), Mul((Const(Fraction(-1)), self))))

    def __mul__(self, other):
        return Mul((self, _lift(other)))

    def __rmul__(self, other):
        return Mul((_lift(other), self))

    def __neg__(self):
        return Mul((Const(Fraction(-1)), self))

    def __pow__(self, n: int):
        return Pow(self, n)


def _lift(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(as_fraction(value))


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1-based


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True)
class Add(Expr):
    args: tuple


@dataclass(frozen=True)
class Mul(Expr):
    args: tuple


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int  # negative exponents allowed where the base is nonzero


@dataclass(frozen=True)
class Call(Expr):
    atom: str
    arg: Expr


@dataclass(frozen=True)
class SmoothAtom:
    """A registered analytic function of one variable.

    ``center`` is the one point where every Taylor coefficient is rational;
    ``value_at_center`` is the exact value there.  ``derivative`` maps the
    argument expression ``u`` to the expression for atom'(u).
    """

    name: str
    center: Fraction
    value_at_center: Fraction
    derivative: Callable[[Expr], Expr]
    guard: Callable[[Fraction], bool]
    numeric: Callable[[float], float]


ATOMS: dict[str, SmoothAtom] = {
    "exp": SmoothAtom("exp", Fraction(0), Fraction(1), lambda u: Call("exp", u),
                      lambda v: True, math.exp),
    "sin": SmoothAtom("sin", Fraction(0), Fraction(0), lambda u: Call("cos", u),
                      lambda v: True, math.sin),
    "cos": SmoothAtom("cos", Fraction(0), Fraction(1), lambda u: -Call("sin", u),
                      lambda v: True, math.cos),
    "log": SmoothAtom("log", Fraction(1), Fraction(0), lambda u: Pow(u, -1),
                      lambda v: v > 0, math.log),
}


def atom(name: str, arg: Expr | int = 1) -> Call:
    """``atom("exp")`` is exp(t1); ``atom("sin", Var(2))`` is sin(t2)."""
    if name not in ATOMS:
        raise ArgumentError(f"unknown atom {name!r}; registered: {sorted(ATOMS)}")
    if isinstance(arg, int):
        arg = Var(arg)
    return Call(name, arg)


def arity(expr: Expr) -> int:
    if isinstance(expr, Var):
        return expr.index
    if isinstance(expr, Const):
        return 0
    if isinstance(expr, (Add, Mul)):
        return max((arity(a) for a in expr.args), default=0)
    if isinstance(expr, Pow):
        return arity(expr.base)
    if isinstance(expr, Call):
        return arity(expr.arg)
    raise ArgumentError(f"not an expression: {expr!r}")


def has_atoms(expr: Expr) -> bool:
    if isinstance(expr, Call):
        return True
    if isinstance(expr, (Add, Mul)):
        return any(has_atoms(a) for a in expr.args)
    if isinstance(expr, Pow):
        return expr.exponent < 0 or has_atoms(expr.base)
    return False


def to_polynomial(expr: Expr, nvars: int) -> Polynomial:
    """Expand an atom-free expression."""
    if isinstance(expr, Var):
        return Polynomial.variable(nvars, expr.index)
    if isinstance(expr, Const):
        return Polynomial.constant(nvars, expr.value)
    if isinstance(expr, Add):
        out = Polynomial.zero(nvars)
        for a in expr.args:
            out = out + to_polynomial(a, nvars)
        return out
    if isinstance(expr, Mul):
        out = Polynomial.constant(nvars, 1)
        for a in expr.args:
            out = out * to_polynomial(a, nvars)
        return out
    if isinstance(expr, Pow) and expr.exponent >= 0:
        return to_polynomial(expr.base, nvars) ** expr.exponent
    raise ArgumentError("expression involves atoms or negative powers; use jet_expand")


def diff(expr: Expr, j: int) -> Expr:
    """Symbolic partial derivative with respect to t_j."""
    if isinstance(expr, Var):
        return Const(Fraction(int(expr.index == j)))
    if isinstance(expr, Const):
        return Const(Fraction(0))
    if isinstance(expr, Add):
        return Add(tuple(diff(a, j) for a in expr.args))
    if isinstance(expr, Mul):
        terms = []
        for i in range(len(expr.args)):
            factors = list(expr.args)
            factors[i] = diff(factors[i], j)
            terms.append(Mul(tuple(factors)))
        return Add(tuple(terms))
    if isinstance(expr, Pow):
        n = expr.exponent
        if n == 0:
            return Const(Fraction(0))
        return Mul((Const(Fraction(n)), Pow(expr.base, n - 1), diff(expr.base, j)))
    if isinstance(expr, Call):
        return Mul((ATOMS[expr.atom].derivative(expr.arg), diff(expr.arg, j)))
    raise ArgumentError(f"not an expression: {expr!r}")


def evaluate_expr(expr: Expr, point: Sequence[Rational]) -> Fraction:
    """Exact value at a rational point; atoms only at their rational centers."""
    if isinstance(expr, Var):
        return as_fraction(point[expr.index - 1])
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Add):
        return sum((evaluate_expr(a, point) for a in expr.args), Fraction(0))
    if isinstance(expr, Mul):
        out = Fraction(1)
        for a in expr.args:
            out *= evaluate_expr(a, point)
        return out
    if isinstance(expr, Pow):
        base = evaluate_expr(expr.base, point)
        if expr.exponent < 0 and base == 0:
            raise DomainError("negative power of zero")
        return base ** expr.exponent
    if isinstance(expr, Call):
        spec = ATOMS[expr.atom]
        v = evaluate_expr(expr.arg, point)
        if not spec.guard(v):
            raise DomainError(f"{spec.name} is undefined at {v}")
        if v != spec.center:
            raise UnsupportedCenterError(f"{spec.name}({v}) is not an exact rational")
        return spec.value_at_center
    raise ArgumentError(f"not an expression: {expr!r}")


def _series(expr: Expr, center: Sequence[Fraction], order: int) -> Polynomial:
    """Taylor polynomial of ``expr`` in shifted variables s_i = t_i - center_i."""
    k = len(center)
    if isinstance(expr, Var):
        if expr.index > k:
            raise ArgumentError(f"t{expr.index} used but the center has dimension {k}")
        return Polynomial.constant(k, center[expr.index - 1]) + Polynomial.variable(k, expr.index)
    if isinstance(expr, Const):
        return Polynomial.constant(k, expr.value)
    if isinstance(expr, Add):
        out = Polynomial.zero(k)
        for a in expr.args:
            out = out + _series(a, center, order)
        return out
    if isinstance(expr, Mul):
        out = Polynomial.constant(k, 1)
        for a in expr.args:
            out = (out * _series(a, center, order)).truncate(order)
        return out
    if isinstance(expr, Pow):
        base = _series(expr.base, center, order)
        if expr.exponent >= 0:
            out = Polynomial.constant(k, 1)
            for _ in range(expr.exponent):
                out = (out * base).truncate(order)
            return out
        b0 = base.constant_term()
        if b0 == 0:
            raise DomainError("negative power of a series vanishing at the center")
        # 1/(b0 + n) = sum_m (-n)^m / b0^(m+1)
        n = base - b0
        inv = Polynomial.zero(k)
        term = Polynomial.constant(k, 1 / b0)
        for _ in range(order + 1):
            inv = inv + term
            term = (term * n).scale(-1 / b0).truncate(order)
        out = Polynomial.constant(k, 1)
        for _ in range(-expr.exponent):
            out = (out * inv).truncate(order)
        return out
    if isinstance(expr, Call):
        spec = ATOMS[expr.atom]
        inner = _series(expr.arg, center, order)
        u0 = inner.constant_term()
        if not spec.guard(u0):
            raise DomainError(f"{spec.name} is undefined at {u0}")
        if u0 != spec.center:
            raise UnsupportedCenterError(
                f"Taylor data of {spec.name} at {u0} is irrational; jets exist only at {spec.center}")
        n = inner - u0
        out = Polynomial.zero(k)
        deriv: Expr = Call(spec.name, Var(1))
        npow = Polynomial.constant(k, 1)
        factorial = 1
        for m in range(order + 1):
            if m:
                factorial *= m
                deriv = diff(deriv, 1)
                npow = (npow * n).truncate(order)
            coeff = evaluate_expr(deriv, [u0])
            if coeff:
                out = out + npow.scale(coeff / factorial)
        return out.truncate(order)
    raise ArgumentError(f"not an expression: {expr!r}")


def jet_expand(expr: Expr | Polynomial, center: Sequence[Rational], order: int) -> Polynomial:
    """Degree-``order`` Taylor polynomial at ``center`` in shifted variables.

    The result is a polynomial in s_i = t_i - center_i with exact coefficients.
    """
    if order < 0:
        raise ArgumentError("jet order must be non-negative")
    center = [as_fraction(c) for c in center]
    if isinstance(expr, Polynomial):
        if expr.nvars != len(center):
            raise ArgumentError("center dimension does not match the polynomial")
        shifted = [Polynomial.variable(len(center), i + 1) + c for i, c in enumerate(center)]
        return substitute(expr, shifted).truncate(order) if center else expr.truncate(order)
    if arity(expr) > len(center):
        raise ArgumentError("center dimension is smaller than the expression arity")
    return _series(expr, center, order)


def multi_indices(k: int, max_total: int) -> Iterable[Exponent]:
    """All exponent tuples of length k with sum <= max_total, by total degree."""
    def rec(prefix: tuple, remaining_vars: int, budget: int):
        if remaining_vars == 0:
            yield prefix
            return
        for e in range(budget + 1):
            yield from rec(prefix + (e,), remaining_vars - 1, budget - e)

    out = list(rec((), k, max_total))
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return out
