"""Formulas of the spatial logics, their concrete syntax and a fixpoint evaluator.

Concrete syntax (``+`` is forward, ``-`` is backward)::

    Phi := true | false | IDENT | !Phi | Phi & Phi | Phi | Phi
         | N+ Phi | N- Phi | sigma+ Phi | sigma- Phi
         | rho+(Phi, Phi) | rho-(Phi, Phi) | zeta+(Phi, Phi) | zeta-(Phi, Phi)
         | S(Phi, Phi) | P(Phi, Phi) | (Phi)

``!`` binds tighter than ``&``, which binds tighter than ``|``.
"""
import re
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import FormulaSyntaxError, ModelError, UnknownAtomError
from .model import closure


class Formula:
    __slots__ = ()

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("And needs at least one operand")


@dataclass(frozen=True, repr=False)
class Or(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("Or needs at least one operand")


@dataclass(frozen=True, repr=False)
class NearFwd(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class NearBwd(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class SigmaFwd(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class SigmaBwd(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class RhoFwd(Formula):
    target: Formula
    via: Formula


@dataclass(frozen=True, repr=False)
class RhoBwd(Formula):
    target: Formula
    via: Formula


@dataclass(frozen=True, repr=False)
class ZetaFwd(Formula):
    target: Formula
    via: Formula


@dataclass(frozen=True, repr=False)
class ZetaBwd(Formula):
    target: Formula
    via: Formula


@dataclass(frozen=True, repr=False)
class Surround(Formula):
    inner: Formula
    border: Formula


@dataclass(frozen=True, repr=False)
class Propagate(Formula):
    source: Formula
    via: Formula


TRUE = Top()
FALSE = Bottom()

_UNARY = {NearFwd: "N+", NearBwd: "N-", SigmaFwd: "sigma+", SigmaBwd: "sigma-"}
_BINARY = {RhoFwd: "rho+", RhoBwd: "rho-", ZetaFwd: "zeta+", ZetaBwd: "zeta-",
           Surround: "S", Propagate: "P"}
_UNARY_BY_NAME = {v: k for k, v in _UNARY.items()}
_BINARY_BY_NAME = {v: k for k, v in _BINARY.items()}
KEYWORDS = frozenset({"true", "false", "N", "rho", "sigma", "zeta", "S", "P"})


def _operands(f):
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Not,) + tuple(_UNARY)):
        return (f.arg,)
    if isinstance(f, tuple(_BINARY)):
        return tuple(getattr(f, fld) for fld in f.__dataclass_fields__)
    return ()


def subformulas(f):
    """Post-order, each distinct object once."""
    seen, out, stack = set(), [], [(f, False)]
    while stack:
        node, done = stack.pop()
        if done:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        stack.extend((c, False) for c in reversed(_operands(node)))
    return out


def atoms(f):
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def depth(f):
    ops = _operands(f)
    return 0 if not ops else 1 + max(depth(g) for g in ops)


def size(f):
    return 1 + sum(size(g) for g in _operands(f))


# ------------------------------------------------------------------ printing

def to_text(f):
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        inner = to_text(f.arg)
        return "!" + (f"({inner})" if isinstance(f.arg, (And, Or)) else inner)
    if isinstance(f, And):
        return " & ".join(f"({to_text(g)})" if isinstance(g, (And, Or)) else to_text(g)
                          for g in f.args)
    if isinstance(f, Or):
        return " | ".join(f"({to_text(g)})" if isinstance(g, Or) else to_text(g)
                          for g in f.args)
    if type(f) in _UNARY:
        return f"{_UNARY[type(f)]}({to_text(f.arg)})"
    if type(f) in _BINARY:
        a, b = _operands(f)
        return f"{_BINARY[type(f)]}({to_text(a)}, {to_text(b)})"
    raise TypeError(f"not a formula: {f!r}")


def _repr(self):
    return f"<{type(self).__name__} {to_text(self)}>"


Formula.__repr__ = _repr


# ------------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([()!,&|+\-]))")


def _tokenize(text):
    pos, out = 0, []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        out.append((m.group(1) or m.group(2), start))
        pos = m.end()
    out.append(("<end>", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            shown = "end of input" if tok == "<end>" else repr(tok)
            raise FormulaSyntaxError(f"expected {expected!r}, found {shown}", pos)
        self.i += 1
        return tok

    def pos(self):
        return self.toks[self.i][1]

    def parse(self):
        f = self.disjunction()
        if self.peek() != "<end>":
            raise FormulaSyntaxError(f"unexpected {self.peek()!r}", self.pos())
        return f

    def disjunction(self):
        args = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self):
        args = [self.unary()]
        while self.peek() == "&":
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def pair(self):
        self.take("(")
        a = self.disjunction()
        self.take(",")
        b = self.disjunction()
        self.take(")")
        return a, b

    def unary(self):
        tok, pos = self.toks[self.i]
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in ("N", "sigma", "rho", "zeta"):
            self.take()
            sign = self.peek()
            if sign not in ("+", "-"):
                raise FormulaSyntaxError(f"expected '+' or '-' after {tok!r}", self.pos())
            self.take()
            name = tok + sign
            if name in _UNARY_BY_NAME:
                return _UNARY_BY_NAME[name](self.unary())
            return _BINARY_BY_NAME[name](*self.pair())
        if tok in ("S", "P"):
            self.take()
            return _BINARY_BY_NAME[tok](*self.pair())
        return self.primary()

    def primary(self):
        tok, pos = self.toks[self.i]
        if tok == "(":
            self.take()
            f = self.disjunction()
            self.take(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok[0].isalpha() or tok[0] == "_":
            self.take()
            if self.peek() in ("+", "-"):
                raise FormulaSyntaxError(f"unknown operator {tok + self.peek()!r}", pos)
            if self.peek() == "(":
                raise FormulaSyntaxError(f"unknown operator {tok!r}", pos)
            return Atom(tok)
        shown = "end of input" if tok == "<end>" else repr(tok)
        raise FormulaSyntaxError(f"unexpected {shown}", pos)


def parse(text):
    """Parse the concrete syntax into a :class:`Formula`."""
    return _Parser(text).parse()


# ---------------------------------------------------------------- evaluation

def _reach_through(model, target, via):
    """Points with a walk to ``target`` whose points before the last satisfy ``via``."""
    return _kernels.backward_lfp(model.pred_ptr, model.pred_idx, target, via)


def evaluate(model, f, strict=False):
    """Satisfaction set of ``f`` in ``model`` as a boolean array."""
    memo = {}
    for g in subformulas(f):
        memo[id(g)] = _eval_node(model, g, memo, strict)
    return memo[id(f)]


def _eval_node(model, g, memo, strict):
    def val(h):
        return memo[id(h)]

    if isinstance(g, Top):
        return np.ones(model.n, dtype=bool)
    if isinstance(g, Bottom):
        return np.zeros(model.n, dtype=bool)
    if isinstance(g, Atom):
        if g.name not in model.valuation:
            if strict:
                raise UnknownAtomError(g.name)
            warnings.warn(f"atomic proposition {g.name!r} does not occur in the model",
                          stacklevel=4)
        return model.prop_set(g.name)
    if isinstance(g, Not):
        return ~val(g.arg)
    if isinstance(g, And):
        return np.logical_and.reduce([val(h) for h in g.args])
    if isinstance(g, Or):
        return np.logical_or.reduce([val(h) for h in g.args])
    if isinstance(g, NearFwd):
        return closure(model, val(g.arg), "fwd")
    if isinstance(g, NearBwd):
        return closure(model, val(g.arg), "bwd")
    if isinstance(g, ZetaFwd):
        return _reach_through(model, val(g.target), val(g.via))
    if isinstance(g, ZetaBwd):
        return _reach_through(model.reversed(), val(g.target), val(g.via))
    if isinstance(g, RhoFwd):
        return rho(model, val(g.target), val(g.via), "fwd")
    if isinstance(g, RhoBwd):
        return rho(model, val(g.target), val(g.via), "bwd")
    if isinstance(g, SigmaFwd):
        return rho(model, val(g.arg), np.ones(model.n, dtype=bool), "fwd")
    if isinstance(g, SigmaBwd):
        return rho(model, val(g.arg), np.ones(model.n, dtype=bool), "bwd")
    if isinstance(g, Surround):
        inner, border = val(g.inner), val(g.border)
        escape = rho(model, ~(inner | border), ~border, "fwd")
        return inner & ~escape
    if isinstance(g, Propagate):
        return val(g.via) & rho(model, val(g.source), val(g.via), "bwd")
    raise TypeError(f"not a formula: {g!r}")


def rho(model, target, via, direction="fwd"):
    """Conditional reachability on point sets.

    ``B`` is the least fixpoint of ``target | (via & pre(B))`` and the result
    is ``target`` plus the predecessors of ``B``.  Stuttering steps cannot
    enlarge ``B``: a stutter at a point already in ``B`` adds nothing, and
    ``target`` seeds ``B`` directly.
    """
    m = model if direction == "fwd" else model.reversed()
    b = _reach_through(m, target, via)
    return closure(m, b, "bwd")


def check(model, point, f, strict=False):
    x = model.id_of(point)
    return bool(evaluate(model, f, strict)[x])


def sat_names(model, f, strict=False):
    return model.names_of(evaluate(model, f, strict))


def as_formula(f):
    if isinstance(f, Formula):
        return f
    if isinstance(f, str):
        return parse(f)
    raise ModelError(f"expected a formula or formula text, got {type(f).__name__}")
