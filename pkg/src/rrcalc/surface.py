"""Textual surface syntax.

Grammar (whitespace-insensitive; names are lowercase):

    expr     := name
              | "jx" "[" int "]" "(" [expr {"," expr}] ")"
              | "jx" "(" expr {"," expr} ")"
              | "cm" "(" expr "," expr ")"
              | "pr" "(" expr ";" expr ")"     variant follows the config
              | "prs" "(" expr ";" expr ")"    pinned strict
              | "prc" "(" expr ";" expr ")"    pinned singularity-tolerant
              | "mn" "(" expr ")"
              | "proj" "(" int "," int ")"
              | "lit" "(" rational ")"
    name     := zero | one | negone | add | mul | invp | sqrtp | ln | exp
              | sin | cos | trig | arctan | pi | gamma
    rational := ["-"] digits ["/" digits | "." digits]

``lit`` is sugar: a rational expands to a term over the constants with
binary double-and-add (and a reciprocal for the denominator), so it leaves
no trace in the parsed tree.  Printing emits the canonical name for a
recognized builder node and core syntax otherwise; parsing the printed form
yields a structurally equal term.
"""

from __future__ import annotations

from fractions import Fraction

from . import stdlib
from .term import Cm, Const, Jx, Mn, Pr, PrVariant, Term, mk_cm, mk_jx, mk_mn, mk_pr


class ParseError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_NAMES = set(stdlib.STD_NAMES)
_CONSTS = {"zero": 0, "one": 1, "negone": -1}


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, msg: str, at: int = None):
        raise ParseError(msg, self.pos if at is None else at)

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def expect(self, ch: str):
        self.skip_ws()
        if self.pos >= len(self.src) or self.src[self.pos] != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.src) and (
            self.src[self.pos].isalnum() or self.src[self.pos] == "_"
        ):
            self.pos += 1
        if start == self.pos:
            self.error("expected a name")
        return self.src[start : self.pos]

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer")
        return int(self.src[start : self.pos])

    def rational(self) -> Fraction:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.src) and (
            self.src[self.pos].isdigit() or self.src[self.pos] in "-./"
        ):
            self.pos += 1
        if self.pos == start:
            self.error("expected a rational number")
        text = self.src[start : self.pos]
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            self.error(f"bad rational {text!r}", at=start)

    def expr(self) -> Term:
        self.skip_ws()
        at = self.pos
        name = self.ident()
        if name in _CONSTS:
            return Const(_CONSTS[name])
        if name == "jx":
            return self.jx()
        if name == "cm":
            self.expect("(")
            f = self.expr()
            self.expect(",")
            g = self.expr()
            self.expect(")")
            return mk_cm(f, g)
        if name in ("pr", "prs", "prc"):
            self.expect("(")
            f = self.expr()
            self.expect(";")
            g = self.expr()
            self.expect(")")
            variant = {
                "pr": None,
                "prs": PrVariant.STRICT,
                "prc": PrVariant.CAMPAGNOLO,
            }[name]
            return mk_pr(f, g, variant)
        if name == "mn":
            self.expect("(")
            body = self.expr()
            self.expect(")")
            return mk_mn(body)
        if name == "proj":
            self.expect("(")
            i = self.integer()
            self.expect(",")
            n = self.integer()
            self.expect(")")
            return stdlib.proj(i, n)
        if name == "lit":
            self.expect("(")
            q = self.rational()
            self.expect(")")
            return stdlib.rational_term(q)
        if name in _NAMES:
            return stdlib.build(name)
        self.error(f"unknown name {name!r}", at=at)

    def jx(self) -> Term:
        declared = None
        if self.peek() == "[":
            self.expect("[")
            declared = self.integer()
            self.expect("]")
        self.expect("(")
        children = []
        if self.peek() != ")":
            children.append(self.expr())
            while self.peek() == ",":
                self.expect(",")
                children.append(self.expr())
        self.expect(")")
        if not children and declared is None:
            self.error("empty juxtaposition needs a declared input arity jx[n]()")
        return mk_jx(children, declared)

    def parse(self) -> Term:
        t = self.expr()
        self.skip_ws()
        if self.pos != len(self.src):
            self.error("trailing input")
        return t


def parse(src: str) -> Term:
    """Parse surface syntax into a term (arity errors propagate)."""
    return _Parser(src).parse()


# ------------------------------------------------------------------ printing

_PRINTABLE = _NAMES | {"proj"}
_CONST_NAMES = {0: "zero", 1: "one", -1: "negone"}


def print_term(t: Term) -> str:
    """Canonical surface form; parsing it gives a structurally equal term."""
    if t.label is not None:
        name = t.label[0]
        if name == "proj":
            return f"proj({t.label[1]},{t.label[2]})"
        if name in _PRINTABLE:
            return name
    if isinstance(t, Const):
        return _CONST_NAMES[t.value]
    if isinstance(t, Jx):
        args = ",".join(print_term(c) for c in t.children)
        return f"jx[{t.input_arity}]({args})"
    if isinstance(t, Cm):
        return f"cm({print_term(t.outer)},{print_term(t.inner)})"
    if isinstance(t, Pr):
        tag = {None: "pr", PrVariant.STRICT: "prs", PrVariant.CAMPAGNOLO: "prc"}[
            t.variant
        ]
        return f"{tag}({print_term(t.init)};{print_term(t.step)})"
    if isinstance(t, Mn):
        return f"mn({print_term(t.body)})"
    raise TypeError(f"unknown term node {t!r}")
