"""Text syntax for the meromorphic function class, and its printer.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" ["-"] INT)?
    atom   := INT | "Y" INT | "exp" "(" expr ")" | "(" expr ")"

Rationals are written ``p/q``.  Anything in a denominator must factor into
linear forms, ``exp(linear)``, ``(1 - exp(linear))`` or ``(exp(linear) - 1)``
and rational constants; exponents must be linear forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .numkernel import LinearForm, Poly, format_linear, frac_str
from .residue import MeroFunction, MeroTerm

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>Y(?P<idx>\d+))|(?P<exp>exp)|(?P<op>[-+*/^()]))")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExprValueError(ValueError):
    """Well-formed text that does not denote a function of the supported class."""


@dataclass
class _Node:
    kind: str
    args: tuple
    pos: int


def _tokenize(text: str) -> list:
    out = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ExprSyntaxError(f"unexpected character {text[i]!r}", i)
        start = m.start() + len(m.group(0)) - len(m.group(0).lstrip())
        if m.group("num"):
            out.append(("num", int(m.group("num")), start))
        elif m.group("var"):
            idx = int(m.group("idx"))
            if idx < 1:
                raise ExprSyntaxError("variables are numbered from Y1", start)
            out.append(("var", idx, start))
        elif m.group("exp"):
            out.append(("exp", None, start))
        else:
            out.append(("op", m.group("op"), start))
        i = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ExprSyntaxError(f"expected {op!r}", tok[2])

    def parse(self) -> _Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError("unexpected trailing input", tok[2])
        return node

    def expr(self) -> _Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, pos = self.take()
            node = _Node("add" if op == "+" else "sub", (node, self.term()), pos)
        return node

    def term(self) -> _Node:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, pos = self.take()
            node = _Node("mul" if op == "*" else "div", (node, self.unary()), pos)
        return node

    def unary(self) -> _Node:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return _Node("neg", (self.unary(),), tok[2])
        return self.power()

    def power(self) -> _Node:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            n = self.take()
            if n[0] != "num":
                raise ExprSyntaxError("exponent must be an integer literal", n[2])
            return _Node("pow", (base, sign * n[1]), tok[2])
        return base

    def atom(self) -> _Node:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return _Node("num", (Fraction(val),), pos)
        if kind == "var":
            return _Node("var", (val,), pos)
        if kind == "exp":
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return _Node("exp", (arg,), pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError("expected a number, variable, exp( or (", pos)


def _max_var(node: _Node) -> int:
    if node.kind == "var":
        return node.args[0]
    return max((_max_var(a) for a in node.args if isinstance(a, _Node)), default=0)


class _Builder:
    def __init__(self, nvars: int):
        self.r = nvars

    # linear forms (no constant term) ---------------------------------------
    def constant(self, node: _Node):
        """Rational value of a constant subtree, else None."""
        k = node.kind
        if k == "num":
            return node.args[0]
        if k == "neg":
            v = self.constant(node.args[0])
            return None if v is None else -v
        if k in ("add", "sub", "mul", "div"):
            a, b = self.constant(node.args[0]), self.constant(node.args[1])
            if a is None or b is None:
                return None
            if k == "add":
                return a + b
            if k == "sub":
                return a - b
            if k == "mul":
                return a * b
            if b == 0:
                raise ExprValueError(f"division by zero at position {node.pos}")
            return a / b
        if k == "pow":
            v = self.constant(node.args[0])
            if v is None:
                return None
            if v == 0 and node.args[1] < 0:
                raise ExprValueError(f"division by zero at position {node.pos}")
            return v ** node.args[1]
        return None

    def linear(self, node: _Node):
        """LinearForm for a homogeneous linear subtree, else None."""
        k = node.kind
        if k == "var":
            return LinearForm.coordinate(node.args[0] - 1, self.r)
        if k == "neg":
            f = self.linear(node.args[0])
            return None if f is None else -f
        if k in ("add", "sub"):
            a, b = self.linear(node.args[0]), self.linear(node.args[1])
            if a is None or b is None:
                ca, cb = self.constant(node.args[0]), self.constant(node.args[1])
                if (a is not None and cb == 0) or (b is not None and ca == 0):
                    return a if a is not None else (b if k == "add" else -b)
                return None
            return a + b if k == "add" else a - b
        if k == "mul":
            for x, y in ((0, 1), (1, 0)):
                c = self.constant(node.args[x])
                if c is not None:
                    f = self.linear(node.args[y])
                    return None if f is None else f.scale(c)
            return None
        if k == "div":
            c = self.constant(node.args[1])
            if c is None:
                return None
            if c == 0:
                raise ExprValueError(f"division by zero at position {node.pos}")
            f = self.linear(node.args[0])
            return None if f is None else f.scale(1 / c)
        if k == "num" and node.args[0] == 0:
            return LinearForm.zero(self.r)
        return None

    def exponent(self, node: _Node) -> LinearForm:
        f = self.linear(node.args[0])
        if f is None:
            c = self.constant(node.args[0])
            if c == 0:
                return LinearForm.zero(self.r)
            raise ExprValueError(f"exp() at position {node.pos} needs a linear form without constant term")
        return f

    # numerator context -----------------------------------------------------
    def mero(self, node: _Node) -> MeroFunction:
        k = node.kind
        r = self.r
        if k == "num":
            return MeroFunction.constant(node.args[0], r)
        if k == "var":
            return MeroFunction.from_poly(LinearForm.coordinate(node.args[0] - 1, r).to_poly())
        if k == "neg":
            return -self.mero(node.args[0])
        if k == "add":
            return self.mero(node.args[0]) + self.mero(node.args[1])
        if k == "sub":
            return self.mero(node.args[0]) - self.mero(node.args[1])
        if k == "mul":
            return self.mero(node.args[0]) * self.mero(node.args[1])
        if k == "exp":
            return MeroFunction.build(r, 1, self.exponent(node).coeffs)
        if k == "div":
            return self.mero(node.args[0]) * self.factored(node.args[1]).inverse(r)
        if k == "pow":
            base, n = node.args
            if n < 0:
                return self.factored(base).power(-n).inverse(r)
            out = MeroFunction.constant(1, r)
            b = self.mero(base)
            for _ in range(n):
                out = out * b
            return out
        raise AssertionError(k)

    # denominator context ---------------------------------------------------
    def factored(self, node: _Node) -> "_Factored":
        c = self.constant(node)
        if c is not None:
            if c == 0:
                raise ExprValueError(f"division by zero at position {node.pos}")
            return _Factored(c)
        f = self.linear(node)
        if f is not None:
            if f.is_zero():
                raise ExprValueError(f"zero linear form in a denominator at position {node.pos}")
            return _Factored(Fraction(1), {f: 1})
        k = node.kind
        if k == "neg":
            return self.factored(node.args[0]).times(_Factored(Fraction(-1)))
        if k == "mul":
            return self.factored(node.args[0]).times(self.factored(node.args[1]))
        if k == "div":
            return self.factored(node.args[0]).times(self.factored(node.args[1]).power(-1))
        if k == "pow":
            return self.factored(node.args[0]).power(node.args[1])
        if k == "exp":
            return _Factored(Fraction(1), exp=self.exponent(node))
        if k in ("add", "sub"):
            m = self.mero(node)
            pat = _one_minus_exp(m)
            if pat is not None:
                scale, beta = pat
                return _Factored(scale, expden={beta: 1})
        raise ExprValueError(f"denominator at position {node.pos} is not a product of linear forms, "
                             "exp(linear) and (1 - exp(linear)) factors")


def _one_minus_exp(m: MeroFunction):
    """Match ``c - c exp(b)``; returns ``(c, b)`` or None."""
    if len(m.terms) != 2:
        return None
    const = expo = None
    for t in m.terms:
        if t.linear_denoms or t.expden:
            return None
        v = t.numerator.constant_value()
        if v is None:
            return None
        if t.exp_form.is_zero():
            const = v
        else:
            expo = (v, t.exp_form)
    if const is None or expo is None or expo[0] != -const:
        return None
    return const, expo[1]


@dataclass
class _Factored:
    const: Fraction
    linear: dict = None
    expden: dict = None
    exp: LinearForm = None

    def __post_init__(self):
        self.linear = dict(self.linear or {})
        self.expden = dict(self.expden or {})

    def times(self, other: "_Factored") -> "_Factored":
        lin = dict(self.linear)
        for f, k in other.linear.items():
            lin[f] = lin.get(f, 0) + k
        exd = dict(self.expden)
        for f, k in other.expden.items():
            exd[f] = exd.get(f, 0) + k
        if self.exp is None:
            ex = other.exp
        elif other.exp is None:
            ex = self.exp
        else:
            ex = self.exp + other.exp
        return _Factored(self.const * other.const, lin, exd, ex)

    def power(self, n: int) -> "_Factored":
        return _Factored(self.const ** n, {f: k * n for f, k in self.linear.items()},
                         {f: k * n for f, k in self.expden.items()}, None if self.exp is None else self.exp.scale(n))

    def inverse(self, r: int) -> MeroFunction:
        """``1 / self`` as a MeroFunction; negative multiplicities move up."""
        num = Poly.const(1 / self.const, r)
        lin, exd = [], []
        upstairs = MeroFunction.constant(1, r)
        for f, k in self.linear.items():
            if k > 0:
                lin.append((f, k))
            elif k < 0:
                num = num * f.to_poly() ** (-k)
        for f, k in self.expden.items():
            if k > 0:
                exd.append((f, k))
            elif k < 0:
                one_minus = MeroFunction.constant(1, r) - MeroFunction.build(r, 1, f.coeffs)
                for _ in range(-k):
                    upstairs = upstairs * one_minus
        ex = LinearForm.zero(r) if self.exp is None else -self.exp
        base = MeroFunction([MeroTerm(num, ex, tuple(lin), tuple(exd))], r)
        return base * upstairs


def parse_mero_expression(text: str, nvars: int | None = None) -> MeroFunction:
    """Parse ``text`` into a MeroFunction in ``nvars`` variables.

    ``nvars`` defaults to the largest variable index that occurs (at least 1).
    """
    tree = _Parser(text).parse()
    used = _max_var(tree)
    if nvars is None:
        nvars = max(used, 1)
    if used > nvars:
        raise ExprValueError(f"expression uses Y{used} but only {nvars} variables are declared")
    return _Builder(nvars).mero(tree)


# --------------------------------------------------------------------------
# printer
# --------------------------------------------------------------------------

def _monomial(e: tuple, c: Fraction) -> str:
    vars_ = [f"Y{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
    mag = abs(c)
    parts = ([] if mag == 1 and vars_ else [frac_str(mag)]) + vars_
    body = "*".join(parts)
    return body if c > 0 else "-" + body


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    items = sorted(p.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-x for x in kv[0])))
    out = ""
    for i, (e, c) in enumerate(items):
        s = _monomial(e, c)
        if i == 0:
            out = s
        elif s.startswith("-"):
            out += " - " + s[1:]
        else:
            out += " + " + s
    return out


def _den_base(f: LinearForm) -> str:
    body = format_linear(f.coeffs)
    return body if len(f.support()) == 1 and f.coeffs[f.support()[0]] == 1 else f"({body})"


def _print_key(item) -> tuple:
    """Coordinate forms first (Y1, Y2, ...), then wider forms by support."""
    f = item[0]
    return (len(f.support()), f.support(), tuple(-c for c in f.coeffs))


def _format_term(t: MeroTerm) -> str:
    num = format_poly(t.numerator)
    if len(t.numerator.terms) > 1:
        num = f"({num})"
    if t.exp_form.is_zero():
        s = num
    else:
        ex = f"exp({format_linear(t.exp_form.coeffs)})"
        s = ex if num == "1" else "-" + ex if num == "-1" else f"{num}*{ex}"
    dens = []
    for f, k in sorted(t.linear_denoms, key=_print_key):
        dens.append(_den_base(f) + (f"^{k}" if k > 1 else ""))
    for f, k in t.expden:
        dens.append(f"(1 - exp({format_linear(f.coeffs)}))" + (f"^{k}" if k > 1 else ""))
    if len(dens) == 1 and not dens[0].startswith("(") and "^" not in dens[0]:
        s += "/" + dens[0]
    elif dens:
        s += "/(" + "*".join(dens) + ")"
    return s


def format_mero(f: MeroFunction) -> str:
    if not f.terms:
        return "0"
    out = ""
    for i, t in enumerate(f.terms):
        s = _format_term(t)
        if i == 0:
            out = s
        elif s.startswith("-") and len(t.numerator.terms) == 1:
            out += " - " + s[1:]
        else:
            out += " + " + s
    return out
