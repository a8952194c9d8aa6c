"""Parser for the metric-expression language.

A metric file is a sequence of statements separated by ``;`` or newlines::

    # round unit 2-sphere
    dim = 2
    coords = (θ, φ)
    domain = ((0, pi), (0, 2*pi))
    g = [[1, 0],
         [0, sin(θ)^2]]

A submersion file wraps two such bodies in ``total { ... }`` and
``base { ... }`` blocks and adds ``pi = (<expr>, ...)`` written in the total
coordinates.  Expressions support real literals, identifiers, ``+ - * / ^``,
unary minus, parentheses, the constant ``pi`` and the functions listed in
:data:`FUNCTIONS`.  ``-x^2`` parses as ``-(x^2)``; ``^`` is right-associative.

Compiled expressions are plain Python closures over :mod:`subcurv.dual`
functions, so they accept floats, arrays and (nested) duals alike.
"""

import math
import re
from dataclasses import dataclass

from . import dual
from .errors import ArityError, ParseError, UnknownSymbol

FUNCTIONS = {
    "sin": dual.sin, "cos": dual.cos, "tan": dual.tan, "exp": dual.exp,
    "log": dual.log, "sqrt": dual.sqrt, "sinh": dual.sinh, "cosh": dual.cosh,
}
CONSTANTS = {"pi": math.pi}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[^\W\d]\w*)
  | (?P<op>[-+*/^()\[\]{},;=])
""", re.VERBOSE | re.UNICODE)


@dataclass(frozen=True)
class Token:
    kind: str   # num, ident, op, sep, eof
    text: str
    line: int
    col: int


def tokenize(text):
    """Split ``text`` into tokens; newlines inside brackets are whitespace."""
    tokens = []
    line, line_start, depth = 1, 0, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            if depth == 0:
                tokens.append(Token("sep", "\\n", line, col))
            line += 1
            line_start = m.end()
        elif kind in ("num", "ident"):
            tokens.append(Token(kind, tok, line, col))
        elif kind == "op":
            if tok in "([":
                depth += 1
            elif tok in ")]":
                depth = max(depth - 1, 0)
            tokens.append(Token("sep" if tok == ";" else "op", tok, line, col))
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("eof", "<end of input>", line, col))
    return tokens


# AST nodes are tuples: ("num", v) ("var", name) ("neg", a)
# ("bin", op, a, b) ("call", fname, a)


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message, expected=()):
        t = self.tok
        raise ParseError(f"{message}, found {t.text!r}", t.line, t.col, expected)

    def accept(self, text):
        if self.tok.kind in ("op", "sep") and self.tok.text == text:
            return self.advance()
        return None

    def expect(self, text):
        if not self.accept(text):
            self.error("syntax error", [repr(text)])

    def ident(self):
        if self.tok.kind != "ident":
            self.error("syntax error", ["identifier"])
        return self.advance()

    def skip_separators(self):
        while self.tok.kind == "sep":
            self.advance()

    # expressions -----------------------------------------------------------

    _ATOM_START = ["number", "identifier", "'('", "'-'", "'+'"]

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            return ("neg", self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return ("bin", "^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return ("num", float(t.text))
        if t.kind == "ident":
            self.advance()
            if self.accept("("):
                if t.text not in FUNCTIONS:
                    raise UnknownSymbol(
                        f"line {t.line}, column {t.col}: unknown function {t.text!r}")
                arg = self.expr()
                self.expect(")")
                return ("call", t.text, arg)
            return ("var", t.text, t.line, t.col)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error("expected an expression", self._ATOM_START)

    def tuple_of(self, item):
        self.expect("(")
        items = [item()]
        while self.accept(","):
            items.append(item())
        self.expect(")")
        return items

    def matrix(self):
        self.expect("[")
        rows = [self.row()]
        while self.accept(","):
            rows.append(self.row())
        self.expect("]")
        return rows

    def row(self):
        self.expect("[")
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect("]")
        return items

    # statements ------------------------------------------------------------

    def body(self, closing=None):
        """Parse statements until ``closing`` (a ``}``) or end of input."""
        stmts = {}
        blocks = {}
        while True:
            self.skip_separators()
            if closing and self.accept(closing):
                break
            if self.tok.kind == "eof":
                if closing:
                    self.error("unterminated block", [repr(closing)])
                break
            key = self.ident()
            if self.accept("{"):
                if closing:
                    raise ParseError("nested blocks are not allowed", key.line, key.col)
                blocks[key.text] = self.body("}")
                continue
            self.expect("=")
            if key.text in stmts:
                raise ParseError(f"duplicate statement {key.text!r}", key.line, key.col)
            stmts[key.text] = (key, self.value(key))
            if not (self.tok.kind in ("sep", "eof")
                    or (closing and self.tok.text == closing)):
                self.error("expected end of statement", ["';'", "newline"])
        return {"stmts": stmts, "blocks": blocks}

    def value(self, key):
        name = key.text
        if name == "dim":
            t = self.tok
            if t.kind != "num" or not re.fullmatch(r"\d+", t.text):
                self.error("dim must be a positive integer", ["integer"])
            self.advance()
            return int(t.text)
        if name == "coords":
            return [t.text for t in self.tuple_of(self.ident)]
        if name == "name":
            return self.ident().text
        if name == "g":
            return self.matrix()
        if name == "pi":
            return self.tuple_of(self.expr)
        if name == "domain":
            def interval():
                lo_hi = self.tuple_of(self.expr)
                if len(lo_hi) != 2:
                    raise ParseError("domain intervals need two bounds", key.line, key.col)
                return lo_hi
            return self.tuple_of(interval)
        raise ParseError(f"unknown statement {name!r}", key.line, key.col,
                         ["dim", "coords", "domain", "g", "name", "pi"])


def parse_expression(text):
    """Parse a single expression into an AST."""
    p = _Parser(text)
    node = p.expr()
    p.skip_separators()
    if p.tok.kind != "eof":
        p.error("trailing input", ["operator", "<end of input>"])
    return node


def free_names(node):
    kind = node[0]
    if kind == "var":
        return {node[1]}
    if kind == "num":
        return set()
    if kind == "neg" or kind == "call":
        return free_names(node[-1])
    return free_names(node[2]) | free_names(node[3])


def compile_expression(node, names):
    """Compile an AST into ``f(values)`` where ``values[i]`` binds ``names[i]``."""
    index = {n: i for i, n in enumerate(names)}

    def build(nd):
        kind = nd[0]
        if kind == "num":
            v = nd[1]
            return lambda xs: v
        if kind == "var":
            name = nd[1]
            if name in index:
                i = index[name]
                return lambda xs: xs[i]
            if name in CONSTANTS:
                c = CONSTANTS[name]
                return lambda xs: c
            raise UnknownSymbol(f"line {nd[2]}, column {nd[3]}: undeclared symbol {name!r}")
        if kind == "neg":
            a = build(nd[1])
            return lambda xs: -a(xs)
        if kind == "call":
            fn = FUNCTIONS[nd[1]]
            a = build(nd[2])
            return lambda xs: fn(a(xs))
        op, a, b = nd[1], build(nd[2]), build(nd[3])
        if op == "+":
            return lambda xs: a(xs) + b(xs)
        if op == "-":
            return lambda xs: a(xs) - b(xs)
        if op == "*":
            return lambda xs: a(xs) * b(xs)
        if op == "/":
            return lambda xs: a(xs) / b(xs)
        if nd[3][0] == "num" and float(nd[3][1]).is_integer():
            k = int(nd[3][1])
            return lambda xs: a(xs) ** k
        return lambda xs: a(xs) ** b(xs)

    return build(node)


def parse_document(text):
    """Parse a metric or submersion file into its raw statement tree."""
    return _Parser(text).body()


def constant_value(node):
    return float(compile_expression(node, [])(()))


class MetricFunction:
    """Callable ``x -> g(x)`` built from a matrix of compiled expressions."""

    def __init__(self, entries, names):
        self.dim = len(entries)
        self._fns = [[compile_expression(e, names) for e in row] for row in entries]

    def __call__(self, x):
        xs = [x[i] for i in range(len(x))]
        rows = [[f(xs) for f in row] for row in self._fns]
        return dual.asarray(rows)


class MapFunction:
    """Callable ``x -> (f_1(x), ..., f_b(x))`` from compiled expressions."""

    def __init__(self, exprs, names):
        self._fns = [compile_expression(e, names) for e in exprs]

    def __call__(self, x):
        xs = [x[i] for i in range(len(x))]
        return dual.stack([f(xs) for f in self._fns])


def check_square(entries, dim=None):
    n = len(entries)
    for r, row in enumerate(entries):
        if len(row) != n:
            raise ArityError(f"metric row {r} has {len(row)} entries, expected {n}")
    if dim is not None and dim != n:
        raise ArityError(f"dim={dim} but metric matrix is {n}x{n}")
    return n
