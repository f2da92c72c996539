"""
Exprdsl
Closed-form function text -> expression tree -> vectorised evaluation, plus the
numeric separability detector for kernels Omega(y, x) = f(y/(x+y)) g(x+y).

Grammar
    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('-' | '+') unary | power
    power := atom ('^' unary)?
    atom  := number | constant | variable | function '(' expr ')' | '(' expr ')'

Variables: u (one variable, over (0,1)), r (one variable, over (0,inf)),
x and y (two variables). Constants: pi, e.
Functions: exp, log, sqrt, sin, cos, arctan.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from pygengamma.errors import EvalError, ParseError, ZeroProbe

logger = logging.getLogger(__name__)

_NUMERIC_REGEXP = re.compile(r"(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)")
_IDENT_REGEXP = re.compile(r"[a-z]+")
_OPERATORS = "+-*/^()"

CONSTANTS = {"pi": np.pi, "e": np.e}
FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "arctan": np.arctan,
}
BINARY = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}
ONE_VARIABLE = ("u", "r")
TWO_VARIABLES = ("x", "y")


"""
Expression tree -----------------------------------------------------------------------------------
"""


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a function name
    arg: object

    def __str__(self):
        if self.op == "neg":
            return "(-{})".format(self.arg)
        return "{}({})".format(self.op, self.arg)


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object

    def __str__(self):
        return "({} {} {})".format(self.left, self.op, self.right)


@dataclass(frozen=True)
class Expr:
    """Parsed expression: the tree, its variables and its arity (0, 1 or 2)."""

    root: object
    variables: frozenset
    arity: int
    text: str = ""

    def __str__(self):
        return str(self.root)


"""
Parser --------------------------------------------------------------------------------------------
"""


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        match = _NUMERIC_REGEXP.match(text, i)
        if match:
            tokens.append(("num", match.group(1), i))
            i = match.end()
            continue
        match = _IDENT_REGEXP.match(text, i)
        if match:
            tokens.append(("ident", match.group(0), i))
            i = match.end()
            continue
        if ch in _OPERATORS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ParseError("unexpected character '{}'".format(ch), position=i, text=text)
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = set()

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, value):
        kind, tok, where = self.take()
        if tok != value:
            found = tok or "end of input"
            raise ParseError("expected '{}' but found '{}'".format(value, found), position=where, text=self.text)

    def parse(self):
        node = self.expr()
        kind, tok, where = self.peek()
        if kind != "end":
            raise ParseError("unexpected '{}'".format(tok), position=where, text=self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        kind, tok, _ = self.peek()
        if kind == "op" and tok == "-":
            self.take()
            return Unary("neg", self.unary())
        if kind == "op" and tok == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, tok, _ = self.peek()
        if kind == "op" and tok == "^":
            self.take()
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        kind, tok, where = self.take()
        if kind == "num":
            return Num(float(tok))
        if kind == "ident":
            if tok in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok, arg)
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                raise ParseError("unknown function '{}'".format(tok), position=where, text=self.text)
            if tok in CONSTANTS:
                return Const(tok)
            if tok in ONE_VARIABLE or tok in TWO_VARIABLES:
                self.variables.add(tok)
                return Var(tok)
            raise ParseError("unknown identifier '{}'".format(tok), position=where, text=self.text)
        if kind == "op" and tok == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = tok or "end of input"
        raise ParseError("unexpected '{}'".format(found), position=where, text=self.text)


def parse(text):
    """
    Parse function text into an Expr.

    The arity is fixed here: 2 when x or y appear, 1 when u or r appear,
    0 for constant expressions. Mixing the variable families is an error.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", position=0, text=text)
    parser = _Parser(text)
    root = parser.parse()
    names = frozenset(parser.variables)
    one = names & set(ONE_VARIABLE)
    two = names & set(TWO_VARIABLES)
    if one and two:
        raise ParseError("expression mixes one-variable ({}) and two-variable ({}) names".format(
            ", ".join(sorted(one)), ", ".join(sorted(two))), text=text)
    if len(one) > 1:
        raise ParseError("a one-variable expression uses either u or r, not both", text=text)
    arity = 2 if two else (1 if one else 0)
    return Expr(root=root, variables=names, arity=arity, text=text)


"""
Evaluation ----------------------------------------------------------------------------------------
"""


def _eval_node(node, env, strict):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        if node.name not in env:
            raise EvalError("variable '{}' is not bound".format(node.name), node=node)
        return env[node.name]
    if isinstance(node, Unary):
        arg = _eval_node(node.arg, env, strict)
        with np.errstate(all="ignore"):
            out = np.negative(arg) if node.op == "neg" else FUNCTIONS[node.op](arg)
    else:
        left = _eval_node(node.left, env, strict)
        right = _eval_node(node.right, env, strict)
        with np.errstate(all="ignore"):
            out = BINARY[node.op](np.asarray(left, dtype=float), right)
    if strict and not np.all(np.isfinite(out)):
        raise EvalError("non-finite value in '{}'".format(node), node=node)
    return out


def evaluate(e, env, strict=True):
    """
    Evaluate an Expr for the bindings in env (scalars or numpy arrays).

    With strict=True a non-finite intermediate raises EvalError naming the
    offending node (log of a nonpositive number, division by zero, 0^negative);
    with strict=False non-finite values are returned as they are.
    """
    missing = set(e.variables) - set(env)
    if missing:
        raise EvalError("environment does not bind {}".format(", ".join(sorted(missing))), node=e.root)
    out = _eval_node(e.root, env, strict)
    if isinstance(out, np.ndarray) and out.ndim == 0:
        return float(out)
    return out if isinstance(out, np.ndarray) else float(out)


# alias
eval = evaluate


"""
Function specifications ---------------------------------------------------------------------------
"""

BUILTINS = ("one",)


@dataclass(frozen=True)
class FuncSpec:
    """
    A real function of one or two variables.

    Exactly one of `expr`, `builtin` or `evaluator` is set. Two variable
    functions are always called as f(y, x).
    """

    arity: int
    expr: Optional[Expr] = None
    builtin: Optional[str] = None
    evaluator: Optional[Callable] = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError("arity must be 1 or 2, got {}".format(self.arity))
        given = [v is not None for v in (self.expr, self.builtin, self.evaluator)]
        if sum(given) != 1:
            raise ValueError("exactly one of expr, builtin, evaluator must be given")
        if self.builtin is not None and self.builtin not in BUILTINS:
            raise ValueError("unknown builtin '{}'".format(self.builtin))
        if self.expr is not None and self.expr.arity not in (0, self.arity):
            raise ParseError("'{}' has {} variable(s) but a {}-variable function was expected".format(
                self.expr.text, self.expr.arity, self.arity), text=self.expr.text)

    @classmethod
    def from_text(cls, text, arity):
        return cls(arity=arity, expr=parse(text), label=text.strip())

    @classmethod
    def one(cls, arity=1):
        return cls(arity=arity, builtin="one", label="1")

    @classmethod
    def from_callable(cls, func, arity=1, label=""):
        return cls(arity=arity, evaluator=func, label=label or getattr(func, "__name__", "callable"))

    @property
    def __name__(self):
        return self.label or str(self.expr)

    @property
    def is_one(self):
        if self.builtin == "one":
            return True
        return self.expr is not None and isinstance(self.expr.root, Num) and self.expr.root.value == 1.0

    def __call__(self, *args):
        if len(args) != self.arity:
            raise EvalError("{} expects {} argument(s), got {}".format(self.__name__, self.arity, len(args)))
        args = [np.asarray(a, dtype=float) for a in args]
        shape = np.broadcast(*args).shape
        if self.builtin == "one":
            return np.ones(shape)
        if self.evaluator is not None:
            out = self.evaluator(*args)
        else:
            if self.arity == 1:
                env = {name: args[0] for name in ONE_VARIABLE}
            else:
                env = {"y": args[0], "x": args[1]}
            out = _eval_node(self.expr.root, env, strict=False)
        return np.broadcast_to(np.asarray(out, dtype=float), shape)

    def __str__(self):
        return self.__name__


def as_funcspec(value, arity):
    """Accept FuncSpec, expression text, a callable or None (constant one)."""
    if value is None:
        return FuncSpec.one(arity)
    if isinstance(value, FuncSpec):
        return value
    if isinstance(value, str):
        return FuncSpec.from_text(value, arity)
    if callable(value):
        return FuncSpec.from_callable(value, arity)
    raise TypeError("cannot build a function from {!r}".format(value))


"""
Separability detection ----------------------------------------------------------------------------
"""


@dataclass
class SeparabilityReport:
    separable: bool
    certified: bool
    f_extracted: Optional[FuncSpec]
    g_extracted: Optional[FuncSpec]
    max_residual: float
    probes: int
    tol: float
    anchor: Tuple[float, float] = (0.5, 1.0)
    reason: str = ""

    def as_dict(self):
        return {
            "separable": self.separable,
            "certified": self.certified,
            "max_residual": self.max_residual,
            "probes": self.probes,
            "tol": self.tol,
            "anchor": list(self.anchor),
            "reason": self.reason,
        }


def us_values(Omega, u, s):
    """Omega(y, x) in (u, s) coordinates: y = s u, x = s (1 - u)."""
    return Omega(s * u, s * (1.0 - u))


def probe_grid(grid, anchor=(0.5, 1.0)):
    """Chebyshev points in (0,1) and log-spaced points in [0.1, 20], anchor included."""
    cheb = 0.5 * (np.polynomial.chebyshev.chebpts1(grid) + 1.0)
    u = np.unique(np.append(cheb, anchor[0]))
    s = np.unique(np.append(np.geomspace(0.1, 20.0, grid), anchor[1]))
    return u, s


def cross_ratio_residual(W):
    """
    max over probe pairs of |W11 W22 - W12 W21| / (|W11 W22| + |W12 W21|),
    W[i, j] holding the kernel at (u_i, s_j).
    """
    a = W[:, None, :, None] * W[None, :, None, :]
    b = W[:, None, None, :] * W[None, :, :, None]
    scale = np.abs(a) + np.abs(b)
    with np.errstate(all="ignore"):
        ratio = np.where(scale > 0, np.abs(a - b) / scale, 0.0)
    return float(ratio.max())


def detect_separable(Omega, tol=1e-9, grid=8, anchor=(0.5, 1.0), strict=False):
    """
    Decide numerically whether Omega(y, x) = f(y/(x+y)) g(x+y).

    The kernel is sampled on a grid x grid probe set in (u, s) coordinates
    and certified separable when every cross ratio vanishes within tol.
    On success f(u) = Omega~(u, s0) and g(s) = Omega~(u0, s) / Omega~(u0, s0)
    are returned as numeric FuncSpecs.

    A kernel vanishing at a probe point cannot be certified either way: the
    report says certified=False (or ZeroProbe is raised when strict).
    """
    Omega = as_funcspec(Omega, 2)
    u, s = probe_grid(grid, anchor)
    W = np.asarray(us_values(Omega, u[:, None], s[None, :]), dtype=float)
    probes = W.size
    if not np.all(np.isfinite(W)):
        raise EvalError("kernel {} is not finite on the probe grid".format(Omega), node=Omega.expr)
    zeros = np.argwhere(W == 0.0)
    if zeros.size:
        i, j = zeros[0]
        reason = "kernel vanishes at probe (u, s) = ({:.6g}, {:.6g})".format(u[i], s[j])
        if strict:
            raise ZeroProbe(reason)
        logger.debug("separability of %s not certified: %s", Omega, reason)
        return SeparabilityReport(False, False, None, None, float("nan"), probes, tol, tuple(anchor), reason)

    residual = cross_ratio_residual(W)
    if residual > tol:
        return SeparabilityReport(False, True, None, None, residual, probes, tol, tuple(anchor),
                                  "cross ratio residual above tolerance")
    f_ext, g_ext = extract_factors(Omega, anchor)
    return SeparabilityReport(True, True, f_ext, g_ext, residual, probes, tol, tuple(anchor), "")


def extract_factors(Omega, anchor=(0.5, 1.0), c=1.0):
    u0, s0 = anchor
    norm = float(us_values(Omega, u0, s0))
    if norm == 0.0:
        raise ZeroProbe("kernel vanishes at the anchor ({}, {})".format(u0, s0))
    label = str(Omega)

    def f_part(u):
        return us_values(Omega, u, s0) / c

    def g_part(s):
        return c * us_values(Omega, u0, s) / norm

    f_ext = FuncSpec.from_callable(f_part, arity=1, label="f[{}]".format(label))
    g_ext = FuncSpec.from_callable(g_part, arity=1, label="g[{}]".format(label))
    return f_ext, g_ext


def extraction_residual(Omega, f_ext, g_ext, grid=8, anchor=(0.5, 1.0)):
    """max |f(u) g(s) - Omega~(u, s)| / (1 + |Omega~|) over the probe grid."""
    u, s = probe_grid(grid, anchor)
    W = us_values(Omega, u[:, None], s[None, :])
    approx = f_ext(u)[:, None] * g_ext(s)[None, :]
    return float(np.max(np.abs(approx - W) / (1.0 + np.abs(W))))
