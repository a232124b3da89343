"""Expression front end: tokenize, parse, evaluate, differentiate.

Grammar (EBNF):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | 't' | 's' | 'pi' | 'e' | fn '(' expr ')' | '(' expr ')'

so '^' is right-associative and binds tighter than unary minus, which in
turn binds tighter than '*' and '/'. Functions are sin, cos, exp, log and
sqrt. 'pi' and 'e' are named constants. Numbers require a digit before any
decimal point ("2.5", "1e-3"; not ".5").

Evaluation accepts scalars or numpy arrays. Differentiation is symbolic
(product/quotient/chain rules) followed by constant-folding simplification;
`to_bivariate` packages an expression together with its exact mixed partial
for the rest of the system.

The seeded polynomial corpus used by the verification harness also lives
here, driven by an explicit xorshift64* generator so that corpora are
reproducible from a single integer seed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BivariateFunction, EngineError, UnivariateFunction

__all__ = [
    "LexError",
    "ParseError",
    "DomainError",
    "UnsupportedDerivative",
    "Token",
    "ExprNode",
    "Const",
    "Var",
    "Unary",
    "Binary",
    "FUNCTIONS",
    "tokenize",
    "parse",
    "parse_expression",
    "eval_expr",
    "differentiate",
    "simplify",
    "to_string",
    "to_bivariate",
    "to_univariate",
    "XorShift64Star",
    "derive_seed",
    "random_polynomial",
    "random_polynomial_1d",
]


class LexError(EngineError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class ParseError(EngineError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class DomainError(EngineError):
    """Evaluation left the real domain (log <= 0, sqrt < 0, 0^negative, ...)."""


class UnsupportedDerivative(EngineError):
    """Derivative of '^' with a non-constant exponent over a base that is
    not provably positive."""


# ---------------------------------------------------------------------------
# tokens
# ---------------------------------------------------------------------------

NUMBER = "number"
IDENT = "ident"
OP = "op"
LPAREN = "lparen"
RPAREN = "rparen"
COMMA = "comma"

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")

_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    """Longest-match tokens; whitespace skipped; LexError on anything else."""
    out: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            m = _NUMBER_RE.match(text, i)
            out.append(Token(NUMBER, m.group(), i))
            i = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _IDENT_RE.match(text, i)
            out.append(Token(IDENT, m.group(), i))
            i = m.end()
            continue
        if ch in "+-*/^":
            out.append(Token(OP, ch, i))
        elif ch == "(":
            out.append(Token(LPAREN, ch, i))
        elif ch == ")":
            out.append(Token(RPAREN, ch, i))
        elif ch == ",":
            out.append(Token(COMMA, ch, i))
        else:
            raise LexError(f"unexpected character {ch!r}", i)
        i += 1
    return out


# ---------------------------------------------------------------------------
# syntax tree
# ---------------------------------------------------------------------------


class ExprNode:
    """Base class for expression nodes; instances are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(ExprNode):
    value: float


@dataclass(frozen=True)
class Var(ExprNode):
    name: str  # "t" or "s"


@dataclass(frozen=True)
class Unary(ExprNode):
    op: str  # "neg" or a function name
    child: ExprNode


@dataclass(frozen=True)
class Binary(ExprNode):
    op: str  # one of + - * / ^
    left: ExprNode
    right: ExprNode


_ZERO = Const(0.0)
_ONE = Const(1.0)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def _peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _position(self) -> int:
        tok = self._peek()
        if tok is not None:
            return tok.position
        if self.tokens:
            last = self.tokens[-1]
            return last.position + len(last.text)
        return 0

    def _advance(self) -> Token:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._position())
        self.pos += 1
        return tok

    def _match_op(self, *ops: str) -> Optional[Token]:
        tok = self._peek()
        if tok is not None and tok.kind == OP and tok.text in ops:
            self.pos += 1
            return tok
        return None

    def parse(self) -> ExprNode:
        if not self.tokens:
            raise ParseError("empty expression", 0)
        node = self.expr()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok.text!r}", tok.position)
        return node

    def expr(self) -> ExprNode:
        node = self.term()
        while True:
            tok = self._match_op("+", "-")
            if tok is None:
                return node
            node = Binary(tok.text, node, self.term())

    def term(self) -> ExprNode:
        node = self.factor()
        while True:
            tok = self._match_op("*", "/")
            if tok is None:
                return node
            node = Binary(tok.text, node, self.factor())

    def factor(self) -> ExprNode:
        if self._match_op("-"):
            return Unary("neg", self.factor())
        return self.power()

    def power(self) -> ExprNode:
        base = self.atom()
        if self._match_op("^"):
            return Binary("^", base, self.factor())
        return base

    def atom(self) -> ExprNode:
        tok = self._peek()
        if tok is None:
            raise ParseError("expected a value", self._position())
        if tok.kind == NUMBER:
            self._advance()
            return Const(float(tok.text))
        if tok.kind == IDENT:
            self._advance()
            name = tok.text
            if name in ("t", "s"):
                return Var(name)
            if name == "pi":
                return Const(math.pi)
            if name == "e":
                return Const(math.e)
            if name in FUNCTIONS:
                opening = self._peek()
                if opening is None or opening.kind != LPAREN:
                    raise ParseError(
                        f"function {name!r} must be followed by '('", self._position()
                    )
                self._advance()
                arg = self.expr()
                closing = self._peek()
                if closing is None or closing.kind != RPAREN:
                    raise ParseError("expected ')'", self._position())
                self._advance()
                return Unary(name, arg)
            raise ParseError(f"unknown identifier {name!r}", tok.position)
        if tok.kind == LPAREN:
            self._advance()
            node = self.expr()
            closing = self._peek()
            if closing is None or closing.kind != RPAREN:
                raise ParseError("expected ')'", self._position())
            self._advance()
            return node
        raise ParseError(f"unexpected {tok.text!r}", tok.position)


def parse(tokens: list[Token]) -> ExprNode:
    return _Parser(tokens).parse()


def parse_expression(text: str) -> ExprNode:
    return parse(tokenize(text))


# ---------------------------------------------------------------------------
# evaluation (scalars or numpy arrays)
# ---------------------------------------------------------------------------


def _eval(e: ExprNode, t, s):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return t if e.name == "t" else s
    if isinstance(e, Unary):
        v = _eval(e.child, t, s)
        if e.op == "neg":
            return -v
        if e.op == "sin":
            return np.sin(v)
        if e.op == "cos":
            return np.cos(v)
        if e.op == "exp":
            return np.exp(v)
        if e.op == "log":
            if np.any(np.asarray(v) <= 0.0):
                raise DomainError("log of a non-positive value")
            return np.log(v)
        if e.op == "sqrt":
            if np.any(np.asarray(v) < 0.0):
                raise DomainError("sqrt of a negative value")
            return np.sqrt(v)
        raise AssertionError(f"unknown unary op {e.op!r}")
    if isinstance(e, Binary):
        lv = _eval(e.left, t, s)
        rv = _eval(e.right, t, s)
        if e.op == "+":
            return lv + rv
        if e.op == "-":
            return lv - rv
        if e.op == "*":
            return lv * rv
        if e.op == "/":
            if np.any(np.asarray(rv) == 0.0):
                raise DomainError("division by zero")
            return lv / rv
        if e.op == "^":
            base = np.asarray(lv)
            expo = np.asarray(rv)
            if np.any(base < 0.0) and not np.all(expo == np.floor(expo)):
                raise DomainError("negative base with a non-integer exponent")
            if np.any((base == 0.0) & (expo < 0.0)):
                raise DomainError("zero raised to a negative power")
            return np.power(lv, rv)
        raise AssertionError(f"unknown binary op {e.op!r}")
    raise AssertionError(f"unknown node {e!r}")


def eval_expr(e: ExprNode, t: float, s: float) -> float:
    return float(_eval(e, float(t), float(s)))


# ---------------------------------------------------------------------------
# differentiation and simplification
# ---------------------------------------------------------------------------


def _is_const(e: ExprNode, value: Optional[float] = None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def _provably_positive(e: ExprNode) -> bool:
    # deliberately conservative: enough for exp-rebased power derivatives
    if isinstance(e, Const):
        return e.value > 0.0
    if isinstance(e, Unary) and e.op == "exp":
        return True
    return False


def _diff(e: ExprNode, var: str) -> ExprNode:
    if isinstance(e, Const):
        return _ZERO
    if isinstance(e, Var):
        return _ONE if e.name == var else _ZERO
    if isinstance(e, Unary):
        du = _diff(e.child, var)
        u = e.child
        if e.op == "neg":
            return Unary("neg", du)
        if e.op == "sin":
            return Binary("*", Unary("cos", u), du)
        if e.op == "cos":
            return Unary("neg", Binary("*", Unary("sin", u), du))
        if e.op == "exp":
            return Binary("*", Unary("exp", u), du)
        if e.op == "log":
            return Binary("/", du, u)
        if e.op == "sqrt":
            return Binary("/", du, Binary("*", Const(2.0), Unary("sqrt", u)))
        raise AssertionError(f"unknown unary op {e.op!r}")
    if isinstance(e, Binary):
        if e.op in ("+", "-"):
            return Binary(e.op, _diff(e.left, var), _diff(e.right, var))
        if e.op == "*":
            return Binary(
                "+",
                Binary("*", _diff(e.left, var), e.right),
                Binary("*", e.left, _diff(e.right, var)),
            )
        if e.op == "/":
            num = Binary(
                "-",
                Binary("*", _diff(e.left, var), e.right),
                Binary("*", e.left, _diff(e.right, var)),
            )
            return Binary("/", num, Binary("^", e.right, Const(2.0)))
        if e.op == "^":
            base, expo = e.left, e.right
            if isinstance(expo, Const):
                n = expo.value
                power = Binary("^", base, Const(n - 1.0))
                return Binary(
                    "*", Binary("*", Const(n), power), _diff(base, var)
                )
            if _provably_positive(base):
                # b^e = exp(e log b):  d = b^e (e' log b + e b'/b)
                inner = Binary(
                    "+",
                    Binary("*", _diff(expo, var), Unary("log", base)),
                    Binary("*", expo, Binary("/", _diff(base, var), base)),
                )
                return Binary("*", e, inner)
            raise UnsupportedDerivative(
                "cannot differentiate '^' with a non-constant exponent over a "
                "base that may be negative"
            )
        raise AssertionError(f"unknown binary op {e.op!r}")
    raise AssertionError(f"unknown node {e!r}")


def _fold_unary(op: str, value: float) -> Optional[float]:
    try:
        if op == "neg":
            return -value
        if op == "sin":
            return math.sin(value)
        if op == "cos":
            return math.cos(value)
        if op == "exp":
            return math.exp(value)
        if op == "log":
            return math.log(value) if value > 0.0 else None
        if op == "sqrt":
            return math.sqrt(value) if value >= 0.0 else None
    except (OverflowError, ValueError):
        return None
    raise AssertionError(f"unknown unary op {op!r}")


def _fold_binary(op: str, a: float, b: float) -> Optional[float]:
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b if b != 0.0 else None
        if op == "^":
            if a < 0.0 and b != math.floor(b):
                return None
            if a == 0.0 and b < 0.0:
                return None
            return float(a**b)
    except (OverflowError, ValueError):
        return None
    raise AssertionError(f"unknown binary op {op!r}")


def simplify(e: ExprNode) -> ExprNode:
    """Constant folding plus the unit laws x*1, x+0, x-0, x^1, x^0, x*0."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Unary):
        child = simplify(e.child)
        if isinstance(child, Const):
            folded = _fold_unary(e.op, child.value)
            if folded is not None and math.isfinite(folded):
                return Const(folded)
        return Unary(e.op, child)
    assert isinstance(e, Binary)
    left = simplify(e.left)
    right = simplify(e.right)
    if isinstance(left, Const) and isinstance(right, Const):
        folded = _fold_binary(e.op, left.value, right.value)
        if folded is not None and math.isfinite(folded):
            return Const(folded)
    if e.op == "+":
        if _is_const(left, 0.0):
            return right
        if _is_const(right, 0.0):
            return left
    elif e.op == "-":
        if _is_const(right, 0.0):
            return left
        if _is_const(left, 0.0):
            return Unary("neg", right)
    elif e.op == "*":
        if _is_const(left, 0.0) or _is_const(right, 0.0):
            return _ZERO
        if _is_const(left, 1.0):
            return right
        if _is_const(right, 1.0):
            return left
    elif e.op == "/":
        if _is_const(right, 1.0):
            return left
    elif e.op == "^":
        if _is_const(right, 1.0):
            return left
        if _is_const(right, 0.0):
            return _ONE
    return Binary(e.op, left, right)


def differentiate(e: ExprNode, var: str) -> ExprNode:
    """Symbolic derivative with respect to 't' or 's', simplified."""
    if var not in ("t", "s"):
        raise ValueError(f"var must be 't' or 's', got {var!r}")
    return simplify(_diff(e, var))


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(e: ExprNode) -> int:
    if isinstance(e, Const):
        return _PREC_NEG if e.value < 0.0 else _PREC_ATOM
    if isinstance(e, Var):
        return _PREC_ATOM
    if isinstance(e, Unary):
        return _PREC_NEG if e.op == "neg" else _PREC_ATOM
    assert isinstance(e, Binary)
    if e.op in ("+", "-"):
        return _PREC_ADD
    if e.op in ("*", "/"):
        return _PREC_MUL
    return _PREC_POW


def _wrap(text: str, needs_parens: bool) -> str:
    return f"({text})" if needs_parens else text


def to_string(e: ExprNode) -> str:
    """Canonical rendering; parse(to_string(e)) re-prints identically."""
    if isinstance(e, Const):
        v = e.value
        if v == int(v) and abs(v) < 1e16:
            return repr(int(v))
        return repr(v)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            return "-" + _wrap(to_string(e.child), _prec(e.child) < _PREC_NEG)
        return f"{e.op}({to_string(e.child)})"
    assert isinstance(e, Binary)
    if e.op == "^":
        base = _wrap(to_string(e.left), _prec(e.left) < _PREC_ATOM)
        expo = _wrap(to_string(e.right), _prec(e.right) < _PREC_NEG)
        return f"{base}^{expo}"
    prec = _prec(e)
    left = _wrap(to_string(e.left), _prec(e.left) < prec)
    right = _wrap(to_string(e.right), _prec(e.right) <= prec)
    return f"{left} {e.op} {right}"


# ---------------------------------------------------------------------------
# function capabilities
# ---------------------------------------------------------------------------


def to_bivariate(e: ExprNode) -> BivariateFunction:
    """Package an expression as f(t, s) with its exact mixed partial.

    has_exact_mixed is True whenever symbolic differentiation succeeded.
    """
    mixed: Optional[ExprNode]
    try:
        mixed = differentiate(differentiate(e, "t"), "s")
    except UnsupportedDerivative:
        mixed = None
    mixed_fn = None if mixed is None else (lambda t, s, _m=mixed: _eval(_m, t, s))
    return BivariateFunction(
        fn=lambda t, s, _e=e: _eval(_e, t, s),
        mixed_fn=mixed_fn,
        vectorized=True,
        label=to_string(e),
    )


def to_univariate(e: ExprNode, var: str = "t") -> UnivariateFunction:
    """Package an expression as g(var), binding the other variable to 0."""
    if var not in ("t", "s"):
        raise ValueError(f"var must be 't' or 's', got {var!r}")
    deriv: Optional[ExprNode]
    try:
        deriv = differentiate(e, var)
    except UnsupportedDerivative:
        deriv = None

    def _bind(expr: ExprNode):
        if var == "t":
            return lambda v, _e=expr: _eval(_e, v, 0.0)
        return lambda v, _e=expr: _eval(_e, 0.0, v)

    return UnivariateFunction(
        fn=_bind(e),
        deriv_fn=None if deriv is None else _bind(deriv),
        vectorized=True,
        label=to_string(e),
    )


# ---------------------------------------------------------------------------
# seeded polynomial corpus
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


class XorShift64Star:
    """xorshift64* pseudo-random generator.

    State update x ^= x>>12; x ^= x<<25; x ^= x>>27 (mod 2^64), output
    x * 0x2545F4914F6CDD1D mod 2^64. Uniform doubles take the top 53 bits.
    A zero seed is remapped to a fixed nonzero constant (the state must
    never be zero).
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64 or _SPLITMIX_GAMMA

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) / float(1 << 53)
        return lo + (hi - lo) * u

    def randint(self, n: int) -> int:
        """Integer in [0, n); modulo bias is negligible for small n."""
        return self.next_u64() % n


def derive_seed(seed: int, index: int) -> int:
    """Decorrelated per-trial seed via one splitmix64 step."""
    z = (seed * _SPLITMIX_GAMMA + index + 1) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _horner_1d(coeffs: list[float], var: ExprNode) -> ExprNode:
    """coeffs[k] is the coefficient of var^k; built in Horner form."""
    node: ExprNode = Const(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        node = Binary("+", Const(c), Binary("*", var, node))
    return node


def random_polynomial(rng: XorShift64Star, max_degree: int = 6) -> ExprNode:
    """Dense random polynomial in t and s.

    Degrees per variable are drawn uniformly in 0..max_degree and every
    coefficient uniformly in [-1, 1]; the tree is nested Horner form
    (inner in s, outer in t) so evaluation stays cheap.
    """
    deg_t = rng.randint(max_degree + 1)
    deg_s = rng.randint(max_degree + 1)
    rows = []
    for _ in range(deg_t + 1):
        coeffs = [rng.uniform(-1.0, 1.0) for _ in range(deg_s + 1)]
        rows.append(_horner_1d(coeffs, Var("s")))
    node: ExprNode = rows[-1]
    for row in reversed(rows[:-1]):
        node = Binary("+", row, Binary("*", Var("t"), node))
    return node


def random_polynomial_1d(
    rng: XorShift64Star, max_degree: int = 6, var: str = "t"
) -> ExprNode:
    """Dense random univariate polynomial with coefficients in [-1, 1]."""
    deg = rng.randint(max_degree + 1)
    coeffs = [rng.uniform(-1.0, 1.0) for _ in range(deg + 1)]
    return _horner_1d(coeffs, Var(var))
