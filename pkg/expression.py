import cmath
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Any, Iterator, List, NamedTuple, Optional, Tuple, Union

from dynamics import cancel_common_roots
from errors import ExpressionError
from models.polynomial import Polynomial
from models.rational_map import RationalMap

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(r"""
    (?P<number>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_]+)
  | (?P<op>[-+*/^(){}])
  | (?P<space>\s+)
""", re.VERBOSE)

CONSTANTS = {"i": 1j, "pi": math.pi, "e": math.e}

# binding powers
ADDITIVE = 10
MULTIPLICATIVE = 20
UNARY = 30
POWER = 40

BINARY_POWER = {"+": ADDITIVE, "-": ADDITIVE, "*": MULTIPLICATIVE, "/": MULTIPLICATIVE, "^": POWER}
CLOSING = {"(": ")", "{": "}"}


class Token(NamedTuple):
    kind: str
    value: str
    position: int


@dataclass(frozen=True)
class Number:
    value: complex
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Variable:
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Negate:
    operand: "Node"
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"
    position: int = field(default=0, compare=False)


Node = Union[Number, Variable, Negate, Binary]


def tokenize(text: str) -> Iterator[Token]:
    pos = 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ExpressionError(f"Unexpected character '{text[pos]}'", pos)
        kind = match.lastgroup
        if kind != "space":
            yield Token(kind, match.group(), pos)
        pos = match.end()
    yield Token("end", "", len(text))


class Parser:
    """Pratt parser for maps in z: complex literals, + - * / ^ and brackets."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = list(tokenize(text))
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def parse(self) -> Node:
        node = self.expression(0)
        if self.current.kind != "end":
            raise ExpressionError(f"Unexpected '{self.current.value}'", self.current.position)
        return node

    def expression(self, right_power: int) -> Node:
        node = self.prefix(self.advance())
        while True:
            token = self.current
            power = BINARY_POWER.get(token.value) if token.kind == "op" else None
            if power is None or power <= right_power:
                return node
            self.advance()
            # ^ is right associative
            rhs = self.expression(power - 1 if token.value == "^" else power)
            node = Binary(token.value, node, rhs, token.position)

    def prefix(self, token: Token) -> Node:
        if token.kind == "number":
            text = token.value
            if text.endswith("i"):
                return Number(complex(0, float(text[:-1])), token.position)
            return Number(complex(float(text)), token.position)
        if token.kind == "name":
            if token.value == "z":
                return Variable(token.position)
            if token.value in CONSTANTS:
                return Number(complex(CONSTANTS[token.value]), token.position)
            raise ExpressionError(f"Unknown name '{token.value}'", token.position)
        if token.kind == "op" and token.value in CLOSING:
            node = self.expression(0)
            closing = self.advance()
            if closing.value != CLOSING[token.value]:
                raise ExpressionError(f"Expected '{CLOSING[token.value]}'", closing.position)
            return node
        if token.kind == "op" and token.value == "-":
            return Negate(self.expression(UNARY), token.position)
        if token.kind == "op" and token.value == "+":
            return self.expression(UNARY)
        if token.kind == "end":
            raise ExpressionError("Unexpected end of expression", token.position)
        raise ExpressionError(f"Unexpected '{token.value}'", token.position)


# ---------------------------------------------------------------------------
# Printing and evaluation

def _format_number(value: complex) -> str:
    if value.imag == 0:
        return repr(value.real)
    if value.real == 0:
        return f"{value.imag!r}i"
    return f"({value.real!r}+{value.imag!r}i)"


def _binding(node: Node) -> int:
    if isinstance(node, Binary):
        return BINARY_POWER[node.op]
    if isinstance(node, Negate):
        return UNARY
    return POWER + 1


def to_text(node: Node) -> str:
    """Source text that parses back to the same tree."""
    if isinstance(node, Number):
        return _format_number(node.value)
    if isinstance(node, Variable):
        return "z"
    if isinstance(node, Negate):
        inner = to_text(node.operand)
        return f"-({inner})" if _binding(node.operand) < UNARY else f"-{inner}"
    power = BINARY_POWER[node.op]
    left, right = to_text(node.left), to_text(node.right)
    left_binding, right_binding = _binding(node.left), _binding(node.right)
    if node.op == "^":
        if left_binding <= power:
            left = f"({left})"
        if right_binding < power:
            right = f"({right})"
    else:
        if left_binding < power:
            left = f"({left})"
        if right_binding <= power:
            right = f"({right})"
    return f"{left}{node.op}{right}"


def evaluate(node: Node, z: complex) -> complex:
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Variable):
        return z
    if isinstance(node, Negate):
        return -evaluate(node.operand, z)
    a, b = evaluate(node.left, z), evaluate(node.right, z)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    try:
        if node.op == "/":
            return a / b
        if b.imag == 0 and b.real == int(b.real):
            return a ** int(b.real)
        return cmath.exp(b * cmath.log(a))
    except (ZeroDivisionError, ValueError):
        raise ExpressionError(f"'{node.op}' is undefined at z={z}", node.position)


# ---------------------------------------------------------------------------
# Compilation to P/Q

PolynomialPair = Tuple[Polynomial, Polynomial]


def _constant(pair: PolynomialPair) -> Optional[complex]:
    num, den = pair
    if num.degree == 0 and den.degree == 0:
        return complex(num.coefficients[0]) / complex(den.coefficients[0])
    return None


def _compile(node: Node) -> PolynomialPair:
    one = Polynomial([1 + 0j])
    if isinstance(node, Number):
        return Polynomial([node.value]), one
    if isinstance(node, Variable):
        return Polynomial([0j, 1 + 0j]), one
    if isinstance(node, Negate):
        num, den = _compile(node.operand)
        return -num, den
    (p1, q1), (p2, q2) = _compile(node.left), _compile(node.right)
    if node.op in "+-":
        if node.op == "-":
            p2 = -p2
        if q1 == q2:
            return p1 + p2, q1
        return p1 * q2 + p2 * q1, q1 * q2
    if node.op == "*":
        return p1 * p2, q1 * q2
    if node.op == "/":
        if p2.is_zero():
            raise ExpressionError("Division by zero", node.position)
        return p1 * q2, q1 * p2
    exponent = _constant((p2, q2))
    if exponent is None:
        raise ExpressionError("Exponent must be constant", node.position)
    base = _constant((p1, q1))
    if base is not None:
        return Polynomial([evaluate(Binary("^", Number(base), Number(exponent)), 0j)]), one
    if exponent.imag != 0 or exponent.real != int(exponent.real):
        raise ExpressionError("Exponent of z must be an integer", node.position)
    k = int(exponent.real)
    if k >= 0:
        return p1 ** k, q1 ** k
    if p1.is_zero():
        raise ExpressionError("Negative power of zero", node.position)
    return q1 ** (-k), p1 ** (-k)


@dataclass(frozen=True)
class MapExpression:
    source: str
    tree: Any = field(repr=False)
    map: RationalMap = field(repr=False)
    cancelled: Tuple[complex, ...] = ()

    def text(self) -> str:
        return to_text(self.tree)

    def __call__(self, z: complex) -> complex:
        return evaluate(self.tree, z)


def compile_tree(tree: Node, source: str = "") -> MapExpression:
    num, den = _compile(tree)
    # normalize so the denominator is monic
    lead = den.leading
    num = Polynomial([c / lead for c in num.coefficients])
    den = Polynomial([c / lead for c in den.coefficients])
    if max(num.degree, den.degree) < 1:
        raise ExpressionError("Map must have degree at least 1", 0)
    f, removed = cancel_common_roots(RationalMap(num, den))
    if removed:
        logger.warning(f"Map '{source}' had common factors at {removed}; simplified")
    return MapExpression(source, tree, f, tuple(removed))


def parse_map(text: str) -> MapExpression:
    if not text or not text.strip():
        raise ExpressionError("Empty map expression", 0)
    tree = Parser(text).parse()
    return compile_tree(tree, text)


def parse_tree(text: str) -> Node:
    return Parser(text).parse()
