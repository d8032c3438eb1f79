"""
Surface expression language for elements and tensors.

    X # Y - Y # X - d1*Y # Y      TF in h1
    s^-1*d1                        σ⁻¹δ₁ in h1dag
    dT[[]]                         δ of the two-vertex tree

`#` separates tensor slots and binds tighter than `+` and `-`.
"""

import logging
from fractions import Fraction
from typing import List

import pyparsing as pp

from errors import ParseError
from exact_kernel import Element, Tensor, format_rational, tensor_product

logger = logging.getLogger(__name__)


def _build_grammar():
    expr = pp.Forward()
    number = pp.Regex(r"\d+(?:/\d+)?").set_parse_action(lambda t: [("num", Fraction(t[0]))])
    generator = (
        pp.Regex(r"dT\[[\[\]]*\]")
        | pp.Regex(r"d\d+")
        | pp.Regex(r"s\^-\d+")
        | pp.Regex(r"[XYZs]")
    ).set_parse_action(lambda t: [("gen", t[0])])
    paren = (pp.Suppress("(") + expr + pp.Suppress(")")).set_parse_action(lambda t: [("paren", t[0])])
    primary = number | generator | paren
    power = (primary + pp.Optional(pp.Suppress("^") + pp.Regex(r"\d+"))).set_parse_action(
        lambda t: [("pow", t[0], int(t[1]) if len(t) > 1 else 1)])
    product = (power + pp.ZeroOrMore(pp.Suppress("*") + power)).set_parse_action(
        lambda t: [("prod", list(t))])
    tensor = (product + pp.ZeroOrMore(pp.Suppress("#") + product)).set_parse_action(
        lambda t: [("tensor", list(t))])
    sign = pp.one_of("+ -")
    first = pp.Optional(sign, default="+") + tensor
    rest = pp.ZeroOrMore(sign + tensor)
    expr <<= (first + rest).set_parse_action(
        lambda t: [("sum", [(t[i], t[i + 1]) for i in range(0, len(t), 2)])])
    return expr


_GRAMMAR = _build_grammar()


class _Evaluator:
    def __init__(self, algebra):
        self.H = algebra

    def generator(self, name: str) -> Element:
        if name.startswith("s^-") and name != "s^-1":
            return self.H.product([self.H.generator_element("s^-1")] * int(name[3:]))
        return self.H.generator_element(name)

    def value(self, node):
        kind = node[0]
        if kind == "num":
            return node[1]
        if kind == "gen":
            return self.generator(node[1])
        if kind == "paren":
            tensor = self.value(node[1])
            return tensor.to_element() if tensor.degree == 1 else tensor
        if kind == "pow":
            base = self.value(node[1])
            if isinstance(base, Fraction):
                return base ** node[2]
            if isinstance(base, Tensor):
                raise ParseError("cannot raise a tensor to a power")
            return self.H.product([base] * node[2])
        if kind == "prod":
            return self.product([self.value(child) for child in node[1]])
        if kind == "tensor":
            return self.tensor(node[1])
        if kind == "sum":
            return self.sum(node[1])
        raise ParseError(f"unexpected node {kind}")

    def product(self, factors: List):
        scalar = Fraction(1)
        element = self.H.one()
        wide = None
        for factor in factors:
            if isinstance(factor, Fraction):
                scalar *= factor
            elif isinstance(factor, Tensor):
                if wide is not None or len(factors) > 1 and any(isinstance(f, Element) for f in factors):
                    raise ParseError("a tensor can only be scaled inside a product")
                wide = factor
            else:
                element = self.H.multiply(element, factor)
        if wide is not None:
            return wide.scale(scalar)
        return element.scale(scalar)

    def tensor(self, products: List) -> Tensor:
        values = [self.value(p) for p in products]
        if len(values) == 1:
            value = values[0]
            return value if isinstance(value, Tensor) else Tensor.from_element(value)
        result = None
        for value in values:
            if isinstance(value, Tensor):
                raise ParseError("nested tensor inside '#'")
            result = Tensor.from_element(value) if result is None else tensor_product(result, value)
        return result

    def sum(self, terms) -> Tensor:
        total = None
        for sign, term in terms:
            value = self.value(term)
            if sign == "-":
                value = -value
            if total is None:
                total = value
            elif total.degree != value.degree:
                raise ParseError(f"cannot add tensors of degree {total.degree} and {value.degree}")
            else:
                total = total + value
        return total


def parse(text: str, algebra) -> Tensor:
    """Parse `text` into a canonical Tensor over `algebra`."""
    try:
        tree = _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseException as exc:
        raise ParseError(f"syntax error: {exc.msg}", exc.loc)
    result = _Evaluator(algebra).value(tree)
    logger.debug(f"parsed {text!r} in {algebra.tag}: {len(result)} terms")
    return result


def parse_element(text: str, algebra) -> Element:
    tensor = parse(text, algebra)
    if tensor.degree != 1:
        raise ParseError(f"expected an element, got a tensor of degree {tensor.degree}")
    return tensor.to_element()


def _term_order(algebras, key):
    degree = sum(H.pbw_degree(w) for H, w in zip(algebras, key))
    return (-degree, repr(key))


def format_tensor(algebras, tensor: Tensor) -> str:
    """Canonical text form; `algebras` is one algebra or one per slot."""
    if not isinstance(algebras, (list, tuple)):
        algebras = [algebras] * tensor.degree
    if tensor.is_zero():
        return "0"
    parts = []
    for key, coeff in sorted(tensor.items(), key=lambda kv: _term_order(algebras, kv[0])):
        body = " # ".join(H.format_word(w) for H, w in zip(algebras, key)) or "1"
        magnitude = abs(coeff)
        if magnitude != 1:
            body = f"{format_rational(magnitude)}*{body}"
        if not parts:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f"- {body}" if coeff < 0 else f"+ {body}")
    return " ".join(parts)


def format_element(algebra, x: Element) -> str:
    return format_tensor([algebra], Tensor.from_element(x))
