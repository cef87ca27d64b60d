from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pylightlike.errors import ExprDomainError, ExprSyntaxError, UnknownSymbolError
from pylightlike.expr import (
    BinOp,
    Const,
    Expr,
    Neg,
    Param,
    Pow,
    Sqrt,
    Var,
    constant,
    evaluate,
    evaluate_dual,
    parse,
    pretty,
)
from tests.utils import central_difference

COORDS = ("x", "y")
PARAMS = {"lam": 0.5}

_leaves = st.one_of(
    st.sampled_from([Var("x", 0), Var("y", 1), Param("lam", 0.5)]),
    st.floats(min_value=0.0, max_value=10.0, allow_nan=False).map(Const),
)


def _tree(leaves, *, ops=("+", "-", "*", "/"), sqrt: bool = True):
    def extend(children):
        options = [
            st.tuples(st.sampled_from(ops), children, children).map(lambda t: BinOp(*t)),
            children.map(Neg),
            st.tuples(children, st.integers(min_value=-2, max_value=3)).map(lambda t: Pow(*t)),
        ]
        if sqrt:
            options.append(children.map(Sqrt))
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=8)


_small_leaves = st.one_of(
    st.sampled_from([Var("x", 0), Var("y", 1), Param("lam", 0.5)]),
    st.sampled_from([0.0, 0.5, 1.0, 2.0]).map(Const),
)
_polynomials = st.recursive(
    _small_leaves,
    lambda children: st.one_of(
        st.tuples(st.sampled_from(["+", "-", "*"]), children, children).map(lambda t: BinOp(*t)),
        children.map(Neg),
        st.tuples(children, st.integers(min_value=1, max_value=2)).map(lambda t: Pow(*t)),
    ),
    max_leaves=6,
)


_FUZZ_SEEDS = (
    "x*(x + 1) - x^2 - x",
    "sqrt(x^2 + y^2)/(4*lam)",
    "-x^-2 + 2.5e-3*y",
    "(x - (y - 1))^3",
)
_FUZZ_ALPHABET = "xylamsqrt+-*/^() .0123456789eE,#"


def _smooth(rng: np.random.Generator, depth: int) -> Expr:
    """Random expression with sqrt and division kept away from their poles."""
    if depth == 0:
        leaves = [Var("x", 0), Var("y", 1), Param("lam", 0.5), Const(float(rng.choice([0.5, 2.0, 3.0])))]
        return leaves[int(rng.integers(len(leaves)))]
    a = _smooth(rng, depth - 1)
    b = _smooth(rng, depth - 1)
    shifted = BinOp("+", Const(1.0), Pow(b, 2))
    choices = (
        lambda: BinOp("+", a, b),
        lambda: BinOp("-", a, b),
        lambda: BinOp("*", a, b),
        lambda: BinOp("/", a, shifted),
        lambda: Sqrt(BinOp("+", Const(1.0), Pow(a, 2))),
        lambda: Neg(a),
    )
    return choices[int(rng.integers(len(choices)))]()


def _mutate(rng: np.random.Generator, text: str) -> str:
    chars = list(text)
    for _ in range(int(rng.integers(1, 4))):
        where = int(rng.integers(len(chars) + 1))
        action = int(rng.integers(4))
        letter = _FUZZ_ALPHABET[int(rng.integers(len(_FUZZ_ALPHABET)))]
        if action == 0:
            chars.insert(where, letter)
        elif chars and action == 1:
            del chars[min(where, len(chars) - 1)]
        elif chars and action == 2:
            chars[min(where, len(chars) - 1)] = letter
        else:
            chars[where:where] = chars[: int(rng.integers(len(chars) + 1))]
    return "".join(chars)


@settings(max_examples=200)
@given(_tree(_leaves))
def test_pretty_parse_fixed_point(e) -> None:
    text = pretty(e)
    assert pretty(parse(text, COORDS, PARAMS)) == text


@settings(max_examples=100)
@given(_polynomials, st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_dual_matches_central_difference(e, x: float, y: float) -> None:
    point = [x, y]
    dual = evaluate_dual(e, point)
    assert math.isclose(dual.value, evaluate(e, point), rel_tol=1e-12, abs_tol=1e-12)
    fd = central_difference(lambda p: evaluate(e, p), point, h=1e-5)
    np.testing.assert_allclose(dual.partials, fd, rtol=1e-5, atol=1e-5)


def test_dual_matches_central_difference_with_sqrt_and_division() -> None:
    rng = np.random.default_rng(2024)
    for case in range(1000):
        e = _smooth(rng, int(rng.integers(1, 4)))
        point = rng.uniform(-1.0, 1.0, size=2).tolist()
        dual = evaluate_dual(e, point)
        fd = central_difference(lambda p, e=e: evaluate(e, p), point, h=1e-5)
        error = np.abs(dual.partials - fd) / np.maximum(1.0, np.abs(dual.partials))
        assert error.max() < 1e-6, (case, pretty(e), point)


def test_mutated_text_parses_or_raises_syntax_error() -> None:
    rng = np.random.default_rng(7)
    parsed = 0
    for _ in range(10_000):
        text = _mutate(rng, _FUZZ_SEEDS[int(rng.integers(len(_FUZZ_SEEDS)))])
        try:
            e = parse(text, COORDS, PARAMS)
        except ExprSyntaxError:
            continue
        assert isinstance(e, Expr), text
        parsed += 1
    assert 0 < parsed < 10_000


def test_cancelling_polynomial_is_zero() -> None:
    e = parse("x1*(x1+1) - x1^2 - x1", ("x1",))
    for x in (-1.5, 0.0, 0.25, 3.0):
        assert evaluate(e, [x]) == pytest.approx(0.0, abs=1e-12)
        assert evaluate_dual(e, [x]).partials == pytest.approx([0.0], abs=1e-12)


def test_precedence_and_power() -> None:
    e = parse("-x^2 + 2*y/4", COORDS)
    assert evaluate(e, [3.0, 2.0]) == pytest.approx(-8.0)
    assert pretty(e) == "-x^2 + 2*y/4"
    assert evaluate(parse("x^-2", COORDS), [2.0, 0.0]) == pytest.approx(0.25)


def test_pretty_brackets_only_where_needed() -> None:
    assert pretty(parse("(x - (y - 1))", COORDS)) == "x - (y - 1)"
    assert pretty(parse("((x*y))/(x*y)", COORDS)) == "x*y/(x*y)"
    assert pretty(parse("(x^2)^3", COORDS)) == "(x^2)^3"


def test_parameters_print_by_name() -> None:
    e = parse("lam*x", COORDS, PARAMS)
    assert pretty(e) == "lam*x"
    assert evaluate(e, [4.0, 0.0]) == pytest.approx(2.0)


def test_constant_helper_negates() -> None:
    assert constant(-1.5) == Neg(Const(1.5))
    assert pretty(constant(3.0)) == "3"


def test_syntax_error_carries_byte_offset() -> None:
    with pytest.raises(ExprSyntaxError) as info:
        parse("x + * y", COORDS)
    assert info.value.offset == 4
    with pytest.raises(ExprSyntaxError) as info:
        parse("x^1.5", COORDS)
    assert info.value.offset == 2
    with pytest.raises(ExprSyntaxError) as info:
        parse("sqrt(x", COORDS)
    assert info.value.offset == 6


def test_overflowing_number_is_a_syntax_error() -> None:
    with pytest.raises(ExprSyntaxError, match="out of range") as info:
        parse("x + 1e999", COORDS)
    assert info.value.offset == 4


def test_unknown_symbol() -> None:
    with pytest.raises(UnknownSymbolError) as info:
        parse("x + zeta", COORDS)
    assert info.value.name == "zeta"
    assert info.value.offset == 4


def test_domain_errors() -> None:
    with pytest.raises(ExprDomainError):
        evaluate(parse("1/x", COORDS), [0.0, 1.0])
    with pytest.raises(ExprDomainError):
        evaluate(parse("sqrt(x)", COORDS), [0.0, 1.0])
    with pytest.raises(ExprDomainError):
        evaluate(parse("x^-1", COORDS), [0.0, 1.0])


def test_sqrt_derivative() -> None:
    dual = evaluate_dual(parse("sqrt(x*y)", COORDS), [4.0, 1.0])
    assert dual.value == pytest.approx(2.0)
    np.testing.assert_allclose(dual.partials, [0.25, 1.0])


def test_dual_with_seed_direction() -> None:
    e = parse("x^2*y", COORDS)
    direction = np.array([1.0, -1.0])
    dual = evaluate_dual(e, [1.0, 2.0], seeds=direction[:, None])
    # grad = (2xy, x^2) = (4, 1)
    assert dual.partials == pytest.approx([3.0])
