import numpy as np
import pytest

from qspec.expressions import (
    ExprSyntaxError,
    ExprTypeError,
    UnboundIdentifierError,
    evaluate,
    parse_expression,
)

OPS = {"a": np.array([[0.0, 1.0], [0.0, 0.0]]),
       "b": np.array([[1.0, 0.0], [0.0, -1.0]]),
       "n": np.diag([0.0, 1.0, 2.0])}


def run(expr, operators=None, scalars=None):
    operators = operators or {}
    scalars = scalars or {}
    ast = parse_expression(expr, set(operators), set(scalars))
    return evaluate(ast, operators, scalars)


def test_scalar_arithmetic():
    assert run("2 * (1 + 3)") == 8
    assert run("1 - 2 - 3") == -4  # left associative
    assert run("-2 * 3 + 10 / 4") == pytest.approx(-3.5)
    assert run("2e-3 + 1.5") == pytest.approx(1.502)


def test_paper_style_product(pytestconfig=None):
    ops = {"n": OPS["n"], "adag": np.diag(np.sqrt([1.0, 2.0]), -1)}
    result = run("g3 * cos(n) * adag", ops, {"g3": 0.1})
    cos_n = np.diag(np.cos([0.0, 1.0, 2.0]))
    assert np.allclose(result, 0.1 * cos_n @ ops["adag"])


def test_non_commutative_order_preserved():
    ab = run("a * b", dict(OPS))
    ba = run("b * a", dict(OPS))
    assert not np.allclose(ab, ba)
    assert np.allclose(ab, OPS["a"] @ OPS["b"])
    assert np.allclose(ba, OPS["b"] @ OPS["a"])


def test_dag():
    result = run("dag(a)", dict(OPS))
    assert np.allclose(result, OPS["a"].conj().T)
    assert run("dag(2)") == 2


def test_scalar_functions():
    assert run("cos(0)") == pytest.approx(1.0)
    assert run("exp(1)") == pytest.approx(np.e)


def test_matrix_function_is_hermitian_function():
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    result = run("cos(x)", {"x": x})
    evals, evecs = np.linalg.eigh(x)
    assert np.allclose(result, (evecs * np.cos(evals)) @ evecs.conj().T)


def test_operator_sum_and_scaling():
    result = run("0.5 * (a + dag(a))", dict(OPS))
    assert np.allclose(result, 0.5 * (OPS["a"] + OPS["a"].T))


def test_syntax_error_carries_position():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expression("1 + * 2", set(), set())
    assert err.value.position == 4


def test_unbalanced_parenthesis():
    with pytest.raises(ExprSyntaxError):
        parse_expression("(1 + 2", set(), set())


def test_empty_expression():
    with pytest.raises(ExprSyntaxError):
        parse_expression("  ", set(), set())


def test_unbound_identifier():
    with pytest.raises(UnboundIdentifierError):
        parse_expression("g * a", {"a"}, set())


def test_operator_in_denominator_rejected():
    with pytest.raises(ExprTypeError):
        parse_expression("1 / a", {"a"}, set())


def test_scalar_plus_operator_rejected():
    with pytest.raises(ExprTypeError):
        parse_expression("1 + a", {"a"}, set())


def test_unknown_function():
    with pytest.raises(ExprSyntaxError):
        parse_expression("tan(a)", {"a"}, set())


def test_operator_division_by_scalar():
    result = run("a / 2", dict(OPS))
    assert np.allclose(result, OPS["a"] / 2)
