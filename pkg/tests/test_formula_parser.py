import pytest
from hypothesis import given, strategies as st

from shadowaudit.formula.ast import (
    Binary,
    Call,
    CellRef,
    Compare,
    NumberLit,
    RangeRef,
    Unary,
    print_formula,
)
from shadowaudit.formula.parser import FormulaSyntaxError, UnknownFunction, parse_formula


def test_requires_leading_equals():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("1+2")


def test_number_literal():
    assert parse_formula("=2.5e3") == NumberLit(2500.0)


def test_precedence_add_mul():
    assert parse_formula("=1+2*3") == Binary(
        "+", NumberLit(1.0), Binary("*", NumberLit(2.0), NumberLit(3.0))
    )


def test_pow_right_associative():
    assert parse_formula("=2^3^2") == Binary(
        "^", NumberLit(2.0), Binary("^", NumberLit(3.0), NumberLit(2.0))
    )


def test_unary_minus_binds_looser_than_pow():
    assert parse_formula("=-2^2") == Unary(
        "-", Binary("^", NumberLit(2.0), NumberLit(2.0))
    )


def test_parenthesized_unary_base():
    assert parse_formula("=(-2)^2") == Binary(
        "^", Unary("-", NumberLit(2.0)), NumberLit(2.0)
    )


def test_comparison_loosest():
    assert parse_formula("=A1+1>B1*2") == Compare(
        ">",
        Binary("+", CellRef(None, 1, 1), NumberLit(1.0)),
        Binary("*", CellRef(None, 2, 1), NumberLit(2.0)),
    )


def test_sheet_qualified_reference():
    assert parse_formula("=Inputs!B12") == CellRef("Inputs", 2, 12)


def test_range_inside_sum():
    assert parse_formula("=SUM(Inputs!B2:D4)") == Call(
        "SUM", (RangeRef("Inputs", 2, 2, 4, 4),)
    )


def test_range_outside_aggregate_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("=A1:B2+1")
    with pytest.raises(FormulaSyntaxError):
        parse_formula("=IF(A1,A1:B2,0)")


def test_range_nested_in_aggregate_argument_rejected():
    # The range must be a direct argument, not buried in arithmetic.
    with pytest.raises(FormulaSyntaxError):
        parse_formula("=SUM(A1:B2*2)")


def test_inverted_range_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("=SUM(B2:A1)")


def test_cross_sheet_range_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("=SUM(S1!A1:S2!B2)")


def test_unknown_function():
    with pytest.raises(UnknownFunction):
        parse_formula("=FOO(1)")


def test_function_name_case_insensitive():
    assert parse_formula("=sum(A1:A2)") == parse_formula("=SUM(A1:A2)")


def test_error_position_reported():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula("=1+*2")
    assert exc.value.position == 2  # offset into the text after '='


def test_trailing_garbage_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("=1 2")


def test_print_parse_round_trip_examples():
    for source in (
        "=1+2*3",
        "=-2^2",
        "=(-2)^2",
        "=(1+2)*3",
        "=2^3^2",
        "=(2^3)^2",
        "=A1-B2-C3",
        "=A1-(B2-C3)",
        "=SUM(Inputs!B2:D4)*Inputs!B11",
        "=IF(A1>0,A1,-A1)",
        "=NPV(0.1,B1:B5)",
        "=AVERAGE(A1,A2,3)",
    ):
        ast = parse_formula(source)
        assert parse_formula(print_formula(ast)) == ast


_leaf = st.one_of(
    st.integers(0, 99).map(lambda n: NumberLit(float(n))),
    st.tuples(st.integers(1, 5), st.integers(1, 5)).map(
        lambda rc: CellRef(None, rc[0], rc[1])
    ),
)


def _compound(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*/^"), children, children).map(
            lambda t: Binary(t[0], t[1], t[2])
        ),
        children.map(lambda c: Unary("-", c)),
        st.tuples(st.sampled_from(["SUM", "MIN", "MAX"]), st.lists(children, min_size=1, max_size=3)).map(
            lambda t: Call(t[0], tuple(t[1]))
        ),
    )


_ast = st.recursive(_leaf, _compound, max_leaves=12)


@given(_ast)
def test_print_parse_round_trip_property(ast):
    assert parse_formula(print_formula(ast)) == ast
