import os
import textwrap

import pytest

import shadowaudit
from shadowaudit.shadow.model import (
    Agg,
    BinOp,
    CyclicDefinitionError,
    DuplicateName,
    FreeIndexError,
    IfExpr,
    ModelError,
    Num,
    ParamRef,
    UnknownIndex,
    UnknownParam,
    UnknownSet,
    print_model,
)
from shadowaudit.shadow.parser import (
    IncludeCycle,
    IncludeIoError,
    ModelSyntaxError,
    include_resolve,
    load_model,
    parse_model,
)

LIB_DIR = os.path.join(os.path.dirname(shadowaudit.__file__), "data")


def _model(text):
    return parse_model(textwrap.dedent(text))


def test_set_param_def_smoke():
    ir = _model(
        """
        SET Time(t) := {2001, 2002};
        PARAM CashFlow(t);
        DEF Total := SUM(t, CashFlow(t));
        """
    )
    assert ir.set_elements("Time") == ["2001", "2002"]
    assert ir.params["CashFlow"].role == "input"
    assert ir.params["Total"].role == "defined"
    assert ir.def_reads["Total"] == ["CashFlow"]
    assert ir.eval_order == ["Total"]


def test_single_index_aggregate_shorthand():
    long = _model("SET T(t) := {a}; PARAM X(t); DEF S := SUM((t), X(t));")
    short = _model("SET T(t) := {a}; PARAM X(t); DEF S := SUM(t, X(t));")
    assert long == short


def test_subset_inherits_elements():
    ir = _model("SET Cities(c) := {A, B}; SET Origins(o) SUBSET Cities;")
    assert ir.set_elements("Origins") == ["A", "B"]
    assert ir.set_ancestry("Origins") == ["Origins", "Cities"]


def test_subset_with_explicit_elements_checked():
    with pytest.raises(ModelError):
        _model("SET Cities(c) := {A}; SET Origins(o) SUBSET Cities := {A, Z};")


def test_unknown_parent_set():
    with pytest.raises(UnknownSet):
        _model("SET Origins(o) SUBSET Cities;")


def test_duplicate_declarations_rejected():
    with pytest.raises(DuplicateName):
        _model("SET T(t) := {a}; SET T(u) := {b};")
    with pytest.raises(DuplicateName):
        _model("SET T(t) := {a}; PARAM T;")
    with pytest.raises(DuplicateName):
        _model("SET T(t) := {a, a};")


def test_index_name_shares_namespace():
    # The index of one set cannot be reused as another name.
    with pytest.raises(DuplicateName):
        _model("SET T(t) := {a}; SET U(t) := {b};")


def test_forward_reference_between_defs():
    ir = _model("PARAM X; DEF A := B + 1; DEF B := X * 2;")
    assert ir.eval_order == ["B", "A"]


def test_mutual_recursion_is_a_cycle_not_unknown():
    with pytest.raises(CyclicDefinitionError) as exc:
        _model("DEF A := B; DEF B := A;")
    path = exc.value.path
    assert path[0] == path[-1]
    assert set(path) == {"A", "B"}


def test_self_recursive_definition():
    with pytest.raises(CyclicDefinitionError):
        _model("DEF A := A + 1;")


def test_unknown_parameter_in_expression():
    with pytest.raises(UnknownParam):
        _model("DEF A := Nope;")


def test_free_index_rejected():
    with pytest.raises(FreeIndexError):
        _model("SET T(t) := {a}; PARAM X(t); DEF Bad := X(t);")


def test_aggregate_binds_index():
    ir = _model("SET T(t) := {a}; PARAM X(t); DEF S := SUM(t, X(t));")
    agg = ir.definitions["S"].expr
    assert isinstance(agg, Agg) and agg.indices == ("t",)


def test_aggregate_rebinding_rejected():
    with pytest.raises(ModelError):
        _model("SET T(t) := {a}; PARAM X(t); DEF S(t) := SUM(t, X(t));")


def test_filter_clause_parses():
    ir = _model(
        "SET T(t) := {a, b}; SET U(u) SUBSET T; PARAM X(t);"
        " DEF S(t) := SUM((u) | u <= t, X(u));"
    )
    agg = ir.definitions["S"].expr
    assert agg.filter is not None


def test_subset_index_compatible_with_parent_domain():
    # X is declared over the parent set; a subset-ranging index may feed it.
    ir = _model(
        "SET Cities(c) := {A, B}; SET Origins(o) SUBSET Cities;"
        " PARAM X(c); DEF S := SUM(o, X(o));"
    )
    assert ir.def_reads["S"] == ["X"]


def test_incompatible_index_sets_rejected():
    with pytest.raises(ModelError):
        _model(
            "SET T(t) := {a}; SET C(c) := {x}; PARAM X(t);"
            " DEF S := SUM(c, X(c));"
        )


def test_arity_mismatch_in_reference():
    with pytest.raises(ModelError):
        _model("SET T(t) := {a}; PARAM X(t); DEF S := SUM(t, X(t, t));")


def test_keywords_are_case_sensitive():
    with pytest.raises(ModelSyntaxError):
        _model("set T(t) := {a};")


def test_if_then_else_parses():
    ir = _model("PARAM X; DEF A := IF X > 0 THEN X ELSE -X ENDIF;")
    assert isinstance(ir.definitions["A"].expr, IfExpr)


def test_missing_semicolon():
    with pytest.raises(ModelSyntaxError):
        _model("PARAM X")


def test_numeric_set_elements():
    ir = _model("SET Time(t) := {2001, 2002}; DEF Span := MAX(t, t - 2001);")
    assert isinstance(ir.definitions["Span"].expr, Agg)


# -- INCLUDE ----------------------------------------------------------------

def test_include_splices_file(tmp_path):
    (tmp_path / "lib.sdl").write_text("PARAM X;\n")
    source = 'INCLUDE "lib.sdl";\nDEF A := X + 1;\n'
    flattened = include_resolve(source, [str(tmp_path)])
    ir = parse_model(flattened)
    assert "X" in ir.params and "A" in ir.definitions


def test_include_missing_file(tmp_path):
    with pytest.raises(IncludeIoError):
        include_resolve('INCLUDE "nope.sdl";', [str(tmp_path)])


def test_include_cycle(tmp_path):
    (tmp_path / "a.sdl").write_text('INCLUDE "b.sdl";\n')
    (tmp_path / "b.sdl").write_text('INCLUDE "a.sdl";\n')
    with pytest.raises(IncludeCycle):
        include_resolve('INCLUDE "a.sdl";', [str(tmp_path)])


def test_include_nested_relative(tmp_path):
    sub = tmp_path / "sub"
    sub.mkdir()
    (sub / "inner.sdl").write_text("PARAM Y;\n")
    (sub / "outer.sdl").write_text('INCLUDE "inner.sdl";\nPARAM X;\n')
    flattened = include_resolve('INCLUDE "sub/outer.sdl";', [str(tmp_path)])
    ir = parse_model(flattened)
    assert set(ir.params) == {"X", "Y"}


def test_duplicate_across_include_reported(tmp_path):
    (tmp_path / "lib.sdl").write_text("PARAM X;\n")
    (tmp_path / "main.sdl").write_text('INCLUDE "lib.sdl";\nPARAM X;\n')
    with pytest.raises(DuplicateName):
        load_model(tmp_path / "main.sdl")


def test_shipped_finance_library(tmp_path):
    model = tmp_path / "model.sdl"
    model.write_text(
        "SET Time(t) := {2001, 2002, 2003};\n"
        "SET TimePrior(u) SUBSET Time;\n"
        "SET Scenarios(s) := {base};\n"
        "PARAM WACC;\n"
        "PARAM CashFlow(s, t);\n"
        f'INCLUDE "{os.path.join(LIB_DIR, "finance.lib")}";\n'
    )
    ir = load_model(model)
    assert {"DiscountFactor", "NetPresentValue", "CumulativeCashFlow"} <= set(
        ir.definitions
    )


# -- canonical printing -----------------------------------------------------

def test_print_parse_round_trip_fixture(fixture_model):
    text = print_model(fixture_model)
    assert parse_model(text) == fixture_model
    assert print_model(parse_model(text)) == text


def test_print_parse_round_trip_small_models():
    sources = (
        "PARAM X; DEF A := -X ^ 2;",
        "PARAM X; DEF A := (X + 1) * 2 - X / 3;",
        "SET T(t) := {a, b}; PARAM X(t);"
        " DEF M := MAX((t) | X(t) > 0, X(t));",
        "SET T(t) := {2001, 2002}; PARAM X(t);"
        " DEF A(t) := IF t = FIRST(T) THEN 1 ELSE X(t) ENDIF;",
    )
    for source in sources:
        ir = parse_model(source)
        assert parse_model(print_model(ir)) == ir
