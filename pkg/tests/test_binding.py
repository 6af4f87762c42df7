import pytest

from shadowaudit.binding import (
    BindingError,
    DomainMismatch,
    DuplicateInputBinding,
    MissingSheet,
    RegionOutOfGrid,
    TargetIsFormula,
    UnknownBindingParam,
    expand,
    import_inputs,
    inject_scenario,
    parse_bindings,
    read_outputs,
    resolve_target,
)
from shadowaudit.formula.engine import recalculate
from shadowaudit.scenarios import Scenario
from shadowaudit.shadow.eval import evaluate, load_data, query
from shadowaudit.shadow.parser import parse_model
from shadowaudit.workbook import CellAddress, CellContent, parse_workbook

GRID_MODEL = (
    "SET R(r) := {p, q}; SET C(c) := {x, y, z};"
    " PARAM M(r, c); DEF Total := SUM((r, c), M(r, c));"
)


def _grid_setup(binding_text, wb_text):
    ir = parse_model(GRID_MODEL)
    bindings = parse_bindings(binding_text, ir)
    wb = parse_workbook(wb_text)
    return ir, bindings, wb


def test_inline_axis_expansion_row_major():
    ir, bindings, wb = _grid_setup(
        "INPUT M(r,c) FROM S!B2:D3 ROWS r = {p,q} COLS c = {x,y,z}",
        "[sheet: S]\nhdr\nlbl | 1 | 2 | 3\nlbl | 4 | 5 | 6\n",
    )
    cells = expand(bindings.bindings[0], wb, ir)
    assert [tup for tup, _ in cells] == [
        ("p", "x"), ("p", "y"), ("p", "z"),
        ("q", "x"), ("q", "y"), ("q", "z"),
    ]
    assert cells[0][1] == CellAddress.parse("S!B2")
    assert cells[-1][1] == CellAddress.parse("S!D3")


def test_header_axis_labels():
    ir, bindings, wb = _grid_setup(
        "INPUT M(r,c) FROM S!B2:D3 ROWS r FROM S!A2:A3 COLS c FROM S!B1:D1",
        "[sheet: S]\n | x | y | z\np | 1 | 2 | 3\nq | 4 | 5 | 6\n",
    )
    cells = dict(expand(bindings.bindings[0], wb, ir))
    assert cells[("q", "y")] == CellAddress.parse("S!C3")


def test_header_label_not_in_set():
    ir, bindings, wb = _grid_setup(
        "INPUT M(r,c) FROM S!B2:D3 ROWS r FROM S!A2:A3 COLS c FROM S!B1:D1",
        "[sheet: S]\n | x | y | WRONG\np | 1 | 2 | 3\nq | 4 | 5 | 6\n",
    )
    with pytest.raises(BindingError):
        expand(bindings.bindings[0], wb, ir)


def test_domain_mismatch_missing_index():
    ir = parse_model(GRID_MODEL)
    with pytest.raises(DomainMismatch) as exc:
        parse_bindings("INPUT M(r,c) FROM S!B2:B3 ROWS r = {p,q}", ir)
    assert exc.value.missing == ["c"]


def test_extra_index_rejected():
    ir = parse_model(GRID_MODEL)
    with pytest.raises(DomainMismatch):
        parse_bindings(
            "INPUT Total FROM S!B2:B3 ROWS r = {p,q}".replace("Total", "Total"), ir
        )


def test_label_count_must_match_extent():
    ir = parse_model(GRID_MODEL)
    with pytest.raises(BindingError):
        parse_bindings(
            "INPUT M(r,c) FROM S!B2:D3 ROWS r = {p} COLS c = {x,y,z}", ir
        )


def test_unknown_parameter():
    ir = parse_model(GRID_MODEL)
    with pytest.raises(UnknownBindingParam):
        parse_bindings("INPUT Nope FROM S!B2", ir)


def test_duplicate_input_binding():
    ir = parse_model("PARAM W;")
    with pytest.raises(DuplicateInputBinding):
        parse_bindings("INPUT W FROM S!B1\nINPUT W FROM S!B2", ir)


def test_output_must_be_defined():
    ir = parse_model(GRID_MODEL)
    with pytest.raises(BindingError):
        parse_bindings(
            "OUTPUT M(r,c) FROM S!B2:D3 ROWS r = {p,q} COLS c = {x,y,z}", ir
        )


def test_missing_sheet_at_expansion():
    ir, bindings, wb = _grid_setup(
        "INPUT M(r,c) FROM Nope!B2:D3 ROWS r = {p,q} COLS c = {x,y,z}",
        "[sheet: S]\n1\n",
    )
    with pytest.raises(MissingSheet):
        expand(bindings.bindings[0], wb, ir)


def test_region_out_of_grid():
    ir, bindings, wb = _grid_setup(
        "INPUT M(r,c) FROM S!B2:D3 ROWS r = {p,q} COLS c = {x,y,z}",
        "[sheet: S]\n1 | 2\n",
    )
    with pytest.raises(RegionOutOfGrid):
        expand(bindings.bindings[0], wb, ir)


def test_sheet_template_and_block_step(fixture_model, fixture_workbook):
    bindings = parse_bindings(
        "INPUT Volume(o,d,t,s) FROM Year_{t}!B2:D4"
        " ROWS o = {Ams,Rot,Ber} COLS d = {Ams,Rot,Ber} BLOCK s STEP (0,5)",
        fixture_model,
    )
    cells = dict(expand(bindings.bindings[0], fixture_workbook, fixture_model))
    assert cells[("Ams", "Ams", "2001", "worst")] == CellAddress.parse("Year_2001!B2")
    assert cells[("Ams", "Ams", "2001", "base")] == CellAddress.parse("Year_2001!G2")
    assert cells[("Ber", "Ber", "2005", "best")] == CellAddress.parse("Year_2005!N4")
    assert len(cells) == 3 * 3 * 5 * 3


def test_import_skips_empty_cells_and_flags_triangular(
    fixture_model, fixture_bindings, fixture_workbook
):
    grid = recalculate(fixture_workbook)
    assignments, warnings = import_inputs(
        grid, fixture_bindings, fixture_model, fixture_workbook
    )
    by_param = {}
    for param, tup, value in assignments:
        by_param.setdefault(param, {})[tup] = value
    # Strictly-upper distance cells are empty and must not be imported.
    assert ("Ams", "Rot") not in by_param["Distance"]
    assert by_param["Distance"][("Rot", "Ams")] == 57.0
    assert by_param["WACC"][()] == 0.1
    assert len(by_param["Volume"]) == 135
    assert warnings == []  # clean fixture: nothing above the diagonal


def test_triangular_violation_warning(fixture_model):
    bindings = parse_bindings(
        "INPUT Distance(o,d) FROM Inputs!B2:D4 ROWS o = {Ams,Rot,Ber}"
        " COLS d = {Ams,Rot,Ber} TRIANGULAR LOWER",
        fixture_model,
    )
    wb = parse_workbook(
        "[sheet: Inputs]\nhdr\nlbl |  |  | 9\nlbl | 2\nlbl | 3 | 4 | 5\n"
    )
    grid = recalculate(wb)
    _, warnings = import_inputs(grid, bindings, fixture_model, wb)
    assert warnings == ["triangular-violation:Distance:Inputs!D2"]


def test_import_feeds_shadow_evaluation():
    ir, bindings, wb = _grid_setup(
        "INPUT M(r,c) FROM S!B2:D3 ROWS r = {p,q} COLS c = {x,y,z}",
        "[sheet: S]\nhdr\nlbl | 1 | 2 | 3\nlbl | 4 | 5 | 6\n",
    )
    grid = recalculate(wb)
    assignments, _ = import_inputs(grid, bindings, ir, wb)
    store = evaluate(ir, load_data(ir, assignments))
    assert query(store, "Total", ()) == 21.0


def test_resolve_parameter_target(fixture_model, fixture_bindings, fixture_workbook):
    addr = resolve_target(
        ("Volume", ("Rot", "Ams", "2003", "base")),
        fixture_bindings,
        fixture_workbook,
        fixture_model,
    )
    assert addr == CellAddress.parse("Year_2003!G3")


def test_inject_scenario_returns_new_workbook(fixture_model, fixture_bindings, fixture_workbook):
    scenario = Scenario("s", [(CellAddress.parse("Inputs!B12"), 0.2)])
    injected = inject_scenario(fixture_workbook, fixture_bindings, scenario, fixture_model)
    assert injected.get_cell(CellAddress.parse("Inputs!B12")) == CellContent.of_number(0.2)
    # The source workbook is untouched.
    assert fixture_workbook.get_cell(CellAddress.parse("Inputs!B12")) == CellContent.of_number(0.1)


def test_inject_into_formula_cell_rejected(fixture_model, fixture_bindings, fixture_workbook):
    scenario = Scenario("s", [(CellAddress.parse("Results!B2"), 1.0)])
    with pytest.raises(TargetIsFormula):
        inject_scenario(fixture_workbook, fixture_bindings, scenario, fixture_model)


def test_read_outputs(fixture_model, fixture_bindings, fixture_workbook):
    grid = recalculate(fixture_workbook)
    readings = read_outputs(grid, fixture_bindings, fixture_model, fixture_workbook)
    assert [(r.param, r.tup) for r in readings] == [
        ("NPV", ("worst",)), ("NPV", ("base",)), ("NPV", ("best",)),
    ]
    assert all(r.error is None and not r.warnings for r in readings)


def test_read_outputs_empty_and_text_cells():
    ir = parse_model("SET S(s) := {a, b}; PARAM X; DEF N(s) := X;")
    bindings = parse_bindings("OUTPUT N(s) FROM R!B1:B2 ROWS s = {a,b}", ir)
    wb = parse_workbook("[sheet: R]\nlbl |\nlbl | oops\n")
    grid = recalculate(wb)
    readings = read_outputs(grid, bindings, ir, wb)
    assert readings[0].value == 0.0 and readings[0].warnings == ["empty-output"]
    assert readings[1].value is None and readings[1].error is not None


def test_var_lines_parse(fixture_model):
    bindings = parse_bindings(
        "VAR Inputs!B12 DEFAULT 0.1 MIN 0.05 MAX 0.2\n"
        "VAR WACC DEFAULT 0.1 MIN 0 MAX 1\n",
        fixture_model,
    )
    assert len(bindings.input_vars) == 2
    assert bindings.input_vars[0].target == CellAddress.parse("Inputs!B12")
    assert bindings.input_vars[1].target == ("WACC", ())


def test_var_default_outside_range(fixture_model):
    with pytest.raises(Exception):
        parse_bindings("VAR WACC DEFAULT 5 MIN 0 MAX 1", fixture_model)


def test_dense_grid_round_trip():
    # Every cell of a dense block maps to exactly one tuple and back.
    ir, bindings, wb = _grid_setup(
        "INPUT M(r,c) FROM S!B2:D3 ROWS r = {p,q} COLS c = {x,y,z}",
        "[sheet: S]\nhdr\nlbl | 1 | 2 | 3\nlbl | 4 | 5 | 6\n",
    )
    cells = expand(bindings.bindings[0], wb, ir)
    tuples = [tup for tup, _ in cells]
    addresses = [addr for _, addr in cells]
    assert len(set(tuples)) == len(tuples) == 6
    assert len(set(addresses)) == len(addresses) == 6
    for tup, addr in cells:
        assert resolve_target(("M", tup), bindings, wb, ir) == addr
