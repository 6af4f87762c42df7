#!/usr/bin/env python3
"""Regenerates the telecom-network NPV fixture: workbook, shadow model,
bindings, data file and the five mutant workbooks.

The committed files are the output of this script; rerun it after editing
and commit the results.  Layout:

  Inputs      distance matrix B2:D4 (lower triangular), gross margins
              B7:D9, constants B11 (investment per mile), B12 (WACC),
              B13 (price per byte, deliberately unused)
  Year_YYYY   one sheet per year; 3x3 volume blocks per scenario at B2:D4
              (worst), G2:I4 (base), L2:N4 (best); net revenue formulas in
              row 6 at the block's left column
  Results     B1 total investment, B2:B4 NPV per scenario
"""

import os

HERE = os.path.dirname(os.path.abspath(__file__))

YEARS = [2001, 2002, 2003, 2004, 2005]
CITIES = ["Ams", "Rot", "Ber"]
SCENARIOS = ["worst", "base", "best"]
BLOCK_COLS = {"worst": "B", "base": "G", "best": "L"}  # left column per block
BLOCK_COL_OFFSET = {"worst": 0, "base": 5, "best": 10}

DISTANCE = {("Rot", "Ams"): 57, ("Ber", "Ams"): 649, ("Ber", "Rot"): 697}
GROSS_MARGIN = [
    ["0.5", "0.6", "0.7"],
    ["0.8", "0.9", "1.0"],
    ["1.1", "1.2", "1.3"],
]
INVESTMENT_PER_MILE = "3"
WACC = "0.1"
PRICE_PER_BYTE = "0.05"


def volume(i, j, k, scenario):
    """Deterministic integer volume for origin i, destination j, year k."""
    if scenario == "worst":
        if (i, j, k) == (0, 0, 0):
            return 100  # scenario-variable cell Year_2001!B2
        return 10 * (i + 1) + 3 * j + 7 * k
    if scenario == "base":
        if k == 2:
            # Year 2003 base block is zero except the scenario-variable
            # cell Year_2003!G3, so the dropped-year mutant is localizable.
            return 120 if (i, j) == (1, 0) else 0
        return 20 * (i + 1) + 5 * j + 11 * k
    return 30 * (i + 1) + 8 * j + 13 * k


def cols_from(letter, n=3):
    base = ord(letter) - ord("A")
    return [chr(ord("A") + base + j) for j in range(n)]


def netrev_formula(block_col, transposed=False):
    """Row-major sum of volume x gross margin for one 3x3 block."""
    vol_cols = cols_from(block_col)
    gm_cols = ["B", "C", "D"]
    terms = []
    for i in range(3):
        for j in range(3):
            if transposed:
                vol = f"{vol_cols[i]}{2 + j}"  # reads the block transposed
            else:
                vol = f"{vol_cols[j]}{2 + i}"
            terms.append(f"{vol}*Inputs!{gm_cols[j]}{7 + i}")
    return "=" + "+".join(terms)


def netrev_value(k, scenario):
    """Float net revenue in the engine's summation order (for mutant 5)."""
    total = 0.0
    gm = [[float(x) for x in row] for row in GROSS_MARGIN]
    for i in range(3):
        for j in range(3):
            total += float(volume(i, j, k, scenario)) * gm[i][j]
    return total


def npv_formula(block_col, wrong_sheet=False, wrong_exponent=False, drop_2003=False):
    terms = []
    for k, year in enumerate(YEARS):
        sheet = f"Year_{year}"
        exponent = k
        if year == 2003:
            if drop_2003:
                continue
            if wrong_sheet:
                sheet = "Year_2004"
            if wrong_exponent:
                exponent = 3
        cell = f"{sheet}!{block_col}6"
        if year == YEARS[0]:
            terms.append(f"({cell}-B1)/(1+Inputs!B12)^{exponent}")
        else:
            terms.append(f"{cell}/(1+Inputs!B12)^{exponent}")
    return "=" + "+".join(terms)


def row(cells):
    while cells and cells[-1] == "":
        cells = cells[:-1]
    return " | ".join(cells)


def build_workbook(mutant=None):
    lines = []

    lines.append("[sheet: Inputs]")
    lines.append(row([""] + CITIES))
    for i, origin in enumerate(CITIES):
        cells = [origin]
        for j, dest in enumerate(CITIES):
            d = DISTANCE.get((origin, dest))
            cells.append("" if d is None else str(d))
        lines.append(row(cells))
    lines.append("")
    lines.append("GrossMargin")
    for i, origin in enumerate(CITIES):
        lines.append(row([origin] + GROSS_MARGIN[i]))
    lines.append("")
    lines.append(row(["InvestmentPerMile", INVESTMENT_PER_MILE]))
    lines.append(row(["WACC", WACC]))
    lines.append(row(["PricePerByte", PRICE_PER_BYTE]))

    for k, year in enumerate(YEARS):
        lines.append(f"[sheet: Year_{year}]")
        label_cells = [""] * 15
        for s in SCENARIOS:
            label_cells[1 + BLOCK_COL_OFFSET[s]] = s
        lines.append(row(label_cells))
        for i, origin in enumerate(CITIES):
            cells = [""] * 15
            cells[0] = origin
            for s in SCENARIOS:
                for j in range(3):
                    cells[1 + BLOCK_COL_OFFSET[s] + j] = str(volume(i, j, k, s))
            lines.append(row(cells))
        lines.append("")
        formula_cells = [""] * 15
        formula_cells[0] = "NetRevenue"
        for s in SCENARIOS:
            formula = netrev_formula(BLOCK_COLS[s])
            if year == 2001 and s == "worst":
                if mutant == "transposed_range":
                    formula = netrev_formula(BLOCK_COLS[s], transposed=True)
                elif mutant == "hardcoded_constant":
                    formula = repr(netrev_value(k, s))
            formula_cells[1 + BLOCK_COL_OFFSET[s]] = formula
        lines.append(row(formula_cells))

    lines.append("[sheet: Results]")
    lines.append(row(["Investment", "=SUM(Inputs!B2:D4)*Inputs!B11"]))
    for s in SCENARIOS:
        kwargs = {}
        if mutant == "dropped_term" and s == "base":
            kwargs["drop_2003"] = True
        if mutant == "wrong_sheet_ref" and s == "worst":
            kwargs["wrong_sheet"] = True
        if mutant == "wrong_exponent" and s == "best":
            kwargs["wrong_exponent"] = True
        lines.append(row([f"NPV_{s}", npv_formula(BLOCK_COLS[s], **kwargs)]))

    return "\n".join(lines) + "\n"


MODEL = """\
# Shadow model for the telecom-network NPV workbook.
SET Time(t) := {2001, 2002, 2003, 2004, 2005};
SET Cities(c) := {Ams, Rot, Ber};
SET Origins(o) SUBSET Cities;
SET Destinations(d) SUBSET Cities;
SET Scenarios(s) := {worst, base, best};

PARAM Volume(o, d, t, s);
PARAM GrossMargin(o, d);
PARAM Distance(o, d);
PARAM InvestmentPerMile;
PARAM WACC;
PARAM PricePerByte;

# All cable investment falls in the first year, at a fixed price per mile.
DEF Investment(t) := IF t = FIRST(Time) THEN SUM((o, d), Distance(o, d) * InvestmentPerMile) ELSE 0 ENDIF;
DEF FCF(s, t) := SUM((o, d), Volume(o, d, t, s) * GrossMargin(o, d)) - Investment(t);
DEF NPV(s) := SUM(t, FCF(s, t) / (1 + WACC) ^ (t - 2001));
"""

BINDINGS = """\
# Region-to-parameter mapping for the telecom-network NPV workbook.
INPUT Distance(o,d) FROM Inputs!B2:D4 ROWS o = {Ams,Rot,Ber} COLS d = {Ams,Rot,Ber} TRIANGULAR LOWER
INPUT GrossMargin(o,d) FROM Inputs!B7:D9 ROWS o = {Ams,Rot,Ber} COLS d = {Ams,Rot,Ber}
INPUT InvestmentPerMile FROM Inputs!B11
INPUT WACC FROM Inputs!B12
INPUT PricePerByte FROM Inputs!B13
INPUT Volume(o,d,t,s) FROM Year_{t}!B2:D4 ROWS o = {Ams,Rot,Ber} COLS d = {Ams,Rot,Ber} BLOCK s STEP (0,5)
OUTPUT NPV(s) FROM Results!B2:B4 ROWS s = {worst,base,best}

# Scenario variables: discount rate, investment cost, and one volume cell
# in the worst-2001 and base-2003 blocks.
VAR Inputs!B12 DEFAULT 0.1 MIN 0.05 MAX 0.2
VAR Inputs!B11 DEFAULT 3 MIN 1 MAX 5
VAR Year_2001!B2 DEFAULT 100 MIN 0 MAX 200
VAR Year_2003!G3 DEFAULT 120 MIN 0 MAX 250
"""


def build_data_file():
    lines = ["# Input data matching workbook.wbk (defaults)."]
    for (origin, dest), d in sorted(DISTANCE.items()):
        lines.append(f"Distance({origin},{dest}) = {d}")
    for i, origin in enumerate(CITIES):
        for j, dest in enumerate(CITIES):
            lines.append(f"GrossMargin({origin},{dest}) = {GROSS_MARGIN[i][j]}")
    lines.append(f"InvestmentPerMile = {INVESTMENT_PER_MILE}")
    lines.append(f"WACC = {WACC}")
    lines.append(f"PricePerByte = {PRICE_PER_BYTE}")
    for k, year in enumerate(YEARS):
        for s in SCENARIOS:
            for i, origin in enumerate(CITIES):
                for j, dest in enumerate(CITIES):
                    lines.append(
                        f"Volume({origin},{dest},{year},{s}) = {volume(i, j, k, s)}"
                    )
    return "\n".join(lines) + "\n"


MUTANTS = (
    "dropped_term",
    "wrong_sheet_ref",
    "transposed_range",
    "wrong_exponent",
    "hardcoded_constant",
)


def write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {os.path.relpath(path, HERE)}")


def main():
    write(os.path.join(HERE, "workbook.wbk"), build_workbook())
    write(os.path.join(HERE, "model.sdl"), MODEL)
    write(os.path.join(HERE, "bindings.bnd"), BINDINGS)
    write(os.path.join(HERE, "model_data.dat"), build_data_file())
    os.makedirs(os.path.join(HERE, "mutants"), exist_ok=True)
    for mutant in MUTANTS:
        write(os.path.join(HERE, "mutants", f"{mutant}.wbk"), build_workbook(mutant))


if __name__ == "__main__":
    main()
