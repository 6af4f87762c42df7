#!/usr/bin/env python3
"""Brute-force oracle for the telecom-network NPV fixture.

Reads workbook.wbk with its own minimal text reader (raw cell strings,
no formula evaluation, nothing imported from the package) and recomputes
the per-scenario NPV with plain loops from the literal input cells.  Used
by the acceptance suite to verify both engines independently.

Usage: python3 npv_oracle.py [workbook.wbk]
"""

import os
import sys

YEARS = [2001, 2002, 2003, 2004, 2005]
SCENARIOS = ["worst", "base", "best"]
BLOCK_LEFT = {"worst": 2, "base": 7, "best": 12}  # 1-based left column


def read_cells(path):
    """sheet name -> {(row, col): stripped cell string}."""
    sheets = {}
    current = None
    row = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.strip().startswith("#"):
                continue
            if line.strip().startswith("[sheet:"):
                current = line.strip()[len("[sheet:"):-1].strip()
                sheets[current] = {}
                row = 0
                continue
            if current is None:
                continue
            row += 1
            for col, raw in enumerate(line.split("|"), start=1):
                text = raw.strip()
                if text:
                    sheets[current][(row, col)] = text
    return sheets


def number(sheets, sheet, row, col, default=0.0):
    text = sheets[sheet].get((row, col))
    return float(text) if text is not None else default


def compute_npv(path):
    sheets = read_cells(path)

    distance = [[number(sheets, "Inputs", 2 + i, 2 + j) for j in range(3)]
                for i in range(3)]
    margin = [[number(sheets, "Inputs", 7 + i, 2 + j) for j in range(3)]
              for i in range(3)]
    per_mile = number(sheets, "Inputs", 11, 2)
    wacc = number(sheets, "Inputs", 12, 2)

    investment = sum(sum(row) for row in distance) * per_mile

    npv = {}
    for scenario in SCENARIOS:
        left = BLOCK_LEFT[scenario]
        total = 0.0
        for k, year in enumerate(YEARS):
            sheet = f"Year_{year}"
            revenue = 0.0
            for i in range(3):
                for j in range(3):
                    revenue += number(sheets, sheet, 2 + i, left + j) * margin[i][j]
            cash_flow = revenue - (investment if k == 0 else 0.0)
            total += cash_flow / (1.0 + wacc) ** k
        npv[scenario] = total
    return npv


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "workbook.wbk")
    for scenario, value in compute_npv(path).items():
        print(f"NPV({scenario}) = {value!r}")


if __name__ == "__main__":
    main()
