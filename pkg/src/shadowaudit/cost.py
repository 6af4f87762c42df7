"""Analytical comparison of audit effort: formula-by-formula inspection
versus the shadow-model comparison.

A two-dimensional layout needs a single distinct formula per relationship;
every dimension beyond the second multiplies the distinct-formula count by
the number of levels (one formula per worksheet or block slice), hence
``levels ** max(d - 2, 0)``.  Comparing through a shadow model costs a
fixed multiple of one formula inspection, independent of levels.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from typing import Iterable, Optional

DEFAULT_COST_MINUTES = 3.0
DEFAULT_AROUND_RATIO = 2.0


@dataclass(frozen=True)
class EffortParams:
    dimensions: int
    levels: int
    cost_per_formula: float = DEFAULT_COST_MINUTES  # minutes
    around_ratio: float = DEFAULT_AROUND_RATIO

    def __post_init__(self):
        if self.dimensions < 1 or self.levels < 1:
            raise ValueError("dimensions and levels must be >= 1")
        if self.cost_per_formula <= 0 or self.around_ratio <= 0:
            raise ValueError("cost and ratio must be positive")


def distinct_formula_count(dimensions: int, levels: int) -> int:
    """Distinct formulas needed for one relationship over all dimensions."""
    if dimensions < 1 or levels < 1:
        raise ValueError("dimensions and levels must be >= 1")
    return levels ** max(dimensions - 2, 0)


def effort_per_relationship(params: EffortParams, approach: str) -> float:
    """Minutes to audit one relationship under the given approach."""
    if approach == "traditional":
        return params.cost_per_formula * distinct_formula_count(
            params.dimensions, params.levels
        )
    if approach == "around":
        return params.around_ratio * params.cost_per_formula
    raise ValueError(f"unknown approach {approach!r}")


def crossover_levels(dimensions: int, ratio: float = DEFAULT_AROUND_RATIO) -> Optional[int]:
    """Smallest level count where the around approach is at least as cheap,
    or None when the traditional approach always wins (d <= 2, ratio > 1)."""
    if dimensions < 1:
        raise ValueError("dimensions must be >= 1")
    if dimensions <= 2:
        return 1 if ratio <= 1 else None
    levels = 1
    while levels ** (dimensions - 2) < ratio:
        levels += 1
    return levels


def emit_curves(
    dimension_list: Iterable[int],
    level_range: Iterable[int],
    cost_per_formula: float = DEFAULT_COST_MINUTES,
    around_ratio: float = DEFAULT_AROUND_RATIO,
) -> str:
    """CSV with columns d,levels,traditional_minutes,around_minutes."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["d", "levels", "traditional_minutes", "around_minutes"])
    levels_list = list(level_range)
    for d in dimension_list:
        for levels in levels_list:
            params = EffortParams(d, levels, cost_per_formula, around_ratio)
            writer.writerow([
                d,
                levels,
                _fmt(effort_per_relationship(params, "traditional")),
                _fmt(effort_per_relationship(params, "around")),
            ])
    return buffer.getvalue()


def _fmt(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def total_effort_check(n_formulas: int, cost_per_formula: float = DEFAULT_COST_MINUTES) -> float:
    """Whole-spreadsheet effort in hours for formula-by-formula inspection."""
    if n_formulas < 0 or cost_per_formula <= 0:
        raise ValueError("need n_formulas >= 0 and positive cost")
    return n_formulas * cost_per_formula / 60.0
