import csv
import io

import pytest

from shadowaudit.cost import (
    EffortParams,
    crossover_levels,
    distinct_formula_count,
    effort_per_relationship,
    emit_curves,
    total_effort_check,
)


def test_distinct_formula_count():
    assert distinct_formula_count(1, 10) == 1
    assert distinct_formula_count(2, 10) == 1
    assert distinct_formula_count(3, 10) == 10
    assert distinct_formula_count(4, 10) == 100
    assert distinct_formula_count(5, 2) == 8


def test_distinct_formula_count_validates():
    with pytest.raises(ValueError):
        distinct_formula_count(0, 5)
    with pytest.raises(ValueError):
        distinct_formula_count(3, 0)


def test_effort_per_relationship():
    params = EffortParams(3, 10, cost_per_formula=3.0, around_ratio=2.0)
    assert effort_per_relationship(params, "traditional") == 30.0
    assert effort_per_relationship(params, "around") == 6.0
    with pytest.raises(ValueError):
        effort_per_relationship(params, "sideways")


def test_around_effort_independent_of_levels():
    for levels in (1, 5, 50):
        params = EffortParams(4, levels)
        assert effort_per_relationship(params, "around") == 6.0


def test_crossover_levels():
    assert crossover_levels(3, 2.0) == 2
    assert crossover_levels(4, 2.0) == 2
    assert crossover_levels(5, 100.0) == 5  # 5^3 = 125 >= 100
    assert crossover_levels(2, 2.0) is None
    assert crossover_levels(1, 2.0) is None
    assert crossover_levels(2, 1.0) == 1
    assert crossover_levels(2, 0.5) == 1


def test_crossover_is_consistent_with_effort():
    for d in (3, 4, 5):
        level = crossover_levels(d, 2.0)
        below = EffortParams(d, level - 1) if level > 1 else None
        at = EffortParams(d, level)
        assert effort_per_relationship(at, "traditional") >= effort_per_relationship(
            at, "around"
        )
        if below is not None:
            assert effort_per_relationship(
                below, "traditional"
            ) < effort_per_relationship(below, "around")


def test_emit_curves_shape_and_monotonicity():
    text = emit_curves([1, 2, 3, 4], range(1, 31))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["d", "levels", "traditional_minutes", "around_minutes"]
    assert len(rows) == 1 + 4 * 30
    by_d = {}
    for d, levels, trad, around in rows[1:]:
        by_d.setdefault(int(d), []).append((int(levels), float(trad), float(around)))
    for d, series in by_d.items():
        trads = [t for _, t, _ in series]
        arounds = [a for _, _, a in series]
        assert arounds == [arounds[0]] * len(arounds)  # flat in levels
        if d <= 2:
            assert trads == [trads[0]] * len(trads)
        else:
            assert all(b > a for a, b in zip(trads, trads[1:]))  # strictly rising


def test_total_effort_check():
    assert total_effort_check(500, 3.0) == 25.0
    assert total_effort_check(1500, 3.0) == 75.0
    assert total_effort_check(0) == 0.0
    with pytest.raises(ValueError):
        total_effort_check(-1)
    with pytest.raises(ValueError):
        total_effort_check(10, 0.0)


def test_effort_params_validate():
    with pytest.raises(ValueError):
        EffortParams(0, 1)
    with pytest.raises(ValueError):
        EffortParams(1, 1, cost_per_formula=-1.0)
