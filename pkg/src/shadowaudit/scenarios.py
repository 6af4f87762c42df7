"""Test-set generation: default, one-at-a-time, pairwise and seeded random
scenarios over the declared input variables.

Random draws use splitmix64 (Steele et al.'s SplitMix stream) mapped to a
53-bit uniform double, so a seed reproduces the exact same scenarios on
any platform or implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Tuple, Union

from .errors import InputError
from .workbook import CellAddress, format_number

ParamTarget = Tuple[str, Tuple[str, ...]]
Target = Union[CellAddress, ParamTarget]


class TooFewVars(InputError):
    pass


def target_text(target: Target) -> str:
    if isinstance(target, CellAddress):
        return target.a1()
    name, tup = target
    if not tup:
        return name
    return f"{name}({','.join(tup)})"


@dataclass(frozen=True)
class InputVar:
    target: Target
    default: float
    vmin: float
    vmax: float

    def __post_init__(self):
        if not (self.vmin <= self.default <= self.vmax):
            raise InputError(
                f"{target_text(self.target)}: need min <= default <= max, got "
                f"{self.vmin} / {self.default} / {self.vmax}"
            )

    @property
    def name(self) -> str:
        return target_text(self.target)


@dataclass
class Scenario:
    id: str
    assignments: List[Tuple[Target, float]]
    degenerate: bool = False


def gen_default(variables: List[InputVar]) -> List[Scenario]:
    return [Scenario("default", [(v.target, v.default) for v in variables])]


def gen_one_at_a_time(variables: List[InputVar]) -> List[Scenario]:
    """Two scenarios per variable: at min and at max, all others default."""
    out: List[Scenario] = []
    for var in variables:
        for extreme, value in (("min", var.vmin), ("max", var.vmax)):
            assignments = [
                (v.target, value if v is var else v.default) for v in variables
            ]
            degenerate = value == var.default
            out.append(Scenario(f"oat:{var.name}:{extreme}", assignments, degenerate))
    return out


def gen_pairwise(variables: List[InputVar]) -> List[Scenario]:
    """Four {min,max} x {min,max} scenarios per unordered variable pair."""
    if len(variables) < 2:
        raise TooFewVars("pairwise generation needs at least two variables")
    out: List[Scenario] = []
    for a, b in combinations(variables, 2):
        for a_ext, a_val in (("min", a.vmin), ("max", a.vmax)):
            for b_ext, b_val in (("min", b.vmin), ("max", b.vmax)):
                assignments = []
                for v in variables:
                    if v is a:
                        value = a_val
                    elif v is b:
                        value = b_val
                    else:
                        value = v.default
                    assignments.append((v.target, value))
                degenerate = a_val == a.default and b_val == b.default
                out.append(
                    Scenario(
                        f"pair:{a.name}:{a_ext}:{b.name}:{b_ext}",
                        assignments,
                        degenerate,
                    )
                )
    return out


class SplitMix64:
    """Deterministic 64-bit generator; documented so runs are replayable."""

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float, hi: float) -> float:
        frac = (self.next_u64() >> 11) * (2.0 ** -53)  # [0, 1)
        value = lo + frac * (hi - lo)
        return min(max(value, lo), hi)


def gen_random(variables: List[InputVar], count: int, seed: int) -> List[Scenario]:
    if count < 1:
        raise InputError("random scenario count must be >= 1")
    rng = SplitMix64(seed)
    out: List[Scenario] = []
    for k in range(count):
        assignments = [(v.target, rng.uniform(v.vmin, v.vmax)) for v in variables]
        out.append(Scenario(f"random:{k}", assignments))
    return out


def gen_suite(
    variables: List[InputVar],
    suite: str = "full",
    random_count: int = 0,
    seed: int = 0,
) -> List[Scenario]:
    """Compose a named suite: full = default + oat + pairwise + random N."""
    if suite == "default":
        return gen_default(variables)
    if suite == "oat":
        return gen_default(variables) + gen_one_at_a_time(variables)
    if suite == "pairwise":
        return gen_default(variables) + gen_pairwise(variables)
    if suite == "full":
        out = gen_default(variables) + gen_one_at_a_time(variables)
        if len(variables) >= 2:
            out += gen_pairwise(variables)
        if random_count:
            out += gen_random(variables, random_count, seed)
        return out
    raise InputError(f"unknown suite {suite!r}")


def emit_scenarios(scenarios: List[Scenario]) -> str:
    """One line per scenario: ``id: target=value; target=value``."""
    lines = []
    for scenario in scenarios:
        parts = "; ".join(
            f"{target_text(t)}={format_number(v)}" for t, v in scenario.assignments
        )
        lines.append(f"{scenario.id}: {parts}")
    return "\n".join(lines) + ("\n" if lines else "")
