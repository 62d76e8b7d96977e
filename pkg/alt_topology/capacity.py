"""Closed-form sum capacities, outer bounds and baselines for 2-user networks

Every value is an exact Fraction; fractions are keyed by the state ids A-D.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .errors import FractionsError, TheoremPreconditionError
from .topology import StateFractions

MAX_DECIMAL_DIGITS = 40


def decimal_string(value: Fraction) -> str:
    """Exact decimal expansion, repeating block in parentheses: 4/3 -> '1.(3)'"""
    value = Fraction(value)
    sign = "-" if value < 0 else ""
    num, den = abs(value.numerator), value.denominator
    whole, rem = divmod(num, den)
    if rem == 0:
        return f"{sign}{whole}"

    digits: List[str] = []
    seen: Dict[int, int] = {}
    while rem and rem not in seen:
        if len(digits) == MAX_DECIMAL_DIGITS:
            return f"{sign}{whole}.{''.join(digits)}..."
        seen[rem] = len(digits)
        digit, rem = divmod(rem * 10, den)
        digits.append(str(digit))
    if not rem:
        return f"{sign}{whole}.{''.join(digits)}"
    start = seen[rem]
    return f"{sign}{whole}.{''.join(digits[:start])}({''.join(digits[start:])})"


def rate_entry(value: Fraction) -> Dict[str, str]:
    """Exact and decimal rendering of a rate for reports"""
    return {"value": str(value), "decimal": decimal_string(value)}


@dataclass(frozen=True)
class BoundSet:
    """The three 2-user sum-rate outer bounds"""

    z_bound: Fraction
    mac_bound_1: Fraction
    mac_bound_2: Fraction

    NAMES = ("Z-bound", "MAC-bound-1", "MAC-bound-2")

    def values(self) -> Dict[str, Fraction]:
        """Bounds keyed by their report names"""
        return dict(zip(self.NAMES, (self.z_bound, self.mac_bound_1, self.mac_bound_2)))

    @property
    def minimum(self) -> Fraction:
        return min(self.z_bound, self.mac_bound_1, self.mac_bound_2)

    def to_dict(self) -> dict:
        """Convert bounds to dictionary representation"""
        return {name: rate_entry(v) for name, v in self.values().items()}


def _lambdas(f: StateFractions) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """lambda_A, lambda_B, lambda_C and lambda_D, absent states counting as 0"""
    return f.get("A"), f.get("B"), f.get("C"), f.get("D")


def theorem1_sum_capacity(f: StateFractions) -> Fraction:
    """Two-user IC: 1 + lambda_D + min(lambda_A, lambda_B, lambda_C)"""
    a, b, c, d = _lambdas(f)
    return 1 + d + min(a, b, c)


def outer_bounds_ic2(f: StateFractions) -> BoundSet:
    """Sum-rate outer bounds of the 2-user IC

    Args:
        f: Fractions over the states A-D

    Returns:
        BoundSet with Z-bound 1 + lambda_C + lambda_D, MAC-bound-1 1 + lambda_B + lambda_D
        and MAC-bound-2 1 + lambda_A + lambda_D
    """
    a, b, c, d = _lambdas(f)
    return BoundSet(z_bound=1 + c + d, mac_bound_1=1 + b + d, mac_bound_2=1 + a + d)


def baseline_and_gain_ic2(f: StateFractions) -> Tuple[Fraction, Fraction]:
    """Rate without joint coding across states, and what joint coding adds"""
    baseline = 1 + f.get("D")
    return baseline, theorem1_sum_capacity(f) - baseline


def _require_symmetric(f: StateFractions, theorem: str) -> None:
    a, b, _, _ = _lambdas(f)
    if a != b:
        raise TheoremPreconditionError(
            theorem, f"requires lambda_A = lambda_B, got {a} and {b}; only the outer bounds are known here")


def theorem2_sum_capacity(f: StateFractions) -> Fraction:
    """Symmetric X channel: 1 + lambda_D + min(lambda_A, lambda_C)"""
    _require_symmetric(f, "theorem2_sum_capacity")
    a, _, c, d = _lambdas(f)
    return 1 + d + min(a, c)


def theorem3_sum_capacity(f: StateFractions) -> Fraction:
    """Symmetric cooperative (BC) transmitters: 1 + lambda_A + lambda_D

    Holds for fields larger than GF(2); over GF(2) zero-forcing reaches 2, so
    reports carry FieldSpec.flags next to this value.
    """
    _require_symmetric(f, "theorem3_sum_capacity")
    a, _, _, d = _lambdas(f)
    return 1 + a + d


def csit_state_mapping() -> Dict[str, Tuple[str, str]]:
    """Topology states as alternating-CSIT states (N = no CSIT, P = perfect CSIT)"""
    return {
        "A": ("N", "P"),
        "B": ("P", "N"),
        "C": ("N", "N"),
        "D": ("P", "P"),
    }


def rate_grid(denominator: int) -> List[StateFractions]:
    """Every (A, B, C, D) fraction vector with the given common denominator"""
    if denominator < 1:
        raise FractionsError(f"denominator must be positive, got {denominator}")
    grid = []
    for a, b, c in itertools.product(range(denominator + 1), repeat=3):
        d = denominator - a - b - c
        if d < 0:
            continue
        grid.append(StateFractions.two_user(*(Fraction(x, denominator) for x in (a, b, c, d))))
    return grid


SWEEP_COLUMNS = ("lambda_A", "lambda_B", "lambda_C", "lambda_D", "capacity", "baseline", "gain",
                 "Z-bound", "MAC-bound-1", "MAC-bound-2")


def sweep_rows(denominator: int) -> List[Dict[str, str]]:
    """Rows for the capacity sweep CSV, exact values as 'num/den' strings"""
    rows = []
    for f in rate_grid(denominator):
        baseline, gain = baseline_and_gain_ic2(f)
        bounds = outer_bounds_ic2(f)
        values = [*_lambdas(f), theorem1_sum_capacity(f), baseline, gain,
                  bounds.z_bound, bounds.mac_bound_1, bounds.mac_bound_2]
        rows.append(dict(zip(SWEEP_COLUMNS, (str(v) for v in values))))
    return rows
