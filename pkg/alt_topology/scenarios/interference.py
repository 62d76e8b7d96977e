"""Two-user interference and X channel scenarios"""

from fractions import Fraction
from typing import Dict, Optional

from .base import BaseScenario
from ..capacity import (
    BoundSet,
    baseline_and_gain_ic2,
    outer_bounds_ic2,
    rate_entry,
    theorem1_sum_capacity,
    theorem2_sum_capacity,
)
from ..field import FieldSpec
from ..schemes import LinearScheme, build_schedule_ic2_for_sequence, build_schedule_x2_for_sequence
from ..topology import StateFractions, StateSequence


class InterferenceScenario(BaseScenario):
    """Two-user interference channel, one message per transmitter"""

    @property
    def name(self) -> str:
        return "ic2"

    def formula(self, fractions: StateFractions) -> Fraction:
        return theorem1_sum_capacity(fractions)

    def bounds(self, fractions: StateFractions) -> Optional[BoundSet]:
        return outer_bounds_ic2(fractions)

    def build_for_sequence(self, seq: StateSequence, field: FieldSpec) -> LinearScheme:
        return build_schedule_ic2_for_sequence(seq, field)

    def capacity_report(self, fractions: StateFractions, field: FieldSpec) -> Dict[str, object]:
        report = super().capacity_report(fractions, field)
        baseline, gain = baseline_and_gain_ic2(fractions)
        report["baseline"] = rate_entry(baseline)
        report["gain"] = rate_entry(gain)
        return report


class XChannelScenario(InterferenceScenario):
    """Two-user X channel; the schedule only uses the W11 and W22 messages"""

    @property
    def name(self) -> str:
        return "x2"

    def formula(self, fractions: StateFractions) -> Fraction:
        return theorem2_sum_capacity(fractions)

    def build_for_sequence(self, seq: StateSequence, field: FieldSpec) -> LinearScheme:
        return build_schedule_x2_for_sequence(seq, field)
