"""Two-user broadcast scenario with cooperating transmitters"""

from fractions import Fraction
from typing import Dict

from .base import BaseScenario
from ..capacity import csit_state_mapping, theorem3_sum_capacity
from ..field import FieldSpec
from ..schemes import LinearScheme, build_schedule_bc2_for_sequence
from ..topology import StateFractions, StateSequence


class BroadcastScenario(BaseScenario):
    """Vector broadcast channel: both transmitters know every symbol"""

    @property
    def name(self) -> str:
        return "bc2"

    def formula(self, fractions: StateFractions) -> Fraction:
        return theorem3_sum_capacity(fractions)

    def build_for_sequence(self, seq: StateSequence, field: FieldSpec) -> LinearScheme:
        return build_schedule_bc2_for_sequence(seq, field)

    def capacity_report(self, fractions: StateFractions, field: FieldSpec) -> Dict[str, object]:
        report = super().capacity_report(fractions, field)
        report["csit_mapping"] = {state: f"({a},{b})" for state, (a, b) in csit_state_mapping().items()}
        if not field.theorem_preconditions_met:
            self.logger.warning(f"Over {field} zero-forcing beats the cooperative formula; value is not a capacity")
        return report
