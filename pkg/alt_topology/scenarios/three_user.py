"""Three-user example: two states with rate 1 each that reach 3/2 when coded jointly"""

from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .base import BaseScenario
from ..errors import SchemeError, TheoremPreconditionError
from ..field import FieldSpec
from ..oracle import LinearRateOracle
from ..schemes import LinearScheme, build_schedule_ic3
from ..topology import StateFractions, StateSequence, TopologyState, load_topology_pair


class ThreeUserExampleScenario(BaseScenario):
    """Alternates between the two states of a topology-pair file"""

    def __init__(self, pair: Tuple[TopologyState, TopologyState], decodability: str = "worst",
                 oracle: Optional[LinearRateOracle] = None, logger=None):
        """Initialize the scenario

        Args:
            pair: The two 3-user states; their names become the state ids
            decodability: Mode the joint witness is searched in
            oracle: Oracle used to find the joint witness
            logger: Logger instance for output
        """
        super().__init__(logger)
        first, second = pair
        if first.k != 3 or second.k != 3:
            raise SchemeError("the 3-user example needs two 3-user states")
        if not first.name or not second.name or first.name == second.name:
            first, second = TopologyState(first.present, "S1"), TopologyState(second.present, "S2")
        self.pair = (first, second)
        self.decodability = decodability
        self.oracle = oracle or LinearRateOracle(logger=self.logger)
        self._witnesses: Dict[int, LinearScheme] = {}

    @classmethod
    def from_file(cls, path: str, decodability: str = "worst", oracle: Optional[LinearRateOracle] = None,
                  logger=None) -> "ThreeUserExampleScenario":
        return cls(load_topology_pair(path), decodability, oracle, logger)

    @property
    def name(self) -> str:
        return "ic3-example"

    @property
    def state_ids(self) -> Tuple[str, ...]:
        return tuple(state.name for state in self.pair)

    @property
    def catalog(self) -> Mapping[str, TopologyState]:
        return {state.name: state for state in self.pair}

    def formula(self, fractions: StateFractions) -> Fraction:
        """3/2 when the two states alternate evenly; open otherwise"""
        first, second = self.state_ids
        if fractions.get(first) != Fraction(1, 2) or fractions.get(second) != Fraction(1, 2):
            raise TheoremPreconditionError(
                "ic3-example sum capacity", "only the even split between the two states is characterized")
        return Fraction(3, 2)

    def witness(self, field: FieldSpec) -> LinearScheme:
        """Joint 2-slot scheme carrying one symbol per user"""
        if field.p not in self._witnesses:
            result = self.oracle.joint_search(self.pair, field, self.decodability)
            if result.best_rate < Fraction(3, 2):
                raise SchemeError(f"state pair reaches only {result.best_rate} jointly over {field}, "
                                  f"it is not a joint-coding example")
            self.logger.info(f"Joint witness over {field} found after {result.candidates} candidates")
            self._witnesses[field.p] = result.witness
        return self._witnesses[field.p]

    def build_for_sequence(self, seq: StateSequence, field: FieldSpec) -> LinearScheme:
        return build_schedule_ic3(seq, self.witness(field))
