"""Base scenario abstraction"""

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple
import logging

from ..capacity import BoundSet, rate_entry
from ..errors import FractionsError, TheoremPreconditionError
from ..field import FieldSpec
from ..schemes import LinearScheme
from ..topology import TWO_USER_IDS, TWO_USER_STATES, StateFractions, StateSequence, TopologyState

FORMULA_OPEN = "formula-open"


class BaseScenario(ABC):
    """A network model with its capacity formula and achievable schedule"""

    def __init__(self, logger: Optional[logging.Logger] = None):
        """Initialize the scenario

        Args:
            logger: Logger instance for output
        """
        self.logger = logger or logging.getLogger(__name__)

    @property
    @abstractmethod
    def name(self) -> str:
        """Scenario identifier used on the command line"""
        pass

    @abstractmethod
    def formula(self, fractions: StateFractions) -> Fraction:
        """Closed-form sum capacity

        Raises:
            TheoremPreconditionError: If the fractions are outside the proven case
        """
        pass

    @abstractmethod
    def build_for_sequence(self, seq: StateSequence, field: FieldSpec) -> LinearScheme:
        """Schedule over an already realized state sequence"""
        pass

    @property
    def state_ids(self) -> Tuple[str, ...]:
        return TWO_USER_IDS

    @property
    def catalog(self) -> Mapping[str, TopologyState]:
        return TWO_USER_STATES

    def bounds(self, fractions: StateFractions) -> Optional[BoundSet]:
        return None

    def parse_fractions(self, text: str) -> StateFractions:
        return StateFractions.parse(text, self.state_ids)

    def check_fractions(self, fractions: StateFractions) -> None:
        if set(fractions.ids) != set(self.state_ids):
            raise FractionsError(f"{self.name} needs fractions for states {self.state_ids}, got {fractions.ids}")

    def formula_or_none(self, fractions: StateFractions) -> Optional[Fraction]:
        """Formula value, None where the capacity is open"""
        try:
            return self.formula(fractions)
        except TheoremPreconditionError as e:
            self.logger.debug(f"No closed form: {e}")
            return None

    def flags(self, fractions: StateFractions, field: FieldSpec) -> List[str]:
        flags = list(field.flags)
        if self.formula_or_none(fractions) is None:
            flags.append(FORMULA_OPEN)
        return flags

    def capacity_report(self, fractions: StateFractions, field: FieldSpec) -> Dict[str, object]:
        """Formula and bounds for the capacity command; preconditions are enforced"""
        self.check_fractions(fractions)
        report: Dict[str, object] = {
            "scenario": self.name,
            "fractions": fractions.to_strings(),
            "field": field.p,
            "capacity": rate_entry(self.formula(fractions)),
            "flags": list(field.flags),
        }
        bounds = self.bounds(fractions)
        if bounds is not None:
            report["bounds"] = bounds.to_dict()
        return report
