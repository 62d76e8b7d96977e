"""Exception hierarchy for alt-topology

Every error carries the process exit code the command line maps it to.
"""

from typing import Optional


class AltTopologyError(Exception):
    """Base class for all alt-topology errors"""

    exit_code = 2


class FieldError(AltTopologyError, ValueError):
    """Invalid field construction or arithmetic"""


class FieldMismatchError(FieldError):
    """Operands belong to different prime fields"""


class NonInvertibleError(FieldError, ZeroDivisionError):
    """Inversion of the zero element"""


class DimensionError(AltTopologyError, ValueError):
    """Vector or matrix shapes do not agree"""


class UsageError(AltTopologyError, ValueError):
    """Invalid command or method arguments"""


class CorruptedInputError(AltTopologyError):
    """A linear system that should be consistent is not"""


class FractionsError(AltTopologyError, ValueError):
    """State fractions are malformed, negative or do not sum to 1"""


class TopologyError(AltTopologyError, ValueError):
    """Invalid topology state or state sequence"""


class ParseError(AltTopologyError):
    """Text input rejected at a specific line"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TopologyParseError(ParseError, TopologyError):
    """Malformed topology grid file"""


class RealizationMismatchError(AltTopologyError, ValueError):
    """Channel realization does not match the scheme's state sequence"""


class SchemeError(AltTopologyError, ValueError):
    """Invalid linear scheme or message configuration"""


class SchemeParseError(ParseError, SchemeError):
    """Malformed scheme file"""


class MalformedAssignmentError(SchemeError):
    """Slot-activity assignment leaves a symbol untransmitted"""


class TheoremPreconditionError(AltTopologyError):
    """Capacity formula evaluated outside the case it was proven for"""

    def __init__(self, theorem: str, message: str):
        self.theorem = theorem
        super().__init__(f"{theorem}: {message}")


class EnumerationTooLargeError(AltTopologyError):
    """Exhaustive realization enumeration exceeds the guard"""

    exit_code = 3

    def __init__(self, count: int, guard: int):
        self.count = count
        self.guard = guard
        super().__init__(
            f"too-large-to-enumerate: {count} realizations exceed the guard of {guard}; "
            f"use the sampled (generic) check instead"
        )


class BudgetExceededError(AltTopologyError):
    """Oracle search space exceeds the candidate budget"""

    exit_code = 3

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"search needs up to {required} candidates, budget is {budget}")


class DecodeFailureError(AltTopologyError):
    """A schedule certified decodable failed to decode"""

    exit_code = 1
