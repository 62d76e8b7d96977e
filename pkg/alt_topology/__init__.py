"""
Alt Topology

Capacity formulas, achievable linear schedules, decodability checks and
exhaustive linear-scheme search for partially connected wired networks over
GF(p) whose connectivity alternates between known topology states.
"""

from .alt_topology import AltTopology
from .errors import AltTopologyError
from .field import FieldSpec, Matrix
from .schemes import LinearScheme
from .topology import StateFractions, StateSequence, TopologyState

__version__ = "1.0.0"
__all__ = ["AltTopology", "AltTopologyError", "FieldSpec", "LinearScheme", "Matrix", "StateFractions",
           "StateSequence", "TopologyState"]
