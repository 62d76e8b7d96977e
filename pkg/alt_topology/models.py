"""Report and configuration models for alt-topology"""

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .capacity import BoundSet, rate_entry
from .errors import SchemeError, TopologyError
from .field import FieldSpec
from .schemes import LinearScheme
from .topology import (
    ChannelRealization,
    StateFractions,
    StateSequence,
    TopologyState,
)

SCENARIOS = ("ic2", "x2", "bc2", "ic3-example")
SEQUENCE_MODES = ("quota", "iid")
DECODABILITY_MODES = ("worst", "generic")


@dataclass
class DecodabilityReport:
    """Outcome of a decodability check"""

    mode: str                                  # single, worst-case, generic, generic-sampled, exhaustive-fraction
    verdict: bool
    receivers: List[bool]                      # per-receiver verdicts
    realizations: int                          # realizations examined (trials when sampled)
    failures: int
    exact: bool = True                         # failure_fraction exact or a sampled estimate
    counterexample: Optional[ChannelRealization] = None
    flags: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.mode == "worst-case" and self.verdict and self.counterexample is not None:
            raise ValueError("a passing worst-case report carries no counterexample")
        if self.mode == "worst-case" and not self.verdict and self.counterexample is None:
            raise ValueError("a failing worst-case report needs a counterexample")

    @property
    def failure_fraction(self) -> Fraction:
        return Fraction(self.failures, self.realizations) if self.realizations else Fraction(0)

    @property
    def standard_error(self) -> Optional[float]:
        """Binomial standard error of a sampled estimate"""
        if self.exact or not self.realizations:
            return None
        q = float(self.failure_fraction)
        return (q * (1 - q) / self.realizations) ** 0.5

    def to_dict(self) -> dict:
        """Convert report to dictionary representation"""
        data = {
            "mode": self.mode,
            "verdict": "pass" if self.verdict else "fail",
            "receivers": {f"Rx{r + 1}": ok for r, ok in enumerate(self.receivers)},
            "realizations": self.realizations,
            "failures": self.failures,
            "failure_fraction": rate_entry(self.failure_fraction),
            "exact": self.exact,
            "flags": list(self.flags),
        }
        if not self.exact:
            data["trials"] = self.realizations
            data["standard_error"] = self.standard_error
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample.to_dict()
        return data


@dataclass
class SearchSpec:
    """Parameters of an exhaustive linear-scheme search (IC message model)"""

    seq: StateSequence
    field: FieldSpec
    decodability: str = "worst"
    max_symbols: Union[int, Tuple[int, ...], None] = None    # per-transmitter cap, default n
    budget: int = 10 ** 6
    candidate_limit: Optional[int] = None

    def __post_init__(self):
        if self.decodability not in DECODABILITY_MODES:
            raise SchemeError(f"decodability must be one of {DECODABILITY_MODES}, got {self.decodability!r}")
        if self.budget <= 0:
            raise SchemeError("search budget must be positive")
        caps = self.caps
        if len(caps) != self.seq.k or any(c < 0 for c in caps):
            raise SchemeError(f"symbol caps {caps} do not fit {self.seq.k} transmitters")

    @property
    def caps(self) -> Tuple[int, ...]:
        if self.max_symbols is None:
            return (self.seq.n,) * self.seq.k
        if isinstance(self.max_symbols, int):
            return (self.max_symbols,) * self.seq.k
        return tuple(int(c) for c in self.max_symbols)

    def to_dict(self) -> dict:
        """Convert search parameters to dictionary representation"""
        return {
            "sequence": list(self.seq.ids),
            "states": {sid: state.to_rows() for sid, state in self.seq.catalog.items()},
            "field": self.field.p,
            "decodability": self.decodability,
            "max_symbols": list(self.caps),
            "budget": self.budget,
        }


@dataclass
class SearchResult:
    """Linear zero-error optimum found by the oracle"""

    best_rate: Fraction
    symbols: Tuple[int, ...]                   # per-transmitter symbol counts of the witness
    witness: Optional[LinearScheme]
    candidates: int
    exhaustive: bool
    decodability: str = "worst"

    def to_dict(self) -> dict:
        """Convert result to dictionary representation"""
        return {
            "quantity": "linear zero-error optimum",
            "best_rate": rate_entry(self.best_rate),
            "symbols": list(self.symbols),
            "candidates": self.candidates,
            "exhaustive": self.exhaustive,
            "decodability": self.decodability,
            "witness": self.witness.to_dict() if self.witness is not None else None,
        }


@dataclass
class ExampleProfile:
    """Rate profile of a 3-user topology pair"""

    pair: Tuple[TopologyState, TopologyState]
    individual: Tuple[Fraction, Fraction]
    joint: Fraction
    pairwise: Dict[Tuple[int, int], Fraction]
    witness: Optional[LinearScheme] = None

    @property
    def passes(self) -> bool:
        return (all(r == 1 for r in self.individual)
                and self.joint >= Fraction(3, 2)
                and all(r <= 1 for r in self.pairwise.values()))

    def to_dict(self) -> dict:
        """Convert profile to dictionary representation"""
        return {
            "states": [state.to_rows() for state in self.pair],
            "individual": [str(r) for r in self.individual],
            "joint": str(self.joint),
            "pairwise": {f"{i + 1}-{j + 1}": str(r) for (i, j), r in sorted(self.pairwise.items())},
            "pass": self.passes,
            "witness": self.witness.to_dict() if self.witness is not None else None,
        }


@dataclass
class SimConfig:
    """One simulation run"""

    scenario: str
    fractions: StateFractions
    p: int = 3
    n: int = 3000
    seed: int = 0
    sequence_mode: str = "quota"
    decodability: str = "worst"
    pair_file: Optional[str] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise TopologyError(f"unknown scenario {self.scenario!r}, expected one of {SCENARIOS}")
        if self.sequence_mode not in SEQUENCE_MODES:
            raise TopologyError(f"sequence mode must be one of {SEQUENCE_MODES}")
        if self.decodability not in DECODABILITY_MODES:
            raise TopologyError(f"decodability must be one of {DECODABILITY_MODES}")
        if self.n < 1:
            raise TopologyError(f"block length must be at least 1, got {self.n}")

    def to_dict(self) -> dict:
        """Convert config to dictionary representation; also the config hash payload"""
        return {
            "scenario": self.scenario,
            "fractions": self.fractions.to_strings(),
            "p": self.p,
            "n": self.n,
            "seed": self.seed,
            "sequence_mode": self.sequence_mode,
            "decodability": self.decodability,
            "pair_file": self.pair_file,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()


@dataclass
class RateReport:
    """Simulated rate against the closed-form value"""

    config: SimConfig
    achieved: Fraction
    formula: Optional[Fraction]
    bounds: Optional[BoundSet]
    scheme_rate: Fraction
    decoded: int
    decode_failures: int
    counts: Dict[str, int]
    empirical_formula: Optional[Fraction] = None
    runtime: float = 0.0
    provenance: Dict[str, object] = field(default_factory=dict)

    @property
    def gap(self) -> Optional[Fraction]:
        """Formula at the requested fractions minus the achieved rate

        Rounding a quota block can put the achieved rate above this value,
        so the gap may be negative when n does not clear the denominators.
        """
        return None if self.formula is None else self.formula - self.achieved

    @property
    def empirical_gap(self) -> Optional[Fraction]:
        """Formula at the fractions the block actually realized minus the achieved rate"""
        return None if self.empirical_formula is None else self.empirical_formula - self.achieved

    def to_dict(self) -> dict:
        """Convert report to dictionary representation, timing in its own block"""
        return {
            "config": self.config.to_dict(),
            "achieved": rate_entry(self.achieved),
            "formula": rate_entry(self.formula) if self.formula is not None else None,
            "gap": rate_entry(self.gap) if self.gap is not None else None,
            "empirical_formula": rate_entry(self.empirical_formula) if self.empirical_formula is not None else None,
            "empirical_gap": rate_entry(self.empirical_gap) if self.empirical_gap is not None else None,
            "bounds": self.bounds.to_dict() if self.bounds is not None else None,
            "scheme_rate": rate_entry(self.scheme_rate),
            "decoded_symbols": self.decoded,
            "decode_failures": self.decode_failures,
            "state_counts": dict(self.counts),
            "provenance": dict(self.provenance),
            "timing": {"runtime_seconds": round(self.runtime, 6)},
        }


@dataclass
class ExamplePairConfig:
    """A topology-pair file registered in the configuration"""

    id: str                          # Short identifier used on the command line
    path: str                        # Grid file holding the two states
    name: str = ""                   # Human-readable name

    def __post_init__(self):
        if not self.id or not self.path:
            raise TopologyError("example pair entries need both id and path")
        if not self.name:
            self.name = self.id

    @classmethod
    def from_dict(cls, data: dict) -> "ExamplePairConfig":
        """Create ExamplePairConfig from a configuration entry"""
        return cls(id=str(data.get("id", "")), path=str(data.get("path", "")), name=str(data.get("name", "")))

    def to_dict(self) -> dict:
        """Convert pair entry to dictionary representation"""
        return {"id": self.id, "name": self.name, "path": self.path}
