"""Connectivity states, state fractions, state sequences and channel realizations"""

import itertools
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    EnumerationTooLargeError,
    FractionsError,
    RealizationMismatchError,
    TopologyError,
    TopologyParseError,
)
from .field import FieldElement, FieldSpec, Matrix

DEFAULT_ENUMERATION_GUARD = 10 ** 7
RNG_ALGORITHM = "numpy.PCG64"


class TwoUserStateId(str, Enum):
    """The four 2-user connectivity states"""

    A = "A"  # Rx1 hears Tx2, Rx2 does not hear Tx1
    B = "B"  # mirror image of A
    C = "C"  # both cross links
    D = "D"  # interference free


TWO_USER_IDS: Tuple[str, ...] = tuple(s.value for s in TwoUserStateId)


@dataclass(frozen=True)
class TopologyState:
    """Link pattern at one channel use; present[r][t] is the Tx t -> Rx r link"""

    present: Tuple[Tuple[bool, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        grid = tuple(tuple(bool(x) for x in row) for row in self.present)
        object.__setattr__(self, "present", grid)
        k = len(grid)
        if k < 2:
            raise TopologyError(f"a topology needs at least 2 users, got {k}")
        if any(len(row) != k for row in grid):
            raise TopologyError("topology grid must be square")
        if not all(grid[i][i] for i in range(k)):
            raise TopologyError("direct links (diagonal) must always be present")

    @classmethod
    def from_rows(cls, rows: Sequence[str], name: str = "") -> "TopologyState":
        return cls(tuple(tuple(ch == "1" for ch in row) for row in rows), name)

    @property
    def k(self) -> int:
        return len(self.present)

    @property
    def mask(self) -> np.ndarray:
        return np.array(self.present, dtype=bool)

    def has_link(self, r: int, t: int) -> bool:
        return self.present[r][t]

    def links(self) -> List[Tuple[int, int]]:
        """Present (r, t) pairs in row-major order"""
        return [(r, t) for r in range(self.k) for t in range(self.k) if self.has_link(r, t)]

    @property
    def link_count(self) -> int:
        return sum(sum(row) for row in self.present)

    def restrict(self, users: Sequence[int]) -> "TopologyState":
        """Induced topology among the given users (others silenced)"""
        return TopologyState(tuple(tuple(self.present[r][t] for t in users) for r in users))

    def permute(self, perm: Sequence[int]) -> "TopologyState":
        """Relabel user u as perm[u] at both ends of every link"""
        grid = [[False] * self.k for _ in range(self.k)]
        for r in range(self.k):
            for t in range(self.k):
                grid[perm[r]][perm[t]] = self.present[r][t]
        return TopologyState(tuple(tuple(row) for row in grid), self.name)

    def to_rows(self) -> List[str]:
        return ["".join("1" if x else "0" for x in row) for row in self.present]

    @property
    def key(self) -> Tuple[str, ...]:
        return tuple(self.to_rows())

    def __str__(self) -> str:
        label = f"{self.name}:" if self.name else ""
        return label + "/".join(self.to_rows())


TWO_USER_STATES: Dict[str, TopologyState] = {
    "A": TopologyState(((True, True), (False, True)), "A"),
    "B": TopologyState(((True, False), (True, True)), "B"),
    "C": TopologyState(((True, True), (True, True)), "C"),
    "D": TopologyState(((True, False), (False, True)), "D"),
}


def two_user_state(state_id: Union[str, TwoUserStateId]) -> TopologyState:
    """The 2x2 link pattern of a named 2-user state"""
    key = state_id.value if isinstance(state_id, TwoUserStateId) else str(state_id)
    try:
        return TWO_USER_STATES[key]
    except KeyError:
        raise TopologyError(f"unknown 2-user state {state_id!r}, expected one of {TWO_USER_IDS}")


def two_user_state_id(state: TopologyState) -> Optional[str]:
    """Name of a 2-user pattern, None for other sizes"""
    for key, candidate in TWO_USER_STATES.items():
        if candidate == state:
            return key
    return None


def all_states(k: int) -> List[TopologyState]:
    """Every k-user pattern with the diagonal fixed, in lexicographic order"""
    off = [(r, t) for r in range(k) for t in range(k) if r != t]
    states = []
    for bits in itertools.product((False, True), repeat=len(off)):
        grid = [[r == t for t in range(k)] for r in range(k)]
        for (r, t), bit in zip(off, bits):
            grid[r][t] = bit
        states.append(TopologyState(tuple(tuple(row) for row in grid)))
    return states


_FRACTION_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_fraction(token: Union[str, int, Fraction]) -> Fraction:
    """Exact rational from "num/den" or an integer; decimals and floats are rejected"""
    if isinstance(token, bool) or isinstance(token, float):
        raise FractionsError(f"floating-point fraction {token!r} rejected, use 'num/den'")
    if isinstance(token, Fraction):
        return token
    if isinstance(token, int):
        return Fraction(token)
    match = _FRACTION_RE.match(str(token))
    if not match:
        raise FractionsError(f"cannot parse {token!r} as a rational 'num/den'")
    num, den = int(match.group(1)), int(match.group(2) or 1)
    if den == 0:
        raise FractionsError(f"zero denominator in {token!r}")
    return Fraction(num, den)


@dataclass(frozen=True)
class StateFractions:
    """Exact fraction of channel uses spent in each state"""

    values: Dict[str, Fraction]

    def __post_init__(self):
        parsed = {str(k.value if isinstance(k, TwoUserStateId) else k): parse_fraction(v)
                  for k, v in dict(self.values).items()}
        if not parsed:
            raise FractionsError("no state fractions given")
        negative = [k for k, v in parsed.items() if v < 0]
        if negative:
            raise FractionsError(f"negative fraction for states {negative}")
        total = sum(parsed.values(), Fraction(0))
        if total != 1:
            raise FractionsError(f"fractions sum to {total}, expected exactly 1")
        if set(parsed) <= set(TWO_USER_IDS):
            parsed = {i: parsed[i] for i in TWO_USER_IDS if i in parsed}
        object.__setattr__(self, "values", parsed)

    @classmethod
    def parse(cls, text: str, ids: Sequence[str] = TWO_USER_IDS) -> "StateFractions":
        """Parse "1/3,1/3,1/3,0" against the given state ids"""
        tokens = [t for t in text.split(",")]
        if len(tokens) != len(ids):
            raise FractionsError(f"expected {len(ids)} fractions for states {tuple(ids)}, got {len(tokens)}")
        return cls({i: parse_fraction(t) for i, t in zip(ids, tokens)})

    @classmethod
    def two_user(cls, a, b, c, d) -> "StateFractions":
        return cls({"A": a, "B": b, "C": c, "D": d})

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(self.values)

    def __getitem__(self, state_id: Union[str, TwoUserStateId]) -> Fraction:
        key = state_id.value if isinstance(state_id, TwoUserStateId) else state_id
        return self.values[key]

    def get(self, state_id: str) -> Fraction:
        return self.values.get(state_id, Fraction(0))

    def items(self):
        return self.values.items()

    def to_strings(self) -> Dict[str, str]:
        return {k: str(v) for k, v in self.values.items()}

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.values.values())


@dataclass(frozen=True)
class StateSequence:
    """Ordered state ids of one coding block together with their patterns"""

    ids: Tuple[str, ...]
    states: Tuple[TopologyState, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(str(i) for i in self.ids))
        object.__setattr__(self, "states", tuple(self.states))
        if not self.ids:
            raise TopologyError("a state sequence needs at least one slot")
        if len(self.ids) != len(self.states):
            raise TopologyError("state ids and patterns differ in length")
        if len({s.k for s in self.states}) != 1:
            raise TopologyError("all slots must have the same number of users")
        seen: Dict[str, TopologyState] = {}
        for sid, state in zip(self.ids, self.states):
            if seen.setdefault(sid, state) != state:
                raise TopologyError(f"state id {sid} refers to two different patterns")

    @classmethod
    def from_ids(cls, ids: Sequence[str], catalog: Optional[Mapping[str, TopologyState]] = None) -> "StateSequence":
        catalog = TWO_USER_STATES if catalog is None else catalog
        try:
            states = tuple(catalog[str(i)] for i in ids)
        except KeyError as e:
            raise TopologyError(f"state id {e.args[0]!r} is not defined")
        return cls(tuple(ids), states)

    @classmethod
    def parse(cls, text: str, catalog: Optional[Mapping[str, TopologyState]] = None) -> "StateSequence":
        return cls.from_ids([t.strip() for t in text.split(",") if t.strip()], catalog)

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def k(self) -> int:
        return self.states[0].k

    @property
    def catalog(self) -> Dict[str, TopologyState]:
        return dict(zip(self.ids, self.states))

    @property
    def masks(self) -> np.ndarray:
        """Boolean array [slot, r, t]"""
        return np.stack([s.mask for s in self.states])

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for sid in self.ids:
            out[sid] = out.get(sid, 0) + 1
        return out

    def positions(self, state_id: str) -> List[int]:
        return [i for i, sid in enumerate(self.ids) if sid == state_id]

    def restrict(self, users: Sequence[int]) -> "StateSequence":
        return StateSequence(self.ids, tuple(s.restrict(users) for s in self.states))

    def link_positions(self, receiver: Optional[int] = None) -> List[Tuple[int, int, int]]:
        """Present links as (slot, r, t), slot-major then row-major"""
        out = []
        for slot, state in enumerate(self.states):
            for r, t in state.links():
                if receiver is None or r == receiver:
                    out.append((slot, r, t))
        return out

    def __str__(self) -> str:
        return ",".join(self.ids)


def state_quota_sequence(fractions: StateFractions, n: int,
                         catalog: Optional[Mapping[str, TopologyState]] = None) -> StateSequence:
    """Deterministic block of n slots realizing the fractions as closely as possible

    Each state gets floor(lambda * n) slots; the remaining slots go to the
    largest fractional parts, ties broken in state order. Slots are laid out
    round-robin over the states so the topology alternates.
    """
    if n < 1:
        raise TopologyError(f"block length must be at least 1, got {n}")
    ids = fractions.ids
    exact = [fractions[i] * n for i in ids]
    counts = [int(x.numerator // x.denominator) for x in exact]
    remainder = n - sum(counts)
    order = sorted(range(len(ids)), key=lambda j: (-(exact[j] - counts[j]), j))
    for j in order[:remainder]:
        counts[j] += 1

    slots: List[str] = []
    left = list(counts)
    while len(slots) < n:
        for j, sid in enumerate(ids):
            if left[j]:
                slots.append(sid)
                left[j] -= 1
    return StateSequence.from_ids(slots, catalog)


def iid_sequence(fractions: StateFractions, n: int, seed: int,
                 catalog: Optional[Mapping[str, TopologyState]] = None) -> StateSequence:
    """n states drawn independently with probabilities lambda"""
    if n < 1:
        raise TopologyError(f"block length must be at least 1, got {n}")
    ids = fractions.ids
    rng = np.random.default_rng(seed)
    probabilities = np.array([float(fractions[i]) for i in ids])
    picks = rng.choice(len(ids), size=n, p=probabilities / probabilities.sum())
    return StateSequence.from_ids([ids[j] for j in picks], catalog)


def empirical_fractions(seq: StateSequence, ids: Optional[Sequence[str]] = None) -> StateFractions:
    """Exact state fractions of a finite sequence"""
    counts = seq.counts()
    ids = list(ids) if ids is not None else (list(TWO_USER_IDS) if seq.k == 2 else list(counts))
    missing = set(counts) - set(ids)
    if missing:
        raise FractionsError(f"sequence uses states {sorted(missing)} outside {ids}")
    return StateFractions({i: Fraction(counts.get(i, 0), seq.n) for i in ids})


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Coefficients h[slot, r, t], nonzero exactly on present links"""

    seq: StateSequence
    field: FieldSpec
    coefficients: np.ndarray

    def __post_init__(self):
        coeff = np.array(self.coefficients, dtype=np.int64, copy=True)
        expected = (self.seq.n, self.seq.k, self.seq.k)
        if coeff.shape != expected:
            raise RealizationMismatchError(f"coefficient array has shape {coeff.shape}, expected {expected}")
        if coeff.min() < 0 or coeff.max() >= self.field.p:
            raise RealizationMismatchError(f"coefficients must be residues of {self.field}")
        if not np.array_equal(coeff != 0, self.seq.masks):
            raise RealizationMismatchError("coefficient support differs from the slot topologies")
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    def coefficient(self, slot: int, r: int, t: int) -> FieldElement:
        return FieldElement(int(self.coefficients[slot, r, t]), self.field)

    def grid(self, slot: int) -> Matrix:
        return Matrix(self.field, self.coefficients[slot])

    def link_values(self) -> Tuple[int, ...]:
        """Values on present links in enumeration order"""
        return tuple(int(self.coefficients[s, r, t]) for s, r, t in self.seq.link_positions())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChannelRealization):
            return NotImplemented
        return (self.seq == other.seq and self.field == other.field
                and np.array_equal(self.coefficients, other.coefficients))

    def to_dict(self) -> dict:
        """Convert realization to dictionary representation"""
        return {
            "field": self.field.p,
            "sequence": list(self.seq.ids),
            "coefficients": self.coefficients.tolist(),
        }


def sample_realization(seq: StateSequence, field: FieldSpec, seed: int) -> ChannelRealization:
    """Uniform nonzero coefficients on present links (numpy PCG64 seeded with seed)"""
    rng = np.random.default_rng(seed)
    draws = rng.integers(1, field.p, size=(seq.n, seq.k, seq.k))
    return ChannelRealization(seq, field, draws * seq.masks)


def realization_count(seq: StateSequence, field: FieldSpec) -> int:
    return (field.p - 1) ** len(seq.link_positions())


def enumerate_realizations(seq: StateSequence, field: FieldSpec,
                           guard: int = DEFAULT_ENUMERATION_GUARD) -> Iterator[ChannelRealization]:
    """Every realization exactly once, lexicographic in link order"""
    count = realization_count(seq, field)
    if count > guard:
        raise EnumerationTooLargeError(count, guard)
    links = seq.link_positions()
    index = tuple(np.array(axis, dtype=np.intp) for axis in zip(*links)) if links else None
    for values in itertools.product(field.nonzero_values(), repeat=len(links)):
        coeff = np.zeros((seq.n, seq.k, seq.k), dtype=np.int64)
        if index is not None:
            coeff[index] = values
        yield ChannelRealization(seq, field, coeff)


def parse_topology_states(text: str) -> List[TopologyState]:
    """Parse grid blocks: rows of '1'/'0' per receiver, blank-line separated

    A block may start with a "[name]" line; lines starting with '#' are ignored.
    """
    blocks: List[Tuple[int, str, List[Tuple[int, str]]]] = []
    current: Optional[Tuple[int, str, List[Tuple[int, str]]]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            current = None
            continue
        if line.startswith("[") and line.endswith("]"):
            if current is not None and current[2]:
                raise TopologyParseError("state name must open a block", lineno)
            current = (lineno, line[1:-1].strip(), [])
            blocks.append(current)
            continue
        if current is None:
            current = (lineno, "", [])
            blocks.append(current)
        current[2].append((lineno, line))

    states = []
    for index, (start, name, rows) in enumerate(blocks, start=1):
        if not rows:
            raise TopologyParseError(f"state block '{name}' has no rows", start)
        k = len(rows)
        for lineno, row in rows:
            if set(row) - {"0", "1"}:
                raise TopologyParseError(f"row '{row}' may contain only '0' and '1'", lineno)
            if len(row) != k:
                raise TopologyParseError(f"row '{row}' has {len(row)} entries, block has {k} rows", lineno)
        for r, (lineno, row) in enumerate(rows):
            if row[r] != "1":
                raise TopologyParseError(f"direct link Tx{r + 1}->Rx{r + 1} must be '1'", lineno)
        try:
            states.append(TopologyState.from_rows([row for _, row in rows], name or f"S{index}"))
        except TopologyError as e:
            raise TopologyParseError(str(e), start)
    return states


def format_topology_states(states: Sequence[TopologyState]) -> str:
    blocks = []
    for state in states:
        lines = [f"[{state.name}]"] if state.name else []
        lines.extend(state.to_rows())
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def load_topology_pair(path: str) -> Tuple[TopologyState, TopologyState]:
    """Read a two-state grid file"""
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as e:
        raise TopologyError(f"cannot read topology file {path}: {e}")
    states = parse_topology_states(text)
    if len(states) != 2:
        raise TopologyParseError(f"{path} defines {len(states)} states, a pair needs 2")
    if states[0].k != states[1].k:
        raise TopologyParseError(f"{path}: the two states differ in user count")
    return states[0], states[1]


def pair_sequence(pair: Tuple[TopologyState, TopologyState]) -> StateSequence:
    """Two-slot sequence over a state pair, ids taken from the state names"""
    first, second = pair
    ids = (first.name or "S1", second.name or "S2")
    if ids[0] == ids[1]:
        ids = ("S1", "S2")
    return StateSequence(ids, (first, second))
