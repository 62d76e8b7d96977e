"""Linear coding schemes over alternating topologies

A scheme is a set of per-transmitter encoding matrices E_t (n x M) over a
global message-symbol vector s of length M. Transmitter t sends E_t[slot] . s
in each slot. Encoders depend only on the state sequence, never on channel
coefficients.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .errors import (
    DimensionError,
    FieldError,
    MalformedAssignmentError,
    RealizationMismatchError,
    SchemeError,
    SchemeParseError,
    TopologyError,
)
from .field import FieldElement, FieldSpec, Matrix, as_vector, solve_for, split_blocks
from .topology import (
    ChannelRealization,
    StateFractions,
    StateSequence,
    TopologyState,
    state_quota_sequence,
    two_user_state,
)


class SchemeMode(str, Enum):
    """Message model of a scheme"""

    IC = "IC"  # W_k from Tx k to Rx k
    X = "X"    # W_rt from Tx t to Rx r
    BC = "BC"  # cooperating transmitters share all symbols


def user_letter(user: int) -> str:
    letters = "abcdefgh"
    return letters[user] if user < len(letters) else f"u{user + 1}_"


@dataclass(frozen=True)
class MessageConfig:
    """Symbol ownership and desired-receiver map, 0-based users"""

    mode: SchemeMode
    users: int
    labels: Tuple[str, ...]
    owners: Optional[Tuple[int, ...]]
    receivers: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mode", SchemeMode(self.mode))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "receivers", tuple(int(r) for r in self.receivers))
        if self.owners is not None:
            object.__setattr__(self, "owners", tuple(int(t) for t in self.owners))

        if self.users < 1:
            raise SchemeError("a scheme needs at least one user")
        if len(self.labels) != len(self.receivers):
            raise SchemeError("every symbol needs exactly one desired receiver")
        if len(set(self.labels)) != len(self.labels):
            raise SchemeError("symbol labels must be unique")
        if any(not 0 <= r < self.users for r in self.receivers):
            raise SchemeError("desired receiver outside the user range")

        if self.mode == SchemeMode.BC:
            if self.owners is not None:
                raise SchemeError("BC symbols are shared by all transmitters and have no owner")
            return
        if self.owners is None or len(self.owners) != len(self.labels):
            raise SchemeError(f"{self.mode.value} mode needs an owner for every symbol")
        if any(not 0 <= t < self.users for t in self.owners):
            raise SchemeError("symbol owner outside the user range")
        if self.mode == SchemeMode.IC:
            for label, owner, receiver in zip(self.labels, self.owners, self.receivers):
                if owner != receiver:
                    raise SchemeError(f"IC symbol {label} from Tx{owner + 1} must be desired by Rx{owner + 1}")

    @property
    def size(self) -> int:
        return len(self.labels)

    def desired(self, receiver: int) -> List[int]:
        return [j for j, r in enumerate(self.receivers) if r == receiver]

    def owner(self, symbol: int) -> Optional[int]:
        return None if self.owners is None else self.owners[symbol]

    def groups(self) -> Dict[Tuple[int, int], List[int]]:
        """Symbol indices per (receiver, owner) message, X mode notation W_rt"""
        out: Dict[Tuple[int, int], List[int]] = {}
        if self.owners is None:
            return out
        for j, (t, r) in enumerate(zip(self.owners, self.receivers)):
            out.setdefault((r, t), []).append(j)
        return out


class LinearScheme:
    """Per-transmitter sparse encoders plus the message configuration"""

    def __init__(self, seq: StateSequence, encoders: Sequence[sparse.spmatrix],
                 config: MessageConfig, field: FieldSpec, name: str = ""):
        self.seq = seq
        self.config = config
        self.field = field
        self.name = name

        if config.users != seq.k:
            raise SchemeError(f"message config has {config.users} users, sequence has {seq.k}")
        if len(encoders) != seq.k:
            raise SchemeError(f"expected {seq.k} encoders, got {len(encoders)}")

        reduced = []
        for t, enc in enumerate(encoders):
            csr = sparse.csr_matrix(enc, dtype=np.int64, copy=True)
            if csr.shape != (seq.n, config.size):
                raise SchemeError(f"encoder of Tx{t + 1} has shape {csr.shape}, "
                                  f"expected {(seq.n, config.size)}")
            csr.data %= field.p
            csr.eliminate_zeros()
            csr.sort_indices()
            reduced.append(csr)
        self.encoders: Tuple[sparse.csr_matrix, ...] = tuple(reduced)
        self._validate_support()

    def _validate_support(self) -> None:
        used = np.zeros(self.M, dtype=bool)
        for t, enc in enumerate(self.encoders):
            cols = np.unique(enc.indices)
            used[cols] = True
            if self.config.owners is None:
                continue
            foreign = [int(c) for c in cols if self.config.owners[c] != t]
            if foreign:
                labels = ", ".join(self.config.labels[c] for c in foreign)
                raise SchemeError(f"Tx{t + 1} transmits symbols it does not own: {labels}")
        silent = np.flatnonzero(~used)
        if silent.size:
            labels = ", ".join(self.config.labels[c] for c in silent)
            raise SchemeError(f"symbols never transmitted: {labels}")

    @classmethod
    def from_dense(cls, seq: StateSequence, dense: np.ndarray, config: MessageConfig,
                   field: FieldSpec, name: str = "") -> "LinearScheme":
        """Build from a (K, n, M) array of encoder entries"""
        return cls(seq, [sparse.csr_matrix(dense[t]) for t in range(dense.shape[0])], config, field, name)

    @property
    def n(self) -> int:
        return self.seq.n

    @property
    def k(self) -> int:
        return self.seq.k

    @property
    def M(self) -> int:
        return self.config.size

    @property
    def rate(self) -> Fraction:
        """Sum rate in symbols per channel use"""
        return Fraction(self.M, self.n)

    def encoder(self, t: int) -> Matrix:
        return Matrix(self.field, self.encoders[t].toarray())

    def dense(self) -> np.ndarray:
        return np.stack([enc.toarray() for enc in self.encoders])

    def with_field(self, field: FieldSpec) -> "LinearScheme":
        """Same encoder entries read in another prime field"""
        if field == self.field:
            return self
        return LinearScheme(self.seq, self.encoders, self.config, field, self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearScheme):
            return NotImplemented
        return (self.seq == other.seq and self.config == other.config and self.field == other.field
                and all((a != b).nnz == 0 for a, b in zip(self.encoders, other.encoders)))

    def __repr__(self) -> str:
        label = self.name or "scheme"
        return f"<LinearScheme {label} {self.config.mode.value} {self.field} n={self.n} M={self.M}>"

    def to_dict(self) -> dict:
        """Convert scheme to dictionary representation; encoders travel as scheme text"""
        return {
            "name": self.name,
            "field": self.field.p,
            "mode": self.config.mode.value,
            "users": self.k,
            "sequence": list(self.seq.ids),
            "symbols": self.M,
            "rate": str(self.rate),
            "scheme": format_scheme(self),
        }


class SchemeBuilder:
    """Accumulates symbols and slot transmissions, then freezes a LinearScheme"""

    def __init__(self, seq: StateSequence, field: FieldSpec, mode: SchemeMode, name: str = ""):
        self.seq = seq
        self.field = field
        self.mode = SchemeMode(mode)
        self.name = name
        self._labels: List[str] = []
        self._owners: List[int] = []
        self._receivers: List[int] = []
        self._counts: Dict[int, int] = {}
        self._entries: List[Dict[Tuple[int, int], int]] = [{} for _ in range(seq.k)]

    def symbol(self, receiver: int, owner: Optional[int] = None) -> int:
        """New symbol desired by receiver; returns its global index"""
        count = self._counts.get(receiver, 0) + 1
        self._counts[receiver] = count
        self._labels.append(f"{user_letter(receiver)}{count}")
        self._owners.append(receiver if owner is None else owner)
        self._receivers.append(receiver)
        return len(self._labels) - 1

    def send(self, slot: int, tx: int, symbol: int, coefficient: int = 1) -> None:
        key = (slot, symbol)
        entries = self._entries[tx]
        entries[key] = (entries.get(key, 0) + coefficient) % self.field.p

    def build(self) -> LinearScheme:
        owners = None if self.mode == SchemeMode.BC else tuple(self._owners)
        config = MessageConfig(self.mode, self.seq.k, tuple(self._labels), owners, tuple(self._receivers))
        encoders = []
        for entries in self._entries:
            keys = sorted(entries)
            rows = [slot for slot, _ in keys]
            cols = [sym for _, sym in keys]
            data = [entries[key] for key in keys]
            encoders.append(sparse.csr_matrix((data, (rows, cols)), shape=(self.seq.n, config.size),
                                              dtype=np.int64))
        return LinearScheme(self.seq, encoders, config, self.field, self.name)


def _ic_triple(builder: SchemeBuilder, slot_a: int, slot_b: int, slot_c: int) -> None:
    """4 symbols over one A, B, C slot triple; each Tx repeats one symbol where it interferes"""
    a1 = builder.symbol(0)
    a2 = builder.symbol(0)
    b1 = builder.symbol(1)
    b2 = builder.symbol(1)
    for slot, x1, x2 in ((slot_a, a1, b1), (slot_b, a2, b2), (slot_c, a2, b1)):
        builder.send(slot, 0, x1)
        builder.send(slot, 1, x2)


def _bc_pair(builder: SchemeBuilder, slot_a: int, slot_b: int) -> None:
    """3 symbols over one A, B slot pair with Tx1 relaying b1 in state B"""
    a1 = builder.symbol(0)
    b1 = builder.symbol(1)
    b2 = builder.symbol(1)
    builder.send(slot_a, 0, a1)
    builder.send(slot_a, 1, b1)
    builder.send(slot_b, 0, b1)
    builder.send(slot_b, 1, b2)


def build_ic2_joint_abc(field: FieldSpec) -> LinearScheme:
    """Joint A/B/C scheme: Tx1 sends (a1, a2, a2), Tx2 sends (b1, b2, b1), rate 4/3"""
    seq = StateSequence.from_ids(["A", "B", "C"])
    builder = SchemeBuilder(seq, field, SchemeMode.IC, name="ic2-joint-abc")
    _ic_triple(builder, 0, 1, 2)
    return builder.build()


def build_bc2_joint_ab(field: FieldSpec) -> LinearScheme:
    """Cooperative A/B scheme: three symbols over two slots, rate 3/2"""
    seq = StateSequence.from_ids(["A", "B"])
    builder = SchemeBuilder(seq, field, SchemeMode.BC, name="bc2-joint-ab")
    _bc_pair(builder, 0, 1)
    return builder.build()


def build_schedule_ic2_for_sequence(seq: StateSequence, field: FieldSpec,
                                    mode: SchemeMode = SchemeMode.IC) -> LinearScheme:
    """Time-sharing schedule over a given 2-user sequence

    The j-th A, B and C slots form the j-th joint triple. D slots carry one
    fresh symbol per user. Remaining A/B/C slots carry a single symbol, the
    active transmitter alternating from Tx1.
    """
    _require_two_users(seq)
    a_slots, b_slots, c_slots = (seq.positions(s) for s in ("A", "B", "C"))
    triples = min(len(a_slots), len(b_slots), len(c_slots))
    builder = SchemeBuilder(seq, field, mode, name=f"schedule-{mode.value.lower()}2")

    grouped = set()
    for j in range(triples):
        _ic_triple(builder, a_slots[j], b_slots[j], c_slots[j])
        grouped.update((a_slots[j], b_slots[j], c_slots[j]))

    for slot in seq.positions("D"):
        for user in (0, 1):
            builder.send(slot, user, builder.symbol(user))
        grouped.add(slot)

    active = 0
    for slot in range(seq.n):
        if slot in grouped:
            continue
        builder.send(slot, active, builder.symbol(active))
        active = 1 - active
    return builder.build()


def build_schedule_bc2_for_sequence(seq: StateSequence, field: FieldSpec) -> LinearScheme:
    """Pairs the j-th A slot with the j-th B slot; C and unpaired slots serve Rx1 from Tx1"""
    _require_two_users(seq)
    a_slots, b_slots = seq.positions("A"), seq.positions("B")
    pairs = min(len(a_slots), len(b_slots))
    builder = SchemeBuilder(seq, field, SchemeMode.BC, name="schedule-bc2")

    grouped = set()
    for j in range(pairs):
        _bc_pair(builder, a_slots[j], b_slots[j])
        grouped.update((a_slots[j], b_slots[j]))

    for slot in seq.positions("D"):
        for user in (0, 1):
            builder.send(slot, user, builder.symbol(user))
        grouped.add(slot)

    for slot in range(seq.n):
        if slot not in grouped:
            builder.send(slot, 0, builder.symbol(0))
    return builder.build()


def build_schedule_ic2(fractions: StateFractions, n: int, field: FieldSpec) -> LinearScheme:
    return build_schedule_ic2_for_sequence(state_quota_sequence(fractions, n), field)


def build_schedule_x2(fractions: StateFractions, n: int, field: FieldSpec) -> LinearScheme:
    """The IC schedule carrying only the W11 and W22 groups of the X channel"""
    return build_schedule_ic2_for_sequence(state_quota_sequence(fractions, n), field, SchemeMode.X)


def build_schedule_x2_for_sequence(seq: StateSequence, field: FieldSpec) -> LinearScheme:
    return build_schedule_ic2_for_sequence(seq, field, SchemeMode.X)


def build_schedule_bc2(fractions: StateFractions, n: int, field: FieldSpec) -> LinearScheme:
    return build_schedule_bc2_for_sequence(state_quota_sequence(fractions, n), field)


def _require_two_users(seq: StateSequence) -> None:
    if seq.k != 2:
        raise SchemeError(f"2-user schedule requested for a {seq.k}-user sequence")


def build_ic3_candidate(pair: Tuple[TopologyState, TopologyState],
                        assignment: Sequence[Sequence[bool]], field: FieldSpec,
                        ids: Tuple[str, str] = ("S1", "S2")) -> LinearScheme:
    """One symbol per transmitter over two slots, repeated where the Tx is active"""
    first, second = pair
    if first.k != 3 or second.k != 3:
        raise SchemeError("the 3-user candidate needs two 3-user states")
    if len(assignment) != 3:
        raise MalformedAssignmentError(f"assignment covers {len(assignment)} transmitters, expected 3")
    seq = StateSequence(ids, (first, second))
    builder = SchemeBuilder(seq, field, SchemeMode.IC, name="ic3-candidate")
    for t, activity in enumerate(assignment):
        if len(activity) != 2:
            raise MalformedAssignmentError(f"Tx{t + 1} activity has {len(activity)} slots, expected 2")
        if not any(activity):
            raise MalformedAssignmentError(f"Tx{t + 1} never transmits its symbol")
        symbol = builder.symbol(t)
        for slot, active in enumerate(activity):
            if active:
                builder.send(slot, t, symbol)
    return builder.build()


def build_schedule_ic3(seq: StateSequence, witness: LinearScheme) -> LinearScheme:
    """Repeat a 2-slot witness over paired slots of its two states

    The j-th slot of the witness's first state is paired with the j-th slot of
    its second. Unpaired slots carry one symbol, transmitters taking turns from Tx1.
    """
    if witness.n != 2:
        raise SchemeError("the 3-user schedule repeats a 2-slot witness")
    if witness.config.mode == SchemeMode.BC:
        raise SchemeError("the 3-user schedule needs an IC witness")
    first_id, second_id = witness.seq.ids
    for sid, state in zip(witness.seq.ids, witness.seq.states):
        if sid in seq.catalog and seq.catalog[sid] != state:
            raise SchemeError(f"state {sid} differs between sequence and witness")
    firsts, seconds = seq.positions(first_id), seq.positions(second_id)
    pairs = min(len(firsts), len(seconds))
    builder = SchemeBuilder(seq, witness.field, SchemeMode.IC, name="schedule-ic3")
    dense = witness.dense()

    grouped = set()
    for j in range(pairs):
        slots = (firsts[j], seconds[j])
        fresh = [builder.symbol(witness.config.receivers[c], witness.config.owner(c)) for c in range(witness.M)]
        for t in range(witness.k):
            for local, slot in enumerate(slots):
                for c in np.flatnonzero(dense[t, local]):
                    builder.send(slot, t, fresh[c], int(dense[t, local, c]))
        grouped.update(slots)

    active = 0
    for slot in range(seq.n):
        if slot in grouped:
            continue
        builder.send(slot, active, builder.symbol(active))
        active = (active + 1) % seq.k
    return builder.build()


BUILTIN_SCHEMES: Dict[str, Callable[[FieldSpec], LinearScheme]] = {
    "ic2-joint-abc": build_ic2_joint_abc,
    "bc2-joint-ab": build_bc2_joint_ab,
}


def builtin_scheme(name: str, field: FieldSpec) -> LinearScheme:
    try:
        return BUILTIN_SCHEMES[name](field)
    except KeyError:
        raise SchemeError(f"unknown built-in scheme {name!r}, expected one of {sorted(BUILTIN_SCHEMES)}")


@dataclass(frozen=True, eq=False)
class Observation:
    """What receiver r sees over the block: y = M_r . s"""

    receiver: int
    y: np.ndarray
    matrix: sparse.csr_matrix


def _check_realization(scheme: LinearScheme, real: ChannelRealization) -> None:
    if real.field != scheme.field:
        raise RealizationMismatchError(f"realization over {real.field}, scheme over {scheme.field}")
    if real.seq != scheme.seq:
        raise RealizationMismatchError(
            f"realization topology {real.seq} does not match scheme sequence {scheme.seq}")


def _symbols(scheme: LinearScheme, s) -> np.ndarray:
    vec = as_vector(scheme.field, s)
    if vec.size != scheme.M:
        raise DimensionError(f"message vector has {vec.size} symbols, scheme carries {scheme.M}")
    return vec


def effective_matrix(scheme: LinearScheme, real: ChannelRealization, receiver: int) -> sparse.csr_matrix:
    """M_r[slot, j] = sum_t h_rt(slot) E_t[slot, j] mod p"""
    _check_realization(scheme, real)
    total = sparse.csr_matrix((scheme.n, scheme.M), dtype=np.int64)
    for t, enc in enumerate(scheme.encoders):
        h = real.coefficients[:, receiver, t]
        if h.any():
            total = total + sparse.diags(h) @ enc
    total = sparse.csr_matrix(total, dtype=np.int64)
    total.data %= scheme.field.p
    total.eliminate_zeros()
    return total


def encode(scheme: LinearScheme, s) -> Matrix:
    """Transmit grid X (n x K): X[slot, t] = E_t[slot] . s"""
    vec = _symbols(scheme, s)
    columns = [(enc @ vec) % scheme.field.p for enc in scheme.encoders]
    return Matrix(scheme.field, np.stack(columns, axis=1))


def receive(scheme: LinearScheme, real: ChannelRealization, s) -> List[Observation]:
    """Per-receiver observations Y_r(slot) = sum_t h_rt(slot) X_t(slot)"""
    _check_realization(scheme, real)
    x = encode(scheme, s).array
    p = scheme.field.p
    observations = []
    for r in range(scheme.k):
        y = (real.coefficients[:, r, :] * x).sum(axis=1) % p
        observations.append(Observation(r, y, effective_matrix(scheme, real, r)))
    return observations


def decode(scheme: LinearScheme, observation: Observation) -> Dict[int, Optional[FieldElement]]:
    """Desired-symbol values recovered by the receiver, None where undetermined"""
    field = scheme.field
    csr = observation.matrix
    wanted = set(scheme.config.desired(observation.receiver))
    result: Dict[int, Optional[FieldElement]] = {i: None for i in sorted(wanted)}
    for rows, cols in split_blocks(csr):
        targets = [int(c) for c in cols if int(c) in wanted]
        if not targets or rows.size == 0:
            continue
        local = {int(c): i for i, c in enumerate(cols)}
        block = Matrix(field, csr[rows][:, cols].toarray())
        solved = solve_for(block, observation.y[rows], [local[c] for c in targets])
        for c in targets:
            result[c] = solved[local[c]]
    return result


def format_scheme(scheme: LinearScheme) -> str:
    """Canonical text form; parse_scheme(format_scheme(s)) == s"""
    cfg = scheme.config
    lines = [f"field {scheme.field.p}", f"users {scheme.k}", f"mode {cfg.mode.value.lower()}"]
    if scheme.name:
        lines.append(f"name {scheme.name}")
    for sid, state in scheme.seq.catalog.items():
        lines.append(f"state {sid} " + " ".join(state.to_rows()))
    for slot, sid in enumerate(scheme.seq.ids, start=1):
        lines.append(f"slot {slot} {sid}")
    for j, label in enumerate(cfg.labels):
        owner = "*" if cfg.owners is None else str(cfg.owners[j] + 1)
        lines.append(f"symbol {label} owner={owner} receiver={cfg.receivers[j] + 1}")
    dense = scheme.dense()
    for t in range(scheme.k):
        for slot in range(scheme.n):
            row = dense[t, slot]
            if row.any():
                lines.append(f"tx {t + 1} {slot + 1}: " + " ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def _int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise SchemeParseError(f"{what} must be an integer, got {token!r}", lineno)


def parse_scheme(text: str) -> LinearScheme:
    """Parse the line-based scheme format (users, slots and transmitters 1-based)

    field <p>
    users <k>
    mode <ic|x|bc>
    name <name>                                   (optional)
    state <id> <row> ... <row>                    (rows = receivers, '1'/'0')
    slot <i> <state id>
    symbol <label> owner=<t|*> receiver=<r>
    tx <t> <slot>: <M entries>                    (rows not listed are zero)
    """
    header: Dict[str, Tuple[str, int]] = {}
    states: Dict[str, TopologyState] = {}
    slots: Dict[int, Tuple[str, int]] = {}
    symbols: List[Tuple[str, str, str, int]] = []
    rows: Dict[Tuple[int, int], Tuple[List[str], int]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword in ("field", "users", "mode", "name"):
            if keyword in header:
                raise SchemeParseError(f"duplicate '{keyword}' line", lineno)
            header[keyword] = (rest, lineno)
        elif keyword == "state":
            parts = rest.split()
            if len(parts) < 3:
                raise SchemeParseError("state needs an id and at least two rows", lineno)
            sid, grid = parts[0], parts[1:]
            if sid in states:
                raise SchemeParseError(f"state {sid} defined twice", lineno)
            if any(set(r) - {"0", "1"} or len(r) != len(grid) for r in grid):
                raise SchemeParseError(f"state {sid} must be a square grid of '0'/'1'", lineno)
            try:
                states[sid] = TopologyState.from_rows(grid, sid)
            except TopologyError as e:
                raise SchemeParseError(str(e), lineno)
        elif keyword == "slot":
            parts = rest.split()
            if len(parts) != 2:
                raise SchemeParseError("slot needs an index and a state id", lineno)
            index = _int(parts[0], "slot index", lineno)
            if index in slots:
                raise SchemeParseError(f"slot {index} listed twice", lineno)
            slots[index] = (parts[1], lineno)
        elif keyword == "symbol":
            parts = rest.split()
            fields = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
            if len(parts) != 3 or set(fields) != {"owner", "receiver"}:
                raise SchemeParseError("symbol needs: <label> owner=<t|*> receiver=<r>", lineno)
            symbols.append((parts[0], fields["owner"], fields["receiver"], lineno))
        elif keyword == "tx":
            head, sep, values = rest.partition(":")
            parts = head.split()
            if not sep or len(parts) != 2:
                raise SchemeParseError("encoder rows read 'tx <t> <slot>: <entries>'", lineno)
            key = (_int(parts[0], "transmitter", lineno), _int(parts[1], "slot", lineno))
            if key in rows:
                raise SchemeParseError(f"encoder row tx {key[0]} slot {key[1]} given twice", lineno)
            rows[key] = (values.split(), lineno)
        else:
            raise SchemeParseError(f"unknown keyword '{keyword}'", lineno)

    for required in ("field", "users", "mode"):
        if required not in header:
            raise SchemeParseError(f"missing '{required}' line")

    p_text, p_line = header["field"]
    try:
        field = FieldSpec(_int(p_text, "field", p_line))
    except FieldError as e:
        raise SchemeParseError(str(e), p_line)
    k_text, k_line = header["users"]
    k = _int(k_text, "users", k_line)
    mode_text, mode_line = header["mode"]
    try:
        mode = SchemeMode(mode_text.upper())
    except ValueError:
        raise SchemeParseError(f"mode must be ic, x or bc, got {mode_text!r}", mode_line)
    name = header.get("name", ("", 0))[0]

    for sid, state in states.items():
        if state.k != k:
            raise SchemeParseError(f"state {sid} has {state.k} users, scheme has {k}")
    if not slots:
        raise SchemeParseError("scheme has no slots")
    if sorted(slots) != list(range(1, len(slots) + 1)):
        raise SchemeParseError(f"slots must be numbered 1..{len(slots)}")
    ids = []
    for index in range(1, len(slots) + 1):
        sid, lineno = slots[index]
        if sid not in states:
            # 2-user files may use A/B/C/D without declaring them
            if k != 2:
                raise SchemeParseError(f"slot {index} uses undefined state {sid}", lineno)
            try:
                states[sid] = two_user_state(sid)
            except TopologyError:
                raise SchemeParseError(f"slot {index} uses undefined state {sid}", lineno)
        ids.append(sid)
    seq = StateSequence(tuple(ids), tuple(states[sid] for sid in ids))

    labels, owners, receivers = [], [], []
    for label, owner, receiver, lineno in symbols:
        r = _int(receiver, "receiver", lineno)
        if not 1 <= r <= k:
            raise SchemeParseError(f"receiver {r} outside 1..{k}", lineno)
        if owner == "*":
            if mode != SchemeMode.BC:
                raise SchemeParseError(f"symbol {label} needs an owning transmitter in {mode.value} mode", lineno)
        else:
            t = _int(owner, "owner", lineno)
            if mode == SchemeMode.BC:
                raise SchemeParseError(f"BC symbol {label} must use owner=*", lineno)
            if not 1 <= t <= k:
                raise SchemeParseError(f"owner {t} outside 1..{k}", lineno)
            if mode == SchemeMode.IC and t != r:
                raise SchemeParseError(f"IC symbol {label} must be desired by its own transmitter's receiver",
                                       lineno)
            owners.append(t - 1)
        labels.append(label)
        receivers.append(r - 1)
    if not labels:
        raise SchemeParseError("scheme declares no symbols")
    try:
        config = MessageConfig(mode, k, tuple(labels), tuple(owners) if mode != SchemeMode.BC else None,
                               tuple(receivers))
    except SchemeError as e:
        raise SchemeParseError(str(e))

    dense = np.zeros((k, seq.n, config.size), dtype=np.int64)
    for (t, slot), (values, lineno) in rows.items():
        if not 1 <= t <= k:
            raise SchemeParseError(f"transmitter {t} outside 1..{k}", lineno)
        if not 1 <= slot <= seq.n:
            raise SchemeParseError(f"slot {slot} outside 1..{seq.n}", lineno)
        if len(values) != config.size:
            raise SchemeParseError(f"encoder row has {len(values)} entries, scheme has {config.size} symbols",
                                   lineno)
        entries = [_int(v, "encoder entry", lineno) % field.p for v in values]
        if config.owners is not None:
            for j, v in enumerate(entries):
                if v and config.owners[j] != t - 1:
                    raise SchemeParseError(f"Tx{t} transmits {config.labels[j]} which it does not own", lineno)
        dense[t - 1, slot - 1] = entries

    for j, (label, _, _, lineno) in enumerate(symbols):
        if not dense[:, :, j].any():
            raise SchemeParseError(f"symbol {label} has an all-zero encoder column", lineno)
    return LinearScheme.from_dense(seq, dense, config, field, name)


def load_scheme(path: str) -> LinearScheme:
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as e:
        raise SchemeError(f"cannot read scheme file {path}: {e}")
    return parse_scheme(text)


def save_scheme(scheme: LinearScheme, path: str) -> None:
    with open(path, "w") as f:
        f.write(format_scheme(scheme))
