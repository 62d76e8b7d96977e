from fractions import Fraction

import numpy as np
import pytest

from alt_topology.errors import (
    DimensionError,
    MalformedAssignmentError,
    RealizationMismatchError,
    SchemeError,
    SchemeParseError,
)
from alt_topology.field import FieldSpec
from alt_topology.schemes import (
    MessageConfig,
    LinearScheme,
    SchemeMode,
    build_bc2_joint_ab,
    build_ic2_joint_abc,
    build_ic3_candidate,
    build_schedule_bc2,
    build_schedule_ic2,
    build_schedule_ic3,
    build_schedule_x2,
    builtin_scheme,
    decode,
    encode,
    format_scheme,
    load_scheme,
    parse_scheme,
    receive,
    save_scheme,
)
from alt_topology.topology import (
    ChannelRealization,
    StateFractions,
    StateSequence,
    load_topology_pair,
    sample_realization,
    state_quota_sequence,
)

EXAMPLE1_WITNESS = ((1, 0), (0, 1), (1, 1))


def decoded_everything(scheme, seed):
    rng = np.random.default_rng(seed)
    s = rng.integers(0, scheme.field.p, size=scheme.M)
    real = sample_realization(scheme.seq, scheme.field, seed)
    for obs in receive(scheme, real, s):
        for index, value in decode(scheme, obs).items():
            if value is None or value != int(s[index]):
                return False
    return True


# ---------------------------------------------------------
# Built-in schemes
# ---------------------------------------------------------

def test_ic2_joint_scheme_shape(ic2_scheme):
    assert ic2_scheme.rate == Fraction(4, 3)
    assert ic2_scheme.config.labels == ("a1", "a2", "b1", "b2")
    assert ic2_scheme.encoder(0).to_list() == [[1, 0, 0, 0], [0, 1, 0, 0], [0, 1, 0, 0]]
    assert ic2_scheme.encoder(1).to_list() == [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 1, 0]]


def test_bc2_joint_scheme_shape(bc2_scheme):
    assert bc2_scheme.rate == Fraction(3, 2)
    assert bc2_scheme.config.owners is None
    assert bc2_scheme.config.desired(1) == [1, 2]


def test_builtin_registry(gf5):
    assert builtin_scheme("ic2-joint-abc", gf5) == build_ic2_joint_abc(gf5)
    with pytest.raises(SchemeError):
        builtin_scheme("no-such-scheme", gf5)


def test_with_field_keeps_entries(ic2_scheme, gf5):
    moved = ic2_scheme.with_field(gf5)
    assert moved.field == gf5
    assert np.array_equal(moved.dense(), ic2_scheme.dense())
    assert ic2_scheme.with_field(ic2_scheme.field) is ic2_scheme


# ---------------------------------------------------------
# Encode, receive, decode
# ---------------------------------------------------------

def test_encode_is_linear(gf5):
    scheme = build_schedule_ic2(StateFractions.parse("1/4,1/4,1/4,1/4"), 12, gf5)
    rng = np.random.default_rng(1)
    for _ in range(20):
        s1, s2 = rng.integers(0, 5, size=(2, scheme.M))
        a, b = (int(x) for x in rng.integers(0, 5, size=2))
        left = encode(scheme, (a * s1 + b * s2) % 5).array
        right = (a * encode(scheme, s1).array + b * encode(scheme, s2).array) % 5
        assert np.array_equal(left, right)


def test_encode_checks_symbol_count(ic2_scheme):
    with pytest.raises(DimensionError):
        encode(ic2_scheme, [1, 2, 0])


def test_receive_checks_realization(ic2_scheme, gf5):
    other = sample_realization(StateSequence.parse("A,B,D"), ic2_scheme.field, 0)
    with pytest.raises(RealizationMismatchError):
        receive(ic2_scheme, other, [0, 1, 2, 1])
    wrong_field = sample_realization(ic2_scheme.seq, gf5, 0)
    with pytest.raises(RealizationMismatchError):
        receive(ic2_scheme, wrong_field, [0, 1, 2, 1])


def test_ic2_joint_scheme_decodes_all_ones(ic2_scheme):
    real = ChannelRealization(ic2_scheme.seq, ic2_scheme.field, ic2_scheme.seq.masks.astype(int))
    s = [2, 1, 0, 2]
    observations = receive(ic2_scheme, real, s)
    assert {i: int(v) for i, v in decode(ic2_scheme, observations[0]).items()} == {0: 2, 1: 1}
    assert {i: int(v) for i, v in decode(ic2_scheme, observations[1]).items()} == {2: 0, 3: 2}


@pytest.mark.parametrize("p", [3, 5, 7])
def test_builtin_round_trip(p):
    field = FieldSpec(p)
    for seed in range(10):
        assert decoded_everything(build_ic2_joint_abc(field), seed)
        assert decoded_everything(build_bc2_joint_ab(field), seed)


def test_undetermined_symbols_decode_to_none(gf3):
    # both users send fresh symbols in one fully connected slot
    seq = StateSequence.parse("C")
    config = MessageConfig(SchemeMode.IC, 2, ("a1", "b1"), (0, 1), (0, 1))
    scheme = LinearScheme.from_dense(seq, np.array([[[1, 0]], [[0, 1]]]), config, gf3)
    obs = receive(scheme, sample_realization(seq, gf3, 0), [1, 2])
    assert decode(scheme, obs[0]) == {0: None}
    assert decode(scheme, obs[1]) == {1: None}


# ---------------------------------------------------------
# Schedules
# ---------------------------------------------------------

def test_ic2_schedule_rates(gf5):
    assert build_schedule_ic2(StateFractions.parse("1/3,1/3,1/3,0"), 3000, gf5).rate == Fraction(4, 3)
    assert build_schedule_ic2(StateFractions.parse("1/2,1/4,1/8,1/8"), 8, gf5).rate == Fraction(5, 4)
    assert build_schedule_ic2(StateFractions.parse("0,0,0,1"), 5, gf5).rate == 2
    assert build_schedule_ic2(StateFractions.parse("1/2,1/2,0,0"), 6, gf5).rate == 1


def test_ic2_schedule_rate_accounting(gf3):
    rng = np.random.default_rng(2)
    for _ in range(20):
        parts = rng.integers(0, 6, size=4)
        if not parts.sum():
            continue
        f = StateFractions.two_user(*(Fraction(int(x), int(parts.sum())) for x in parts))
        n = int(rng.integers(1, 40))
        seq = state_quota_sequence(f, n)
        counts = [len(seq.positions(s)) for s in "ABCD"]
        scheme = build_schedule_ic2(f, n, gf3)
        assert scheme.rate == Fraction(n + min(counts[:3]) + counts[3], n)


def test_x2_schedule_matches_ic2(gf3):
    f = StateFractions.parse("1/3,1/3,1/3,0")
    scheme = build_schedule_x2(f, 3000, gf3)
    assert scheme.config.mode == SchemeMode.X
    assert scheme.rate == Fraction(4, 3)


def test_bc2_schedule_rates(gf3):
    assert build_schedule_bc2(StateFractions.parse("1/2,1/2,0,0"), 2, gf3).rate == Fraction(3, 2)
    assert build_schedule_bc2(StateFractions.parse("1/4,1/4,1/4,1/4"), 8, gf3).rate == Fraction(3, 2)
    assert build_schedule_bc2(StateFractions.parse("0,0,1,0"), 4, gf3).rate == 1


@pytest.mark.parametrize("fractions", ["1/4,1/4,1/4,1/4", "1/2,1/4,1/8,1/8", "1/6,1/2,1/3,0"])
def test_schedules_decode_end_to_end(fractions, gf5):
    f = StateFractions.parse(fractions)
    for build in (build_schedule_ic2, build_schedule_x2, build_schedule_bc2):
        assert decoded_everything(build(f, 48, gf5), seed=3)


# ---------------------------------------------------------
# Ownership and message configuration
# ---------------------------------------------------------

def test_ic_symbols_must_be_desired_by_owner():
    with pytest.raises(SchemeError):
        MessageConfig(SchemeMode.IC, 2, ("a1",), (0,), (1,))
    with pytest.raises(SchemeError):
        MessageConfig(SchemeMode.BC, 2, ("a1",), (0,), (0,))


def test_transmitter_cannot_send_foreign_symbols(gf3):
    seq = StateSequence.parse("D")
    config = MessageConfig(SchemeMode.IC, 2, ("a1", "b1"), (0, 1), (0, 1))
    with pytest.raises(SchemeError):
        LinearScheme.from_dense(seq, np.array([[[1, 1]], [[0, 1]]]), config, gf3)


def test_every_symbol_must_be_transmitted(gf3):
    seq = StateSequence.parse("D")
    config = MessageConfig(SchemeMode.IC, 2, ("a1", "b1"), (0, 1), (0, 1))
    with pytest.raises(SchemeError):
        LinearScheme.from_dense(seq, np.array([[[1, 0]], [[0, 0]]]), config, gf3)


# ---------------------------------------------------------
# 3-user schemes
# ---------------------------------------------------------

def test_ic3_candidate(example1_path, gf3):
    pair = load_topology_pair(example1_path)
    scheme = build_ic3_candidate(pair, EXAMPLE1_WITNESS, gf3)
    assert scheme.rate == Fraction(3, 2)
    assert scheme.encoder(2).to_list() == [[0, 0, 1], [0, 0, 1]]
    for seed in range(5):
        assert decoded_everything(scheme, seed)


def test_ic3_candidate_rejects_malformed_assignments(example1_path, gf3):
    pair = load_topology_pair(example1_path)
    with pytest.raises(MalformedAssignmentError):
        build_ic3_candidate(pair, ((0, 0), (1, 1), (1, 1)), gf3)
    with pytest.raises(MalformedAssignmentError):
        build_ic3_candidate(pair, ((1, 0), (0, 1)), gf3)
    with pytest.raises(MalformedAssignmentError):
        build_ic3_candidate(pair, ((1, 0, 1), (0, 1), (1, 1)), gf3)


def test_ic3_schedule_repeats_witness(example1_path, gf5):
    pair = load_topology_pair(example1_path)
    witness = build_ic3_candidate(pair, EXAMPLE1_WITNESS, gf5)
    catalog = {state.name: state for state in pair}

    even = state_quota_sequence(StateFractions({"S1": "1/2", "S2": "1/2"}), 10, catalog)
    scheme = build_schedule_ic3(even, witness)
    assert scheme.rate == Fraction(3, 2)
    assert decoded_everything(scheme, seed=8)

    uneven = state_quota_sequence(StateFractions({"S1": "3/4", "S2": "1/4"}), 8, catalog)
    scheme = build_schedule_ic3(uneven, witness)
    assert scheme.rate == Fraction(5, 4)
    assert decoded_everything(scheme, seed=8)


def test_ic3_schedule_needs_two_slot_witness(ic2_scheme, example1_path, gf3):
    pair = load_topology_pair(example1_path)
    seq = state_quota_sequence(StateFractions({"S1": "1/2", "S2": "1/2"}), 4, {s.name: s for s in pair})
    with pytest.raises(SchemeError):
        build_schedule_ic3(seq, ic2_scheme)


# ---------------------------------------------------------
# Scheme text format
# ---------------------------------------------------------

def test_format_parse_round_trip(ic2_scheme, bc2_scheme, example1_path, gf3):
    candidate = build_ic3_candidate(load_topology_pair(example1_path), EXAMPLE1_WITNESS, gf3)
    for scheme in (ic2_scheme, bc2_scheme, candidate):
        parsed = parse_scheme(format_scheme(scheme))
        assert parsed == scheme
        assert parsed.name == scheme.name


def test_format_text(ic2_scheme):
    text = format_scheme(ic2_scheme)
    assert "mode ic\n" in text
    assert "symbol b2 owner=2 receiver=2\n" in text
    assert "tx 1 3: 0 1 0 0\n" in text


def test_save_and_load(tmp_path, bc2_scheme):
    path = str(tmp_path / "bc.scheme")
    save_scheme(bc2_scheme, path)
    assert load_scheme(path) == bc2_scheme
    with pytest.raises(SchemeError):
        load_scheme(str(tmp_path / "missing.scheme"))


HEADER = "field 3\nusers 2\nmode ic\nslot 1 A\n"


@pytest.mark.parametrize("body, line", [
    ("symbol a1 owner=1 receiver=1\nsymbol b1 owner=2 receiver=2\ntx 1 1: 1 0\n", 6),
    ("symbol a1 owner=1 receiver=1\ntx 2 1: 1\n", 6),
    ("symbol a1 owner=1 receiver=2\n", 5),
    ("symbol a1 owner=1\n", 5),
    ("frobnicate\n", 5),
    ("symbol a1 owner=1 receiver=1\ntx 1 1: 1 1\n", 6),
    ("symbol a1 owner=1 receiver=1\ntx 1 x: 1\n", 6),
])
def test_parse_errors_carry_line_numbers(body, line):
    with pytest.raises(SchemeParseError) as err:
        parse_scheme(HEADER + body)
    assert err.value.line == line


def test_parse_rejects_bad_headers():
    with pytest.raises(SchemeParseError) as err:
        parse_scheme("field 4\nusers 2\nmode ic\nslot 1 A\n")
    assert err.value.line == 1
    with pytest.raises(SchemeParseError):
        parse_scheme("users 2\nmode ic\nslot 1 A\n")
    with pytest.raises(SchemeParseError):
        parse_scheme("field 3\nusers 3\nmode ic\nslot 1 A\nsymbol a1 owner=1 receiver=1\ntx 1 1: 1\n")
