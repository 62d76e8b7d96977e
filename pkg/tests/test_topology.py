from fractions import Fraction

import numpy as np
import pytest

from alt_topology.errors import (
    EnumerationTooLargeError,
    FractionsError,
    RealizationMismatchError,
    TopologyError,
    TopologyParseError,
)
from alt_topology.topology import (
    TWO_USER_STATES,
    ChannelRealization,
    StateFractions,
    StateSequence,
    TopologyState,
    TwoUserStateId,
    all_states,
    empirical_fractions,
    enumerate_realizations,
    format_topology_states,
    iid_sequence,
    load_topology_pair,
    pair_sequence,
    parse_fraction,
    parse_topology_states,
    realization_count,
    sample_realization,
    state_quota_sequence,
    two_user_state,
    two_user_state_id,
)


# ---------------------------------------------------------
# Topology states
# ---------------------------------------------------------

def test_two_user_state_grids():
    assert two_user_state("A").to_rows() == ["11", "01"]
    assert two_user_state(TwoUserStateId.B).to_rows() == ["10", "11"]
    assert two_user_state("C").link_count == 4
    assert two_user_state("D").links() == [(0, 0), (1, 1)]
    with pytest.raises(TopologyError):
        two_user_state("E")


def test_state_validation():
    with pytest.raises(TopologyError):
        TopologyState.from_rows(["01", "01"])
    with pytest.raises(TopologyError):
        TopologyState.from_rows(["1"])
    with pytest.raises(TopologyError):
        TopologyState.from_rows(["11", "011"])


def test_state_equality_ignores_name():
    assert TopologyState.from_rows(["11", "01"], "mine") == TWO_USER_STATES["A"]
    assert two_user_state_id(TopologyState.from_rows(["11", "01"])) == "A"
    assert two_user_state_id(TopologyState.from_rows(["111", "010", "001"])) is None


def test_permute_swaps_users():
    assert two_user_state("A").permute((1, 0)) == two_user_state("B")
    assert two_user_state("C").permute((1, 0)) == two_user_state("C")


def test_restrict_induces_sub_network():
    state = TopologyState.from_rows(["111", "011", "001"])
    assert state.restrict((0, 1)) == two_user_state("A")
    assert state.restrict((1, 2)) == two_user_state("A")
    assert state.restrict((0, 2)) == two_user_state("A")


def test_all_states_lexicographic():
    assert [two_user_state_id(s) for s in all_states(2)] == ["D", "B", "A", "C"]
    states = all_states(3)
    assert len(states) == 64
    assert len({s.key for s in states}) == 64


# ---------------------------------------------------------
# Fractions
# ---------------------------------------------------------

def test_parse_fraction():
    assert parse_fraction("1/3") == Fraction(1, 3)
    assert parse_fraction(" 2 ") == 2
    for bad in ("0.5", "1/0", "x", "-1/2"):
        with pytest.raises(FractionsError):
            parse_fraction(bad)
    with pytest.raises(FractionsError):
        parse_fraction(0.5)


def test_state_fractions_parse():
    f = StateFractions.parse("1/3,1/3,1/3,0")
    assert f["A"] == Fraction(1, 3)
    assert f[TwoUserStateId.D] == 0
    assert f.ids == ("A", "B", "C", "D")
    assert str(f) == "1/3,1/3,1/3,0"


def test_state_fractions_must_sum_to_one():
    with pytest.raises(FractionsError):
        StateFractions.parse("1/3,1/3,1/3,1/3")
    with pytest.raises(FractionsError):
        StateFractions.parse("1/2,1/2,0")
    with pytest.raises(FractionsError):
        StateFractions.two_user(Fraction(3, 2), Fraction(-1, 2), 0, 0)


# ---------------------------------------------------------
# Sequences
# ---------------------------------------------------------

def test_quota_sequence_layout():
    seq = state_quota_sequence(StateFractions.parse("1/2,1/4,1/8,1/8"), 8)
    assert seq.ids == ("A", "B", "C", "D", "A", "B", "A", "A")
    assert seq.counts() == {"A": 4, "B": 2, "C": 1, "D": 1}


def test_quota_sequence_remainder_goes_to_first_tied_state():
    seq = state_quota_sequence(StateFractions.parse("1/3,1/3,1/3,0"), 4)
    assert seq.ids == ("A", "B", "C", "A")
    assert empirical_fractions(seq).to_strings() == {"A": "1/2", "B": "1/4", "C": "1/4", "D": "0"}


def test_quota_tie_break_ignores_key_order():
    shuffled = StateFractions({"D": Fraction(1, 3), "C": Fraction(1, 3), "A": Fraction(1, 3)})
    assert shuffled.ids == ("A", "C", "D")
    assert state_quota_sequence(shuffled, 4).ids == ("A", "C", "D", "A")
    assert state_quota_sequence(shuffled, 1).ids == ("A",)


def test_quota_sequence_exact_multiples():
    seq = state_quota_sequence(StateFractions.parse("1/3,1/3,1/3,0"), 3000)
    assert seq.counts() == {"A": 1000, "B": 1000, "C": 1000}
    with pytest.raises(TopologyError):
        state_quota_sequence(StateFractions.parse("1,0,0,0"), 0)


def test_iid_sequence_is_seeded():
    f = StateFractions.parse("1/2,1/2,0,0")
    first = iid_sequence(f, 2000, seed=4)
    assert first == iid_sequence(f, 2000, seed=4)
    assert set(first.ids) == {"A", "B"}
    assert abs(first.counts()["A"] - 1000) < 150


def test_sequence_parse_and_errors():
    seq = StateSequence.parse("A, B,C")
    assert seq.ids == ("A", "B", "C")
    assert seq.n == 3 and seq.k == 2
    with pytest.raises(TopologyError):
        StateSequence.parse("A,Q")
    with pytest.raises(TopologyError):
        StateSequence(("A", "A"), (two_user_state("A"), two_user_state("B")))


def test_link_positions_are_slot_major():
    seq = StateSequence.parse("A,D")
    assert seq.link_positions() == [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 0, 0), (1, 1, 1)]
    assert seq.link_positions(receiver=1) == [(0, 1, 1), (1, 1, 1)]


# ---------------------------------------------------------
# Realizations
# ---------------------------------------------------------

def test_realization_validation(gf3):
    seq = StateSequence.parse("A")
    ChannelRealization(seq, gf3, np.array([[[1, 2], [0, 1]]]))
    with pytest.raises(RealizationMismatchError):
        ChannelRealization(seq, gf3, np.array([[[1, 2], [1, 1]]]))
    with pytest.raises(RealizationMismatchError):
        ChannelRealization(seq, gf3, np.array([[[1, 3], [0, 1]]]))
    with pytest.raises(RealizationMismatchError):
        ChannelRealization(seq, gf3, np.ones((2, 2, 2), dtype=int))


def test_sample_realization_is_seeded(gf5):
    seq = StateSequence.parse("A,B,C,D")
    real = sample_realization(seq, gf5, seed=9)
    assert real == sample_realization(seq, gf5, seed=9)
    assert np.array_equal(real.coefficients != 0, seq.masks)
    assert real.coefficient(2, 1, 0) != 0


def test_enumeration_order_and_count(gf3):
    seq = StateSequence.parse("A")
    reals = list(enumerate_realizations(seq, gf3))
    assert len(reals) == realization_count(seq, gf3) == 8
    values = [r.link_values() for r in reals]
    assert values == sorted(values)
    assert values[0] == (1, 1, 1) and values[-1] == (2, 2, 2)


def test_enumeration_guard(gf5):
    seq = StateSequence.parse("C,C,C")
    with pytest.raises(EnumerationTooLargeError) as err:
        next(enumerate_realizations(seq, gf5, guard=1000))
    assert err.value.count == 4 ** 12
    assert err.value.exit_code == 3
    assert "too-large-to-enumerate" in str(err.value)


# ---------------------------------------------------------
# Grid files
# ---------------------------------------------------------

def test_parse_grid_blocks():
    text = "# pair\n[first]\n111\n011\n001\n\n101\n111\n001\n"
    first, second = parse_topology_states(text)
    assert first.name == "first" and second.name == "S2"
    assert first.to_rows() == ["111", "011", "001"]
    assert parse_topology_states(format_topology_states([first, second])) == [first, second]


@pytest.mark.parametrize("text, line", [
    ("11\n21\n", 2),
    ("11\n011\n", 2),
    ("11\n00\n", 2),
    ("11\n01\n[late]\n", 3),
])
def test_grid_errors_carry_line_numbers(text, line):
    with pytest.raises(TopologyParseError) as err:
        parse_topology_states(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_load_shipped_pair(example1_path):
    first, second = load_topology_pair(example1_path)
    assert (first.name, second.name) == ("S1", "S2")
    assert second.to_rows() == ["101", "111", "001"]
    seq = pair_sequence((first, second))
    assert seq.ids == ("S1", "S2") and seq.k == 3


def test_pair_file_needs_two_states(tmp_path):
    path = tmp_path / "one.txt"
    path.write_text("111\n011\n001\n")
    with pytest.raises(TopologyParseError):
        load_topology_pair(str(path))
    with pytest.raises(TopologyError):
        load_topology_pair(str(tmp_path / "missing.txt"))
