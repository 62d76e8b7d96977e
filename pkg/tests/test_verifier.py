from fractions import Fraction

import numpy as np
import pytest

from alt_topology.errors import EnumerationTooLargeError, UsageError
from alt_topology.field import FieldSpec
from alt_topology.schemes import LinearScheme, MessageConfig, SchemeMode, build_bc2_joint_ab, decode, receive
from alt_topology.topology import ChannelRealization, StateSequence, sample_realization
from alt_topology.verifier import (
    ReceiverView,
    Verifier,
    failure_fraction_exact,
    generic_check,
    receiver_decodable,
    worst_case_check,
)

IC_CONFIG = MessageConfig(SchemeMode.IC, 2, ("a1", "b1"), (0, 1), (0, 1))


def repeated_scheme(field, scale=1):
    """Both users repeat one symbol over two fully connected slots"""
    seq = StateSequence.parse("C,C")
    dense = np.array([[[1, 0], [scale, 0]], [[0, 1], [0, 1]]])
    return LinearScheme.from_dense(seq, dense, IC_CONFIG, field)


def colliding_scheme(field):
    """Fresh symbols from both users collide in one fully connected slot"""
    seq = StateSequence.parse("C")
    return LinearScheme.from_dense(seq, np.array([[[1, 0]], [[0, 1]]]), IC_CONFIG, field)


# ---------------------------------------------------------
# Worst-case checks
# ---------------------------------------------------------

def test_ic2_joint_scheme_passes_every_realization(ic2_scheme, gf3):
    report = worst_case_check(ic2_scheme, gf3)
    assert report.verdict
    assert report.realizations == 1024
    assert report.failures == 0
    assert report.counterexample is None
    assert report.receivers == [True, True]


@pytest.mark.parametrize("p", [3, 5])
def test_bc2_joint_scheme_passes(p):
    field = FieldSpec(p)
    report = worst_case_check(build_bc2_joint_ab(field), field)
    assert report.verdict
    assert report.realizations == (p - 1) ** 6


def test_worst_case_reads_scheme_in_requested_field(ic2_scheme, gf5):
    report = worst_case_check(ic2_scheme, gf5)
    assert report.verdict
    assert report.realizations == 4 ** 10


def test_colliding_symbols_always_fail(gf3):
    scheme = colliding_scheme(gf3)
    report = worst_case_check(scheme, gf3)
    assert not report.verdict
    assert report.receivers == [False, False]
    assert report.failures == report.realizations == 16
    assert report.counterexample.link_values() == (1, 1, 1, 1)
    assert failure_fraction_exact(scheme, gf3) == 1


def test_counterexample_really_fails(gf3):
    scheme = repeated_scheme(gf3)
    report = worst_case_check(scheme, gf3)
    assert not report.verdict
    assert not Verifier().check_single(scheme, report.counterexample).verdict


def test_check_single(ic2_scheme):
    ones = ChannelRealization(ic2_scheme.seq, ic2_scheme.field, ic2_scheme.seq.masks.astype(int))
    report = Verifier().check_single(ic2_scheme, ones)
    assert report.verdict and report.realizations == 1


def test_enumeration_guard(ic2_scheme, gf3):
    with pytest.raises(EnumerationTooLargeError) as err:
        Verifier(guard=100).worst_case_check(ic2_scheme, gf3)
    assert err.value.count == 1024


# ---------------------------------------------------------
# Failure fractions
# ---------------------------------------------------------

def test_exact_failure_fraction(gf3):
    # each receiver fails when its two slots see proportional gains: half the time
    report = Verifier().exhaustive_fraction_report(repeated_scheme(gf3), gf3)
    assert report.realizations == 256
    assert report.failures == 256 - 64
    assert report.failure_fraction == Fraction(3, 4)
    assert report.exact and report.standard_error is None


def test_failure_fraction_invariant_under_repetition_scaling(gf3, gf5):
    for field in (gf3, gf5):
        plain = failure_fraction_exact(repeated_scheme(field), field)
        scaled = failure_fraction_exact(repeated_scheme(field, scale=2), field)
        assert plain == scaled


def test_receiver_verdict_invariant_under_row_scaling(gf5):
    # scaling h[slot, r, :] scales one row of the receiver's effective matrix
    for scheme in (repeated_scheme(gf5), build_bc2_joint_ab(gf5)):
        for seed in range(15):
            real = sample_realization(scheme.seq, gf5, seed)
            for r in range(scheme.k):
                expected = receiver_decodable(scheme, real, r)
                for slot in range(scheme.n):
                    for c in (2, 3, 4):
                        coeff = real.coefficients.copy()
                        coeff[slot, r, :] = coeff[slot, r, :] * c % 5
                        scaled = ChannelRealization(scheme.seq, gf5, coeff)
                        assert receiver_decodable(scheme, scaled, r) == expected


def test_decodable_receivers_recover_the_sent_symbols(gf3):
    rng = np.random.default_rng(23)
    recovered = 0
    for scheme in (repeated_scheme(gf3), colliding_scheme(gf3), build_bc2_joint_ab(gf3)):
        for seed in range(30):
            real = sample_realization(scheme.seq, gf3, seed)
            s = rng.integers(0, 3, size=scheme.M)
            observations = receive(scheme, real, s)
            for r in range(scheme.k):
                if not receiver_decodable(scheme, real, r):
                    continue
                values = decode(scheme, observations[r])
                assert set(values) == set(scheme.config.desired(r))
                assert all(v is not None and int(v) == int(s[i]) for i, v in values.items())
                recovered += 1
    assert recovered > 0


def test_shard_layout_does_not_change_reports(gf3):
    scheme = repeated_scheme(gf3)
    reference = Verifier().exhaustive_fraction_report(scheme, gf3)
    for shards, order in ((2, [1, 0]), (3, [2, 0, 1]), (5, None)):
        report = Verifier(shards=shards, shard_order=order).exhaustive_fraction_report(scheme, gf3)
        assert report.failures == reference.failures
        assert report.counterexample == reference.counterexample


def test_bad_shard_order_rejected():
    with pytest.raises(UsageError):
        Verifier(shards=2, shard_order=[0, 0])
    with pytest.raises(UsageError) as err:
        Verifier(shards=0)
    assert err.value.exit_code == 2


# ---------------------------------------------------------
# Generic decodability
# ---------------------------------------------------------

def test_generic_report_passes_when_some_realization_decodes(gf3):
    report = Verifier().generic_report(repeated_scheme(gf3), gf3)
    assert report.mode == "generic"
    assert report.verdict
    assert report.failure_fraction == Fraction(3, 4)
    assert not Verifier().generic_report(colliding_scheme(gf3), gf3).verdict


def test_generically_decodable(gf3, ic2_scheme):
    verifier = Verifier()
    assert verifier.generically_decodable(repeated_scheme(gf3), gf3)
    assert not verifier.generically_decodable(colliding_scheme(gf3), gf3)
    assert verifier.generically_decodable(ic2_scheme, gf3)


def test_sampled_generic_check_is_seeded(gf5):
    scheme = repeated_scheme(gf5)
    first = generic_check(scheme, gf5, trials=200, seed=7)
    second = generic_check(scheme, gf5, trials=200, seed=7)
    assert first.mode == "generic-sampled"
    assert not first.exact and first.standard_error is not None
    assert first.failures == second.failures
    assert first.counterexample == second.counterexample
    assert 0 < first.failures < 200


def test_sampled_generic_check_never_fails_good_scheme(ic2_scheme, gf3):
    report = generic_check(ic2_scheme, gf3, trials=50, seed=0)
    assert report.verdict and report.failures == 0


def test_sampled_estimate_is_close_to_exact_fraction(gf3):
    scheme = repeated_scheme(gf3)
    exact = failure_fraction_exact(scheme, gf3)
    sampled = generic_check(scheme, gf3, trials=1000, seed=0)
    assert sampled.standard_error > 0
    assert abs(float(sampled.failure_fraction - exact)) <= 3 * sampled.standard_error


def test_sampled_check_needs_trials(ic2_scheme, gf3):
    with pytest.raises(UsageError) as err:
        generic_check(ic2_scheme, gf3, trials=0, seed=0)
    assert err.value.exit_code == 2


def test_receiver_view_matches_full_check(gf5):
    scheme = repeated_scheme(gf5)
    views = [ReceiverView.of(scheme, r) for r in range(2)]
    rng = np.random.default_rng(1)
    for _ in range(30):
        coeff = rng.integers(1, 5, size=(2, 2, 2))
        real = ChannelRealization(scheme.seq, gf5, coeff)
        expected = Verifier().check_single(scheme, real).receivers
        assert [view.decodes(view.values_of(real)) for view in views] == expected
