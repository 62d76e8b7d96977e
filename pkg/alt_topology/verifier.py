"""Zero-error decodability checks for linear schemes

Receiver r's effective matrix only involves the coefficients of links into r,
so exhaustive checks enumerate each receiver's local coefficients separately
and recombine: a full realization decodes iff every receiver's local part
decodes.
"""

import itertools
import logging
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .errors import EnumerationTooLargeError, UsageError
from .field import FieldSpec, sparse_decodable_indices, unit_pivot_columns
from .models import DecodabilityReport
from .schemes import LinearScheme, effective_matrix
from .topology import (
    DEFAULT_ENUMERATION_GUARD,
    ChannelRealization,
    StateSequence,
    realization_count,
    sample_realization,
)

# n * M above which a receiver's system is eliminated block by block in sparse form
DENSE_LIMIT = 1 << 14


def receiver_decodable(scheme: LinearScheme, real: ChannelRealization, r: int) -> bool:
    """Every desired symbol of receiver r has its unit vector in rowspace(M_r)"""
    desired = scheme.config.desired(r)
    if not desired:
        return True
    found = sparse_decodable_indices(effective_matrix(scheme, real, r), scheme.field.p, desired)
    return found.issuperset(desired)


class ReceiverView:
    """Receiver r's incoming links and the encoder rows they scale"""

    def __init__(self, seq: StateSequence, encoders: Union[np.ndarray, Sequence[sparse.spmatrix]],
                 desired: Iterable[int], p: int, r: int):
        self.receiver = r
        self.p = p
        self.desired = set(desired)
        self.links = seq.link_positions(receiver=r)
        self._slots = np.array([slot for slot, _, _ in self.links], dtype=np.intp)
        self._txs = np.array([t for _, _, t in self.links], dtype=np.intp)

        shape = encoders.shape[1:] if isinstance(encoders, np.ndarray) else encoders[0].shape
        self._n = shape[0]
        self.is_dense = shape[0] * shape[1] <= DENSE_LIMIT
        if self.is_dense:
            dense = encoders if isinstance(encoders, np.ndarray) else np.stack([e.toarray() for e in encoders])
            # contributions[i]: the effective matrix when only link i has coefficient 1
            self._contributions = np.zeros((len(self.links),) + tuple(shape), dtype=np.int64)
            for i, (slot, _, t) in enumerate(self.links):
                self._contributions[i, slot] = dense[t, slot]
        else:
            self._encoders = [sparse.csr_matrix(e) for e in encoders]

    @classmethod
    def of(cls, scheme: LinearScheme, r: int) -> "ReceiverView":
        return cls(scheme.seq, scheme.encoders, scheme.config.desired(r), scheme.field.p, r)

    @property
    def count(self) -> int:
        return (self.p - 1) ** len(self.links)

    def assignments(self, shard: int = 0, shards: int = 1) -> Iterable[Tuple[int, Tuple[int, ...]]]:
        """(index, link values) in lexicographic order, every shards-th one from shard"""
        stream = enumerate(itertools.product(range(1, self.p), repeat=len(self.links)))
        return itertools.islice(stream, shard, None, shards)

    def values_of(self, real: ChannelRealization) -> np.ndarray:
        return real.coefficients[self._slots, self.receiver, self._txs]

    def decodes(self, values: Sequence[int]) -> bool:
        if not self.desired:
            return True
        values = np.asarray(values, dtype=np.int64)
        if self.is_dense:
            matrix = np.tensordot(values, self._contributions, axes=1) % self.p
            return unit_pivot_columns(matrix, self.p).issuperset(self.desired)
        gains = np.zeros((len(self._encoders), self._n), dtype=np.int64)
        gains[self._txs, self._slots] = values
        total = None
        for t, enc in enumerate(self._encoders):
            if gains[t].any():
                part = sparse.diags(gains[t]) @ enc
                total = part if total is None else total + part
        return sparse_decodable_indices(total, self.p, self.desired).issuperset(self.desired)


class Verifier:
    """Decodability checks sharing one enumeration guard and shard layout

    Exhaustive streams are split by index modulo the shard count. Shards are
    reduced by summing pass counts and taking the smallest failing index, so
    the report does not depend on shard order.
    """

    def __init__(self, guard: int = DEFAULT_ENUMERATION_GUARD, shards: int = 1,
                 shard_order: Optional[Sequence[int]] = None, logger: Optional[logging.Logger] = None):
        if shards < 1:
            raise UsageError(f"shard count must be at least 1, got {shards}")
        self.guard = guard
        self.shards = shards
        self.shard_order = list(shard_order) if shard_order is not None else list(range(shards))
        if sorted(self.shard_order) != list(range(shards)):
            raise UsageError(f"shard order {self.shard_order} is not a permutation of 0..{shards - 1}")
        self.logger = logger or logging.getLogger(__name__)

    def check_single(self, scheme: LinearScheme, real: ChannelRealization) -> DecodabilityReport:
        verdicts = [receiver_decodable(scheme, real, r) for r in range(scheme.k)]
        ok = all(verdicts)
        return DecodabilityReport(
            mode="single", verdict=ok, receivers=verdicts, realizations=1, failures=0 if ok else 1,
            counterexample=None if ok else real, flags=scheme.field.flags,
        )

    def _scan_receiver(self, view: ReceiverView) -> Tuple[int, Optional[Tuple[int, ...]]]:
        """Passing count and the lexicographically first failing values"""
        passes = 0
        first: Optional[Tuple[int, Tuple[int, ...]]] = None
        for shard in self.shard_order:
            for index, values in view.assignments(shard, self.shards):
                if view.decodes(values):
                    passes += 1
                elif first is None or index < first[0]:
                    first = (index, values)
        return passes, None if first is None else first[1]

    def _exhaustive(self, scheme: LinearScheme, field: FieldSpec, mode: str) -> DecodabilityReport:
        scheme = scheme.with_field(field)
        total = realization_count(scheme.seq, field)
        if total > self.guard:
            raise EnumerationTooLargeError(total, self.guard)

        views = [ReceiverView.of(scheme, r) for r in range(scheme.k)]
        passes, firsts = [], []
        for view in views:
            count, values = self._scan_receiver(view)
            self.logger.debug(f"Rx{view.receiver + 1}: {count}/{view.count} local realizations decode")
            passes.append(count)
            firsts.append(values)

        failures = total - math.prod(passes)
        counterexample = None
        if failures:
            counterexample = min(
                (self._realization(scheme, views[r], values) for r, values in enumerate(firsts)
                 if values is not None),
                key=lambda real: real.link_values(),
            )
        if mode == "generic":
            verdicts = [count > 0 for count in passes]
        else:
            verdicts = [count == view.count for count, view in zip(passes, views)]
        return DecodabilityReport(
            mode=mode, verdict=all(verdicts), receivers=verdicts, realizations=total, failures=failures,
            counterexample=counterexample, flags=field.flags,
        )

    @staticmethod
    def _realization(scheme: LinearScheme, view: ReceiverView, values: Tuple[int, ...]) -> ChannelRealization:
        """One receiver's failing values with every other link set to 1"""
        coeff = scheme.seq.masks.astype(np.int64)
        for (slot, rx, t), v in zip(view.links, values):
            coeff[slot, rx, t] = v
        return ChannelRealization(scheme.seq, scheme.field, coeff)

    def worst_case_check(self, scheme: LinearScheme, field: FieldSpec) -> DecodabilityReport:
        self.logger.debug(f"Worst-case check of {scheme!r} over {field}")
        return self._exhaustive(scheme, field, "worst-case")

    def exhaustive_fraction_report(self, scheme: LinearScheme, field: FieldSpec) -> DecodabilityReport:
        return self._exhaustive(scheme, field, "exhaustive-fraction")

    def failure_fraction_exact(self, scheme: LinearScheme, field: FieldSpec) -> Fraction:
        return self.exhaustive_fraction_report(scheme, field).failure_fraction

    def generic_report(self, scheme: LinearScheme, field: FieldSpec) -> DecodabilityReport:
        """Exact failure counts; passes when every receiver decodes for some realization"""
        return self._exhaustive(scheme, field, "generic")

    def generic_check(self, scheme: LinearScheme, field: FieldSpec, trials: int, seed: int) -> DecodabilityReport:
        """Sampled failure fraction; trial i draws its realization with seed + i"""
        if trials < 1:
            raise UsageError(f"trials must be at least 1, got {trials}")
        scheme = scheme.with_field(field)
        views = [ReceiverView.of(scheme, r) for r in range(scheme.k)]
        verdicts = [True] * scheme.k
        failures = 0
        counterexample = None
        for i in range(trials):
            real = sample_realization(scheme.seq, field, seed + i)
            ok = [view.decodes(view.values_of(real)) for view in views]
            if not all(ok):
                failures += 1
                if counterexample is None:
                    counterexample = real
                verdicts = [a and b for a, b in zip(verdicts, ok)]
        self.logger.debug(f"Generic check: {failures}/{trials} sampled realizations fail")
        return DecodabilityReport(
            mode="generic-sampled", verdict=failures == 0, receivers=verdicts, realizations=trials,
            failures=failures, exact=False, counterexample=counterexample, flags=field.flags,
        )

    def generically_decodable(self, scheme: LinearScheme, field: FieldSpec) -> bool:
        """Each receiver decodes for at least one realization over this field

        Equivalent to every receiver's exhaustive failure fraction being below 1.
        """
        scheme = scheme.with_field(field)
        return all(self.receiver_has_decodable(ReceiverView.of(scheme, r)) for r in range(scheme.k))

    def receiver_has_decodable(self, view: ReceiverView) -> bool:
        if view.count > self.guard:
            raise EnumerationTooLargeError(view.count, self.guard)
        return any(view.decodes(values) for _, values in view.assignments())

    def receiver_always_decodes(self, view: ReceiverView) -> bool:
        """Early-exit worst-case test of one receiver, all-ones values first"""
        return all(view.decodes(values) for _, values in view.assignments())


_default = Verifier()


def worst_case_check(scheme: LinearScheme, field: FieldSpec) -> DecodabilityReport:
    return _default.worst_case_check(scheme, field)


def generic_check(scheme: LinearScheme, field: FieldSpec, trials: int, seed: int) -> DecodabilityReport:
    return _default.generic_check(scheme, field, trials, seed)


def failure_fraction_exact(scheme: LinearScheme, field: FieldSpec) -> Fraction:
    return _default.failure_fraction_exact(scheme, field)
