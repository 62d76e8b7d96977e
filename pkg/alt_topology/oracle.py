"""Exhaustive search over linear schemes at small block length

Transmitter t's symbols are all desired by receiver t. A candidate scheme is,
per transmitter, a strictly increasing combination of canonical columns (first
nonzero entry 1): rescaling a column relabels its symbol and two equal columns
can never be told apart by the receiver that wants both.
"""

import itertools
import logging
import math
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetExceededError, SchemeError
from .field import FieldSpec
from .models import ExampleProfile, SearchResult, SearchSpec
from .schemes import LinearScheme, MessageConfig, SchemeMode, user_letter
from .topology import (
    DEFAULT_ENUMERATION_GUARD,
    StateSequence,
    TopologyState,
    all_states,
    pair_sequence,
    two_user_state_id,
)
from .verifier import ReceiverView, Verifier

USER_PAIRS = ((0, 1), (0, 2), (1, 2))
PERMUTATIONS_3 = tuple(itertools.permutations(range(3)))

Candidate = Tuple[Tuple[Tuple[int, ...], ...], ...]


def canonical_columns(n: int, p: int) -> List[Tuple[int, ...]]:
    """Nonzero length-n vectors whose first nonzero entry is 1, lexicographic"""
    return [v for v in itertools.product(range(p), repeat=n)
            if any(v) and v[next(i for i, x in enumerate(v) if x)] == 1]


def splits(total: int, caps: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Per-transmitter symbol counts summing to total, lexicographic"""
    ranges = [range(c + 1) for c in caps]
    for counts in itertools.product(*ranges):
        if sum(counts) == total:
            yield counts


def canonical_pair(first: TopologyState, second: TopologyState) -> Tuple:
    """Smallest form of an unordered state pair under simultaneous user relabeling"""
    forms = []
    for pi in PERMUTATIONS_3:
        a, b = first.permute(pi).key, second.permute(pi).key
        forms.append(min((a, b), (b, a)))
    return min(forms)


def flatten(candidate: Candidate) -> Tuple[int, ...]:
    """Encoder entries transmitter-major, column by column"""
    return tuple(x for columns in candidate for column in columns for x in column)


class LinearRateOracle:
    """Certifies the maximum zero-error linear sum rate of small instances"""

    def __init__(self, budget: int = 10 ** 6, guard: int = DEFAULT_ENUMERATION_GUARD,
                 verifier: Optional[Verifier] = None, logger: Optional[logging.Logger] = None):
        self.budget = budget
        self.logger = logger or logging.getLogger(__name__)
        self.verifier = verifier or Verifier(guard=guard, logger=self.logger)
        self._pair_cache: Dict[Tuple, Fraction] = {}
        self._state_cache: Dict[Tuple, Fraction] = {}

    def required_budget(self, spec: SearchSpec) -> int:
        """Upper bound on the candidates the search may examine"""
        c = len(canonical_columns(spec.seq.n, spec.field.p))
        return sum(math.prod(math.comb(c, m) for m in counts)
                   for total in range(1, sum(spec.caps) + 1)
                   for counts in splits(total, spec.caps))

    def _feasible(self, spec: SearchSpec, dense: np.ndarray, counts: Sequence[int]) -> bool:
        p = spec.field.p
        offsets = np.cumsum((0,) + tuple(counts))
        for r in range(spec.seq.k):
            desired = range(offsets[r], offsets[r + 1])
            view = ReceiverView(spec.seq, dense, desired, p, r)
            if spec.decodability == "worst":
                if not self.verifier.receiver_always_decodes(view):
                    return False
            elif not self.verifier.receiver_has_decodable(view):
                return False
        return True

    @staticmethod
    def _dense(spec: SearchSpec, candidate: Candidate) -> np.ndarray:
        total = sum(len(columns) for columns in candidate)
        dense = np.zeros((spec.seq.k, spec.seq.n, total), dtype=np.int64)
        j = 0
        for t, columns in enumerate(candidate):
            for column in columns:
                dense[t, :, j] = column
                j += 1
        return dense

    def _scan_split(self, spec: SearchSpec, columns: List[Tuple[int, ...]],
                    counts: Tuple[int, ...], state: Dict[str, int]) -> Optional[Candidate]:
        """Lexicographically first feasible candidate with these symbol counts"""
        per_tx = [itertools.combinations(columns, m) for m in counts]
        for candidate in itertools.product(*per_tx):
            if spec.candidate_limit is not None and state["examined"] >= spec.candidate_limit:
                state["truncated"] = 1
                return None
            state["examined"] += 1
            if self._feasible(spec, self._dense(spec, candidate), counts):
                return candidate
        return None

    def max_linear_rate(self, spec: SearchSpec) -> SearchResult:
        """Maximum M/n over candidates that decode in the requested mode

        Feasibility is downward closed in the symbol counts, so levels are
        searched upwards and the first infeasible level ends the search. The
        witness is the lexicographically smallest feasible candidate (flattened
        encoder entries) at the maximal level.
        """
        required = self.required_budget(spec)
        budget = min(self.budget, spec.budget)
        if required > budget:
            raise BudgetExceededError(required, budget)

        columns = canonical_columns(spec.seq.n, spec.field.p)
        state = {"examined": 0, "truncated": 0}
        best_level, best = 0, None
        for level in range(1, sum(spec.caps) + 1):
            found = None
            for counts in splits(level, spec.caps):
                found = self._scan_split(spec, columns, counts, state)
                if found is not None:
                    break
            self.logger.debug(f"Level {level}: {'feasible' if found else 'infeasible'} "
                              f"after {state['examined']} candidates")
            if found is None:
                break
            best_level, best = level, found

        if best is not None:
            # remaining splits of the maximal level may hold a smaller witness
            for counts in splits(best_level, spec.caps):
                if counts <= tuple(len(c) for c in best):
                    continue
                found = self._scan_split(spec, columns, counts, state)
                if found is not None and flatten(found) < flatten(best):
                    best = found

        witness = self._witness(spec, best) if best is not None else None
        if witness is not None:
            self._reverify(spec, witness)
        result = SearchResult(
            best_rate=Fraction(best_level, spec.seq.n),
            symbols=tuple(len(c) for c in best) if best is not None else (0,) * spec.seq.k,
            witness=witness,
            candidates=state["examined"],
            exhaustive=not state["truncated"],
            decodability=spec.decodability,
        )
        self.logger.debug(f"Sequence {spec.seq} over {spec.field}: linear zero-error optimum "
                         f"{result.best_rate} ({result.candidates} candidates)")
        return result

    @staticmethod
    def _witness(spec: SearchSpec, candidate: Candidate) -> LinearScheme:
        labels, owners = [], []
        for t, columns in enumerate(candidate):
            for j in range(len(columns)):
                labels.append(f"{user_letter(t)}{j + 1}")
                owners.append(t)
        config = MessageConfig(SchemeMode.IC, spec.seq.k, tuple(labels), tuple(owners), tuple(owners))
        dense = LinearRateOracle._dense(spec, candidate)
        return LinearScheme.from_dense(spec.seq, dense, config, spec.field, name="oracle-witness")

    def _reverify(self, spec: SearchSpec, witness: LinearScheme) -> None:
        if spec.decodability == "worst":
            ok = self.verifier.worst_case_check(witness, spec.field).verdict
        else:
            ok = self.verifier.generically_decodable(witness, spec.field)
        if not ok:
            raise SchemeError(f"search witness fails {spec.decodability} re-verification")

    def _rate(self, seq: StateSequence, field: FieldSpec, decodability: str,
              caps: Optional[Tuple[int, ...]] = None) -> SearchResult:
        return self.max_linear_rate(SearchSpec(seq, field, decodability, max_symbols=caps, budget=self.budget))

    def pairwise_bound_check(self, pair: Tuple[TopologyState, TopologyState], field: FieldSpec,
                             decodability: str = "worst") -> Dict[Tuple[int, int], Fraction]:
        """Max 2-user rate over n = 2 for each user pair, the third transmitter silenced"""
        if pair[0].k != 3 or pair[1].k != 3:
            raise SchemeError("pairwise bound check needs two 3-user states")
        rates = {}
        for users in USER_PAIRS:
            induced = tuple(state.restrict(users) for state in pair)
            key = (tuple(s.key for s in induced), field.p, decodability)
            if key not in self._pair_cache:
                ids = tuple(two_user_state_id(s) for s in induced)
                seq = StateSequence(ids, induced)
                self._pair_cache[key] = self._rate(seq, field, decodability).best_rate
            rates[users] = self._pair_cache[key]
        return rates

    def individual_rate(self, state: TopologyState, field: FieldSpec, decodability: str = "worst") -> Fraction:
        """Larger of the state's max rates at block lengths 1 and 2"""
        key = (state.key, field.p, decodability)
        if key not in self._state_cache:
            rates = [self._rate(StateSequence(("S",) * n, (state,) * n), field, decodability).best_rate
                     for n in (1, 2)]
            self._state_cache[key] = max(rates)
        return self._state_cache[key]

    def joint_search(self, pair: Tuple[TopologyState, TopologyState], field: FieldSpec,
                     decodability: str = "worst") -> SearchResult:
        """One symbol per user over the two alternating slots"""
        return self._rate(pair_sequence(pair), field, decodability, caps=(1,) * pair[0].k)

    def example_profile(self, pair: Tuple[TopologyState, TopologyState], field: FieldSpec,
                        decodability: str = "worst") -> ExampleProfile:
        joint = self.joint_search(pair, field, decodability)
        return ExampleProfile(
            pair=pair,
            individual=tuple(self.individual_rate(s, field, decodability) for s in pair),
            joint=joint.best_rate,
            pairwise=self.pairwise_bound_check(pair, field, decodability),
            witness=joint.witness,
        )

    def find_example_topologies(self, field: FieldSpec, k: int = 3, decodability: str = "worst",
                                raw: bool = False, shards: int = 1,
                                shard_order: Optional[Sequence[int]] = None) -> List[ExampleProfile]:
        """3-user state pairs: each state alone rate 1, jointly 3/2, every user pair at most 1

        Pairs are deduplicated under simultaneous relabeling of users and under
        swapping the two slots unless raw is set. The pair list is split into
        shards by index; results are sorted, so shard layout never changes them.
        """
        if k != 3:
            raise SchemeError("example topologies are defined for 3 users")
        states = all_states(3)
        unit = [s for s in states if self.individual_rate(s, field, decodability) == 1]
        self.logger.info(f"{len(unit)} of {len(states)} 3-user states have individual rate 1")

        pairs = []
        seen = set()
        for first, second in itertools.permutations(unit, 2):
            if not raw:
                form = canonical_pair(first, second)
                if form in seen:
                    continue
                seen.add(form)
            pairs.append((first, second))
        self.logger.info(f"Checking {len(pairs)} state pairs")

        order = list(shard_order) if shard_order is not None else list(range(shards))
        hits: List[ExampleProfile] = []
        for shard in order:
            for first, second in pairs[shard::shards]:
                pair = (TopologyState(first.present, "S1"), TopologyState(second.present, "S2"))
                joint = self.joint_search(pair, field, decodability)
                if joint.best_rate < Fraction(3, 2):
                    continue
                pairwise = self.pairwise_bound_check(pair, field, decodability)
                if any(rate > 1 for rate in pairwise.values()):
                    continue
                profile = ExampleProfile(pair, (Fraction(1), Fraction(1)), joint.best_rate, pairwise, joint.witness)
                self.logger.info(f"Example pair: {' | '.join('/'.join(s.to_rows()) for s in pair)}")
                hits.append(profile)
        hits.sort(key=lambda prof: (prof.pair[0].key, prof.pair[1].key))
        return hits
