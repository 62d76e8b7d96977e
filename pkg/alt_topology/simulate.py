"""End-to-end simulation of a scenario schedule over one block"""

import logging
import time
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .errors import DecodeFailureError
from .field import FieldSpec
from .models import RateReport, SimConfig
from .scenarios import BaseScenario
from .schemes import decode, receive
from .topology import (
    RNG_ALGORITHM,
    StateSequence,
    empirical_fractions,
    iid_sequence,
    sample_realization,
    state_quota_sequence,
)

OFFLINE_SCHEDULING = "offline-scheduling"


class Simulator:
    """Builds the sequence and schedule, pushes random symbols through and counts what decodes"""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)

    @staticmethod
    def seeds(seed: int) -> Tuple[int, int, int]:
        """Independent seeds for the state sequence, the message symbols and the coefficients"""
        sequence_seed, message_seed, channel_seed = np.random.SeedSequence(seed).generate_state(3)
        return int(sequence_seed), int(message_seed), int(channel_seed)

    def sequence(self, config: SimConfig, scenario: BaseScenario) -> StateSequence:
        if config.sequence_mode == "iid":
            return iid_sequence(config.fractions, config.n, self.seeds(config.seed)[0], scenario.catalog)
        return state_quota_sequence(config.fractions, config.n, scenario.catalog)

    def run(self, config: SimConfig, scenario: BaseScenario) -> RateReport:
        """Simulate one block

        Args:
            config: Simulation parameters
            scenario: Scenario matching config.scenario

        Returns:
            RateReport comparing the decoded rate with the closed form

        Raises:
            DecodeFailureError: If a worst-case decodable schedule loses a symbol
        """
        started = time.perf_counter()
        scenario.check_fractions(config.fractions)
        field = FieldSpec(config.p)
        _, message_seed, channel_seed = self.seeds(config.seed)

        seq = self.sequence(config, scenario)
        scheme = scenario.build_for_sequence(seq, field)
        self.logger.info(f"Simulating {scenario.name} over {field}: n={seq.n}, {scheme.M} symbols scheduled")

        symbols = np.random.default_rng(message_seed).integers(0, field.p, size=scheme.M)
        realization = sample_realization(seq, field, channel_seed)

        decoded = 0
        failures = 0
        for observation in receive(scheme, realization, symbols):
            for index, value in decode(scheme, observation).items():
                if value is not None and int(value) == int(symbols[index]):
                    decoded += 1
                else:
                    failures += 1
        if failures:
            message = f"{failures} scheduled symbols were not recovered by {scheme.name or scenario.name}"
            if config.decodability == "worst":
                raise DecodeFailureError(message)
            self.logger.warning(message)

        flags = scenario.flags(config.fractions, field)
        if config.sequence_mode == "iid":
            flags.append(OFFLINE_SCHEDULING)
        report = RateReport(
            config=config,
            achieved=Fraction(decoded, seq.n),
            formula=scenario.formula_or_none(config.fractions),
            bounds=scenario.bounds(config.fractions),
            scheme_rate=scheme.rate,
            decoded=decoded,
            decode_failures=failures,
            counts=seq.counts(),
            empirical_formula=scenario.formula_or_none(empirical_fractions(seq, config.fractions.ids)),
            runtime=time.perf_counter() - started,
            provenance={
                "seed": config.seed,
                "config_hash": config.config_hash(),
                "sequence_mode": config.sequence_mode,
                "decodability": config.decodability,
                "rng": RNG_ALGORITHM,
                "flags": flags,
            },
        )
        self.logger.info(f"Achieved {report.achieved} against formula {report.formula}")
        return report
