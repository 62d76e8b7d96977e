"""Main AltTopology application class"""

import argparse
import csv
import io
import json
import logging
import os
from typing import Any, Callable, Dict, List, Optional, Sequence

from .capacity import SWEEP_COLUMNS, sweep_rows
from .config import ConfigManager
from .errors import SchemeError, TopologyError
from .field import FieldSpec
from .models import DECODABILITY_MODES, SCENARIOS, SEQUENCE_MODES, DecodabilityReport, SearchSpec, SimConfig
from .oracle import LinearRateOracle
from .scenarios import (
    BaseScenario,
    BroadcastScenario,
    InterferenceScenario,
    ThreeUserExampleScenario,
    XChannelScenario,
)
from .schemes import BUILTIN_SCHEMES, LinearScheme, builtin_scheme, format_scheme, load_scheme, save_scheme
from .simulate import Simulator
from .topology import (
    TWO_USER_STATES,
    StateSequence,
    TopologyState,
    load_topology_pair,
    sample_realization,
)
from .verifier import Verifier

VERIFY_MODES = ("worst", "generic", "sampled", "exact", "single")


class AltTopology:
    """Command-line application for partially connected networks with alternating connectivity

    This class parses the command line and hands each subcommand to the
    component that does the work:
    - Scenarios (ic2, x2, bc2, ic3-example) for formulas and schedules
    - Simulator for end-to-end runs
    - Verifier for decodability checks
    - LinearRateOracle for exhaustive searches
    """

    def __init__(self):
        """Initialize the AltTopology instance"""
        # Options
        self.args: Optional[argparse.Namespace] = None
        self.json_output = False
        self.out_path: Optional[str] = None

        # Components (initialized later)
        self.logger = self._setup_logger()
        self.config_manager: Optional[ConfigManager] = None

    def _setup_logger(self) -> logging.Logger:
        """Set up the logger for the application"""
        logger = logging.getLogger("alt-topology")
        logger.setLevel(logging.INFO)

        if not logger.handlers:
            ch = logging.StreamHandler()
            ch.setLevel(logging.INFO)

            formatter = logging.Formatter('[%(levelname)s] %(message)s')
            ch.setFormatter(formatter)

            logger.addHandler(ch)
        else:
            for handler in logger.handlers:
                handler.setLevel(logging.INFO)

        return logger

    def parse_arguments(self, argv: Optional[Sequence[str]] = None) -> None:
        """Parse command line arguments"""
        parser = argparse.ArgumentParser(
            description="Capacity formulas, schedules, decodability checks and exhaustive linear-scheme "
                        "search for partially connected networks with alternating connectivity."
        )

        parser.add_argument("-j", "--json", action="store_true", help="Output results in JSON format")
        parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose output")
        parser.add_argument("-q", "--quiet", action="store_true", help="Suppress INFO messages")
        parser.add_argument("--config", default="./alt_topology.conf", metavar="FILE",
                            help="YAML configuration file")
        parser.add_argument("--out", metavar="PATH", help="Write the report (or CSV, scheme text) to PATH")

        sub = parser.add_subparsers(dest="command", required=True)

        cap = sub.add_parser("capacity", help="Closed-form sum capacity and outer bounds")
        cap.add_argument("--scenario", choices=SCENARIOS, default="ic2")
        cap.add_argument("--lambda", dest="fractions", metavar="FRACTIONS",
                         help="State fractions as rationals, e.g. 1/3,1/3,1/3,0")
        cap.add_argument("--pair", metavar="FILE", help="Topology pair file or configured pair id (ic3-example)")
        cap.add_argument("--p", type=int, help="Field prime")
        cap.add_argument("--sweep", type=int, metavar="DEN",
                         help="CSV of ic2 values for every fraction vector with denominator DEN")

        sim = sub.add_parser("simulate", help="Simulate a scenario schedule over one block")
        sim.add_argument("--scenario", choices=SCENARIOS, default="ic2")
        sim.add_argument("--lambda", dest="fractions", required=True, metavar="FRACTIONS")
        sim.add_argument("--pair", metavar="FILE")
        sim.add_argument("--p", type=int)
        sim.add_argument("--n", type=int, help="Block length")
        sim.add_argument("--seed", type=int)
        sim.add_argument("--sequence-mode", choices=SEQUENCE_MODES)
        sim.add_argument("--decodability", choices=DECODABILITY_MODES, default="worst")

        ver = sub.add_parser("verify", help="Check decodability of a scheme")
        ver.add_argument("scheme", nargs="?", metavar="SCHEME_FILE")
        ver.add_argument("--builtin", choices=sorted(BUILTIN_SCHEMES))
        ver.add_argument("--mode", choices=VERIFY_MODES, default="worst")
        ver.add_argument("--p", type=int, help="Field prime (default: the scheme's own)")
        ver.add_argument("--trials", type=int)
        ver.add_argument("--seed", type=int)
        ver.add_argument("--guard", type=int, help="Largest realization count to enumerate")
        ver.add_argument("--shards", type=int, default=1)

        srch = sub.add_parser("search", help="Maximum zero-error linear sum rate of a state sequence")
        srch.add_argument("--users", type=int, choices=(2, 3), help="Number of users the sequence must have")
        srch.add_argument("--sequence", metavar="IDS", help="Comma separated state ids, e.g. A,B,C")
        srch.add_argument("--pair", metavar="FILE", help="3-user states; ids are their names")
        srch.add_argument("--p", type=int)
        srch.add_argument("--mode", choices=DECODABILITY_MODES, default="worst")
        srch.add_argument("--max-symbols", metavar="CAPS", help="Per-transmitter cap, N or N1,N2,...")
        srch.add_argument("--budget", type=int)
        srch.add_argument("--candidate-limit", type=int)
        srch.add_argument("--witness-out", metavar="FILE", help="Save the witness scheme")

        find = sub.add_parser("find-examples", help="Search 3-user state pairs that gain from joint coding")
        find.add_argument("--p", type=int)
        find.add_argument("--mode", choices=DECODABILITY_MODES, default="worst")
        find.add_argument("--raw", action="store_true", help="Keep pairs equal up to relabeling")
        find.add_argument("--shards", type=int, default=1)
        find.add_argument("--budget", type=int)
        find.add_argument("--witness-dir", metavar="DIR", help="Save each example's witness scheme")

        exp = sub.add_parser("export-scheme", help="Write a built-in scheme in the scheme text format")
        exp.add_argument("name", choices=sorted(BUILTIN_SCHEMES))
        exp.add_argument("--p", type=int)

        args = parser.parse_args(argv)

        # Set instance variables
        self.args = args
        self.json_output = args.json
        self.out_path = args.out

        # Configure logger
        if args.verbose:
            self.logger.setLevel(logging.DEBUG)
            for handler in self.logger.handlers:
                handler.setLevel(logging.DEBUG)
        elif args.quiet:
            self.logger.setLevel(logging.WARNING)
            for handler in self.logger.handlers:
                handler.setLevel(logging.WARNING)

    def _setting(self, value: Any, key: str) -> Any:
        """Command-line value, falling back to the configuration"""
        return value if value is not None else self.config_manager.get(key)

    def _field(self, p: Optional[int] = None) -> FieldSpec:
        return FieldSpec(self._setting(p, "field"))

    def select_scenario(self, name: str, pair: Optional[str] = None, decodability: str = "worst",
                        oracle: Optional[LinearRateOracle] = None) -> BaseScenario:
        """Return the scenario for a command-line name

        Raises:
            TopologyError: If ic3-example is requested without a pair file
        """
        if name == "ic2":
            return InterferenceScenario(logger=self.logger)
        if name == "x2":
            return XChannelScenario(logger=self.logger)
        if name == "bc2":
            return BroadcastScenario(logger=self.logger)
        if name == "ic3-example":
            if not pair:
                raise TopologyError("scenario ic3-example needs --pair FILE")
            path = self.config_manager.resolve_pair(pair)
            self.logger.info(f"Using topology pair {path}")
            return ThreeUserExampleScenario.from_file(path, decodability, oracle, self.logger)
        raise TopologyError(f"unknown scenario {name!r}")

    def _oracle(self, budget: Optional[int] = None, shards: int = 1) -> LinearRateOracle:
        verifier = Verifier(guard=self.config_manager.get("enumeration_guard"), shards=shards, logger=self.logger)
        return LinearRateOracle(budget=self._setting(budget, "search_budget"), verifier=verifier,
                                logger=self.logger)

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Main entry point for the application

        Returns:
            Process exit code: 0 on success or a passing verdict, 1 on a failing verdict

        Raises:
            AltTopologyError: Usage, precondition and size errors carry their own exit code
        """
        # Parse arguments
        self.parse_arguments(argv)

        # Load configuration
        self.config_manager = ConfigManager(self.args.config, logger=self.logger)
        if self.out_path is None and self.config_manager.output:
            self.out_path = os.path.join(self.config_manager.output, f"{self.args.command}.json")

        handlers: Dict[str, Callable[[], int]] = {
            "capacity": self._handle_capacity,
            "simulate": self._handle_simulate,
            "verify": self._handle_verify,
            "search": self._handle_search,
            "find-examples": self._handle_find_examples,
            "export-scheme": self._handle_export_scheme,
        }
        return handlers[self.args.command]()

    def _handle_capacity(self) -> int:
        """Handle capacity evaluation and sweeps"""
        args = self.args
        if args.sweep is not None:
            rows = sweep_rows(args.sweep)
            buffer = io.StringIO()
            writer = csv.DictWriter(buffer, fieldnames=list(SWEEP_COLUMNS), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            self._write_text(buffer.getvalue())
            self.logger.info(f"Swept {len(rows)} fraction vectors with denominator {args.sweep}")
            return 0

        if not args.fractions:
            raise TopologyError("capacity needs --lambda FRACTIONS or --sweep DEN")
        scenario = self.select_scenario(args.scenario, args.pair)
        fractions = scenario.parse_fractions(args.fractions)
        report = scenario.capacity_report(fractions, self._field(args.p))
        self._emit(report, lambda: self._display_capacity(report))
        return 0

    def _handle_simulate(self) -> int:
        """Handle an end-to-end simulation run"""
        args = self.args
        scenario = self.select_scenario(args.scenario, args.pair, args.decodability,
                                        self._oracle() if args.scenario == "ic3-example" else None)
        config = SimConfig(
            scenario=args.scenario,
            fractions=scenario.parse_fractions(args.fractions),
            p=self._setting(args.p, "field"),
            n=self._setting(args.n, "block_length"),
            seed=self._setting(args.seed, "seed"),
            sequence_mode=self._setting(args.sequence_mode, "sequence_mode"),
            decodability=args.decodability,
            pair_file=args.pair,
        )
        report = Simulator(logger=self.logger).run(config, scenario)
        data = report.to_dict()
        self._emit(data, lambda: self._display_simulation(data))
        return 0

    def _load_verify_scheme(self) -> LinearScheme:
        args = self.args
        if args.builtin and args.scheme:
            raise SchemeError("give either a scheme file or --builtin, not both")
        if args.builtin:
            return builtin_scheme(args.builtin, self._field(args.p))
        if not args.scheme:
            raise SchemeError("verify needs a scheme file or --builtin NAME")
        return load_scheme(args.scheme)

    def _handle_verify(self) -> int:
        """Handle decodability verification; the exit code follows the verdict"""
        args = self.args
        scheme = self._load_verify_scheme()
        field = FieldSpec(args.p) if args.p is not None else scheme.field
        verifier = Verifier(guard=self._setting(args.guard, "enumeration_guard"), shards=args.shards,
                            logger=self.logger)
        trials = self._setting(args.trials, "trials")
        seed = self._setting(args.seed, "seed")
        self.logger.info(f"Verifying {scheme!r} over {field} ({args.mode})")

        if args.mode == "worst":
            report = verifier.worst_case_check(scheme, field)
        elif args.mode == "generic":
            report = verifier.generic_report(scheme, field)
        elif args.mode == "sampled":
            report = verifier.generic_check(scheme, field, trials, seed)
        elif args.mode == "exact":
            report = verifier.exhaustive_fraction_report(scheme, field)
        else:
            scheme = scheme.with_field(field)
            report = verifier.check_single(scheme, sample_realization(scheme.seq, field, seed))

        data = report.to_dict()
        data["scheme"] = scheme.name or (args.scheme or args.builtin)
        data["field"] = field.p
        self._emit(data, lambda: self._display_verdict(data, report))
        return 0 if report.verdict else 1

    def _search_sequence(self) -> StateSequence:
        args = self.args
        if args.pair:
            pair = load_topology_pair(self.config_manager.resolve_pair(args.pair))
            catalog: Dict[str, TopologyState] = {}
            for default, state in zip(("S1", "S2"), pair):
                name = state.name if state.name and state.name not in catalog else default
                catalog[name] = TopologyState(state.present, name)
            text = args.sequence or ",".join(catalog)
        else:
            if not args.sequence:
                raise TopologyError("search needs --sequence IDS (or --pair FILE for 3 users)")
            catalog, text = TWO_USER_STATES, args.sequence
        seq = StateSequence.parse(text, catalog)
        if args.users is not None and seq.k != args.users:
            raise TopologyError(f"sequence has {seq.k} users, --users says {args.users}")
        return seq

    @staticmethod
    def _caps(text: Optional[str]):
        if text is None:
            return None
        try:
            values = tuple(int(x) for x in text.split(","))
        except ValueError:
            raise SchemeError(f"--max-symbols must be N or N1,N2,..., got {text!r}")
        return values[0] if len(values) == 1 else values

    def _handle_search(self) -> int:
        """Handle an exhaustive linear-rate search"""
        args = self.args
        seq = self._search_sequence()
        oracle = self._oracle(args.budget)
        spec = SearchSpec(seq, self._field(args.p), args.mode, max_symbols=self._caps(args.max_symbols),
                          budget=oracle.budget, candidate_limit=args.candidate_limit)
        self.logger.info(f"Searching {seq} over {spec.field}, caps {spec.caps}, "
                         f"up to {oracle.required_budget(spec)} candidates")
        result = oracle.max_linear_rate(spec)
        if args.witness_out and result.witness is not None:
            save_scheme(result.witness, args.witness_out)
            self.logger.info(f"Witness written to {args.witness_out}")
        data = result.to_dict()
        data["spec"] = spec.to_dict()
        self._emit(data, lambda: self._display_search(data))
        return 0

    def _handle_find_examples(self) -> int:
        """Handle the 3-user example-pair search"""
        args = self.args
        field = self._field(args.p)
        oracle = self._oracle(args.budget, args.shards)
        profiles = oracle.find_example_topologies(field, 3, args.mode, raw=args.raw, shards=args.shards)
        if args.witness_dir:
            os.makedirs(args.witness_dir, exist_ok=True)
            for i, profile in enumerate(profiles, 1):
                if profile.witness is not None:
                    save_scheme(profile.witness, os.path.join(args.witness_dir, f"example{i}.scheme"))
        data = {
            "field": field.p,
            "decodability": args.mode,
            "raw": args.raw,
            "count": len(profiles),
            "examples": [profile.to_dict() for profile in profiles],
        }
        self._emit(data, lambda: self._display_examples(data))
        return 0

    def _handle_export_scheme(self) -> int:
        """Handle export of a built-in scheme"""
        scheme = builtin_scheme(self.args.name, self._field(self.args.p))
        self._write_text(format_scheme(scheme))
        return 0

    def _write_text(self, text: str) -> None:
        if self.out_path:
            self._write_file(self.out_path, text)
        else:
            print(text, end="")

    def _write_file(self, path: str, text: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w") as f:
            f.write(text)
        self.logger.info(f"Wrote {path}")

    def _emit(self, data: Dict[str, Any], display: Callable[[], None]) -> None:
        """Write the JSON report where requested and print it or its table form"""
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
        if self.out_path:
            self._write_file(self.out_path, text)
        if self.json_output:
            print(text, end="")
        else:
            display()

    @staticmethod
    def _rate(entry: Optional[Dict[str, str]]) -> str:
        if entry is None:
            return "open"
        return f"{entry['value']} ({entry['decimal']})"

    def _display_capacity(self, report: Dict[str, Any]) -> None:
        """Display a capacity report"""
        print(f"Scenario:  {report['scenario']}")
        print(f"Fractions: {', '.join(f'{k}={v}' for k, v in report['fractions'].items())}")
        print(f"Field:     GF({report['field']})")
        print(f"Capacity:  {self._rate(report['capacity'])}")
        if "baseline" in report:
            print(f"Baseline:  {self._rate(report['baseline'])}")
            print(f"Gain:      {self._rate(report['gain'])}")
        if "bounds" in report:
            rows = [[name, self._rate(value)] for name, value in report["bounds"].items()]
            self._print_table(["Bound", "Value"], rows)
        if "csit_mapping" in report:
            rows = [[state, pattern] for state, pattern in report["csit_mapping"].items()]
            self._print_table(["State", "CSIT (Tx1,Tx2)"], rows)
        if report["flags"]:
            print(f"Flags:     {', '.join(report['flags'])}")

    def _display_simulation(self, data: Dict[str, Any]) -> None:
        """Display a simulation report"""
        config = data["config"]
        print(f"Scenario:        {config['scenario']} over GF({config['p']}), n={config['n']}, "
              f"{config['sequence_mode']} sequence, seed {config['seed']}")
        print(f"State counts:    {', '.join(f'{k}={v}' for k, v in data['state_counts'].items())}")
        print(f"Scheme rate:     {self._rate(data['scheme_rate'])}")
        print(f"Achieved rate:   {self._rate(data['achieved'])}")
        print(f"Formula:         {self._rate(data['formula'])}")
        print(f"Gap:             {self._rate(data['gap'])}")
        if data["empirical_formula"] is not None and data["empirical_formula"] != data["formula"]:
            print(f"Block formula:   {self._rate(data['empirical_formula'])}")
            print(f"Block gap:       {self._rate(data['empirical_gap'])}")
        print(f"Decoded symbols: {data['decoded_symbols']} ({data['decode_failures']} failures)")
        if data["provenance"]["flags"]:
            print(f"Flags:           {', '.join(data['provenance']['flags'])}")
        print(f"Runtime:         {data['timing']['runtime_seconds']:.3f}s")

    def _display_verdict(self, data: Dict[str, Any], report: DecodabilityReport) -> None:
        """Display a decodability report"""
        verdict = "PASS" if report.verdict else "FAIL"
        print(f"{data['scheme']} over GF({data['field']}), {report.mode}: {verdict}")
        rows = [[rx, "yes" if ok else "no"] for rx, ok in data["receivers"].items()]
        self._print_table(["Receiver", "Decodes"], rows)
        what = "trials" if not report.exact else "realizations"
        print(f"{report.failures} of {report.realizations} {what} fail "
              f"(fraction {self._rate(data['failure_fraction'])})")
        if report.standard_error is not None:
            print(f"Standard error: {report.standard_error:.6f}")
        if report.counterexample is not None:
            print("Counterexample (first failing realization):")
            for slot in range(report.counterexample.seq.n):
                grid = report.counterexample.grid(slot).to_list()
                state = report.counterexample.seq.ids[slot]
                print(f"  slot {slot + 1} [{state}]: {grid}")

    def _display_search(self, data: Dict[str, Any]) -> None:
        """Display a search result"""
        spec = data["spec"]
        print(f"Sequence:   {','.join(spec['sequence'])} over GF({spec['field']}), {spec['decodability']}")
        print(f"Best rate:  {self._rate(data['best_rate'])} (linear zero-error optimum)")
        print(f"Symbols:    {data['symbols']}")
        print(f"Candidates: {data['candidates']} ({'exhaustive' if data['exhaustive'] else 'truncated'})")
        if data["witness"] is not None:
            print("Witness:")
            print(data["witness"]["scheme"], end="")

    def _display_examples(self, data: Dict[str, Any]) -> None:
        """Display example pairs in table format"""
        print(f"{data['count']} example pairs over GF({data['field']}) ({data['decodability']})")
        rows: List[List[str]] = []
        for i, example in enumerate(data["examples"], 1):
            first, second = example["states"]
            pairwise = " ".join(f"{k}:{v}" for k, v in example["pairwise"].items())
            rows.append([str(i), "/".join(first), "/".join(second), example["joint"], pairwise])
        if rows:
            self._print_table(["#", "S1", "S2", "Joint", "Pairwise"], rows)

    def _print_table(self, headers: List[str], data: List[List[str]]) -> None:
        """Print a formatted table"""
        # Calculate column widths
        widths = [len(h) for h in headers]
        for row in data:
            for i, val in enumerate(row):
                if i < len(widths):
                    widths[i] = max(widths[i], len(str(val)))

        header_line = "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))
        print("-" * len(header_line))
        print(header_line)
        print("-" * len(header_line))

        for row in data:
            print("  ".join(str(val).ljust(widths[i]) for i, val in enumerate(row)))

        print("-" * len(header_line))
