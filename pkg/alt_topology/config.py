"""Configuration management for alt-topology"""

import os
import logging
from typing import Any, Dict, List, Optional
import yaml

from .field import is_prime
from .models import SEQUENCE_MODES, ExamplePairConfig
from .topology import DEFAULT_ENUMERATION_GUARD

DEFAULTS: Dict[str, Any] = {
    "field": 3,
    "enumeration_guard": DEFAULT_ENUMERATION_GUARD,
    "search_budget": 10 ** 6,
    "trials": 1000,
    "seed": 0,
    "block_length": 3000,
    "sequence_mode": "quota",
}

# Keys whose value must be an integer of at least the given size
_MINIMUMS = {"enumeration_guard": 1, "search_budget": 1, "trials": 1, "seed": 0, "block_length": 1}


class ConfigManager:
    """Manages loading and accessing configuration from YAML file"""

    def __init__(self, config_file: str = "./alt_topology.conf", logger: Optional[logging.Logger] = None):
        """Initialize configuration manager

        Args:
            config_file: Path to configuration file
            logger: Logger instance
        """
        self.config_file = os.path.expanduser(config_file)
        self.logger = logger or logging.getLogger(__name__)

        self.settings: Dict[str, Any] = dict(DEFAULTS)
        self.example_pairs: Dict[str, ExamplePairConfig] = {}
        self.output: Optional[str] = None

        self.load()

    def load(self) -> None:
        """Load configuration from YAML file

        Configuration file structure:
        ```yaml
        field: 3                      # Default prime
        enumeration_guard: 10000000   # Largest exhaustive realization count
        search_budget: 1000000        # Oracle candidate budget
        trials: 1000                  # Sampled decodability trials
        seed: 0
        block_length: 3000            # Simulation block length n
        sequence_mode: quota          # quota or iid
        output: ./results             # Directory for JSON reports

        example_pairs:
          - id: "ex1"                 # Identifier used with --pair
            name: "First example"     # Human-readable name
            path: "data/ic3_example1.txt"
        ```
        """
        if not os.path.exists(self.config_file):
            self.logger.warning(f"Configuration file {self.config_file} not found. Using default settings.")
            return

        try:
            self.logger.info(f"Loading user configuration from {self.config_file}")

            with open(self.config_file, 'r') as f:
                config = yaml.safe_load(f)

            if not config or not isinstance(config, dict):
                self.logger.warning(f"Configuration file {self.config_file} is empty or invalid")
                return

            self._load_settings(config)

            if 'output' in config and config['output']:
                self.output = self._resolve(str(config['output']))

            if 'example_pairs' in config:
                self._load_example_pairs(config['example_pairs'] or [])

        except yaml.YAMLError as e:
            self.logger.error(f"Error parsing YAML in configuration file: {e}")
        except IOError as e:
            self.logger.error(f"Error reading configuration file: {e}")
        except Exception as e:
            self.logger.error(f"Unexpected error loading configuration: {e}")

    def _load_settings(self, config: Dict[str, Any]) -> None:
        """Validate scalar settings, keeping the default for anything malformed

        Args:
            config: Parsed YAML mapping
        """
        for key in DEFAULTS:
            if key not in config:
                continue
            value = config[key]
            if key == "sequence_mode":
                if value not in SEQUENCE_MODES:
                    self.logger.warning(f"Ignoring sequence_mode {value!r}, expected one of {SEQUENCE_MODES}")
                    continue
            elif isinstance(value, bool) or not isinstance(value, int):
                self.logger.warning(f"Ignoring {key}: expected an integer, got {value!r}")
                continue
            elif key == "field" and not is_prime(value):
                self.logger.warning(f"Ignoring field {value}: not a prime")
                continue
            elif key in _MINIMUMS and value < _MINIMUMS[key]:
                self.logger.warning(f"Ignoring {key} {value}: must be at least {_MINIMUMS[key]}")
                continue
            self.settings[key] = value
            self.logger.debug(f"Setting {key} = {value}")

    def _load_example_pairs(self, pairs_data: List[Dict]) -> None:
        """Load example pair entries; relative paths are taken from the config file's directory

        Args:
            pairs_data: List of example pair dictionaries
        """
        self.logger.info(f"Found {len(pairs_data)} example pair entries")

        for pair_data in pairs_data:
            pair_id = pair_data.get('id') if isinstance(pair_data, dict) else None
            if not pair_id:
                self.logger.warning("Skipping example pair without ID")
                continue

            try:
                entry = ExamplePairConfig.from_dict(pair_data)
                entry.path = self._resolve(entry.path)
                self.example_pairs[entry.id] = entry
                self.logger.debug(f"Loaded example pair {entry.id}: {entry.path}")
            except Exception as e:
                self.logger.warning(f"Error loading example pair {pair_id}: {e}")

    def _resolve(self, path: str) -> str:
        """Relative paths are taken from the config file's directory"""
        path = os.path.expanduser(path)
        if os.path.isabs(path):
            return path
        return os.path.join(os.path.dirname(os.path.abspath(self.config_file)), path)

    def get(self, key: str) -> Any:
        return self.settings[key]

    def resolve_pair(self, name: str) -> str:
        """Path of a registered example pair, or name itself when it is not registered"""
        entry = self.example_pairs.get(name)
        return entry.path if entry else name
