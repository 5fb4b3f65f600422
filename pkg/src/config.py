"""Configuration management for the Frey elimination toolkit."""

import copy
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from .cyclofield import KElement, cyclo_field
from .frobenius import CountingOptions

DEFAULTS: Dict[str, Any] = {
    'field': {'r_max': 31},
    'counting': {
        'workers': 1,
        'chunk_size': 1 << 20,
        'max_field_size': 20_000_000,
        'crosscheck_extra_degree': False,
    },
    'recognition': {'precision': 60, 'tolerance_bits': 20},
    'elimination': {'small_primes': [2, 3], 'factor_limit': None, 'strategy': 'full'},
    'units': {},
    'output': {'artifact_dir': './artifacts', 'markdown_report': True},
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """Configuration manager for the toolkit."""

    def __init__(self, config_path: str = "config.yaml", data: Optional[Dict[str, Any]] = None):
        """
        Initialize configuration from a YAML file, or from an already parsed mapping.

        Args:
            config_path: Path to the configuration YAML file
            data: Parsed configuration; skips reading config_path
        """
        self.config_path = config_path
        self._config = self._load_config() if data is None else _merge(DEFAULTS, data)
        self._validate_config(self._config)

    @classmethod
    def defaults(cls) -> 'Config':
        """Built-in configuration used when no file is present."""
        return cls('<defaults>', data={})

    @classmethod
    def resolve(cls, config_path: Optional[str] = None) -> 'Config':
        """
        Pick the configuration the CLI should use.

        An explicit path must exist. Otherwise FREY_CONFIG (also read from .env) or
        config.yaml is used when present, and the built-in defaults when not.
        """
        if config_path:
            return cls(config_path)
        load_dotenv()
        candidate = os.getenv('FREY_CONFIG', 'config.yaml')
        if Path(candidate).exists():
            return cls(candidate)
        return cls.defaults()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        config_file = Path(self.config_path)

        if not config_file.exists():
            raise FileNotFoundError(
                f"Configuration file not found: {self.config_path}\n"
                f"Please copy config.template.yaml to {self.config_path} and adjust the values."
            )

        with open(config_file, 'r') as f:
            config = yaml.safe_load(f) or {}

        if not isinstance(config, dict):
            raise ValueError(f"Configuration file {self.config_path} must contain a mapping")
        return _merge(DEFAULTS, config)

    def _validate_config(self, config: Dict[str, Any]) -> None:
        """Validate types and ranges of every known field."""
        positive_ints = [
            'field.r_max',
            'counting.workers',
            'counting.chunk_size',
            'counting.max_field_size',
            'recognition.precision',
            'recognition.tolerance_bits',
        ]

        for field in positive_ints:
            value = self._lookup(config, field)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"Please set a positive integer for {field}, got {value!r}")

        if not isinstance(self._lookup(config, 'counting.crosscheck_extra_degree'), bool):
            raise ValueError("counting.crosscheck_extra_degree must be true or false")

        small = self._lookup(config, 'elimination.small_primes')
        if not isinstance(small, list) or not all(isinstance(p, int) and p > 1 for p in small):
            raise ValueError(f"elimination.small_primes must be a list of primes, got {small!r}")

        limit = self._lookup(config, 'elimination.factor_limit')
        if limit is not None and (not isinstance(limit, int) or limit < 2):
            raise ValueError(f"elimination.factor_limit must be null or an integer >= 2, got {limit!r}")

        strategy = self._lookup(config, 'elimination.strategy')
        if strategy != 'full' and not (isinstance(strategy, list) and all(isinstance(j, int) for j in strategy)):
            raise ValueError(f"elimination.strategy must be 'full' or a list of Galois indices, got {strategy!r}")

        units = config.get('units') or {}
        if not isinstance(units, dict):
            raise ValueError("units must map r to a list of coefficient vectors")
        for r, vectors in units.items():
            if not isinstance(vectors, list) or not all(isinstance(v, list) for v in vectors):
                raise ValueError(f"units.{r} must be a list of coefficient vectors")

    @staticmethod
    def _lookup(config: Dict[str, Any], key: str) -> Any:
        current = config
        try:
            for k in key.split('.'):
                current = current[k]
        except (KeyError, TypeError):
            raise ValueError(f"Missing required configuration field: {key}")
        return current

    @property
    def field_config(self) -> Dict[str, Any]:
        return self._config['field']

    @property
    def counting_config(self) -> Dict[str, Any]:
        return self._config['counting']

    @property
    def recognition_config(self) -> Dict[str, Any]:
        return self._config['recognition']

    @property
    def elimination_config(self) -> Dict[str, Any]:
        return self._config['elimination']

    @property
    def units_config(self) -> Dict[str, Any]:
        return self._config.get('units') or {}

    @property
    def output_config(self) -> Dict[str, Any]:
        """Get output configuration."""
        return self._config.get('output', {})

    def counting_options(self, workers: Optional[int] = None) -> CountingOptions:
        counting, recognition = self.counting_config, self.recognition_config
        return CountingOptions(
            workers=workers or counting['workers'],
            chunk_size=counting['chunk_size'],
            max_field_size=counting['max_field_size'],
            crosscheck=counting['crosscheck_extra_degree'],
            precision=recognition['precision'],
            tolerance_bits=recognition['tolerance_bits'],
        )

    def units_for(self, r: int) -> List[KElement]:
        """Configured units of Q(zeta_r)^+ as field elements (keys may be ints or strings)."""
        vectors = self.units_config.get(r, self.units_config.get(str(r), []))
        field = cyclo_field(r)
        return [field.element(vector) for vector in vectors]

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self._config)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-notation key.

        Args:
            key: Configuration key in dot notation (e.g., 'counting.workers')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        keys = key.split('.')
        current = self._config

        try:
            for k in keys:
                current = current[k]
            return current
        except (KeyError, TypeError):
            return default
