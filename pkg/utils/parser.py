"""Scenario configuration parser for the spin-wave memory simulator."""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple, Union

from utils.config import DEFAULT_SEED
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

Value = Union[bool, int, float, str]

_TRUE = {'true', '1', 'yes', 'on'}
_FALSE = {'false', '0', 'no', 'off'}


@dataclass(frozen=True)
class Limit:
    """
    Allowed values of one parameter.

    Attributes:
        low: Smallest value (None for unbounded)
        high: Largest value (None for unbounded)
        low_open: Exclude low itself
        high_open: Exclude high itself
        choices: Allowed strings for text parameters
    """
    low: Optional[float] = None
    high: Optional[float] = None
    low_open: bool = False
    high_open: bool = False
    choices: Tuple[str, ...] = ()

    def check(self, key: str, value: Value):
        """
        Raises:
            ConfigError: if value lies outside the allowed range or set
        """
        if self.choices:
            if value not in self.choices:
                raise ConfigError(f"parameter '{key}' must be one of {', '.join(self.choices)}, got {value!r}")
            return
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return
        if math.isnan(value):
            raise ConfigError(f"parameter '{key}' must be a number, got {value!r}")
        below = self.low is not None and (value <= self.low if self.low_open else value < self.low)
        above = self.high is not None and (value >= self.high if self.high_open else value > self.high)
        if below or above:
            raise ConfigError(f"parameter '{key}' must lie in {self.describe()}, got {value!r}")

    def describe(self) -> str:
        left = '(' if self.low_open or self.low is None else '['
        right = ')' if self.high_open or self.high is None else ']'
        low = '-inf' if self.low is None else f'{self.low:g}'
        high = 'inf' if self.high is None else f'{self.high:g}'
        return f'{left}{low}, {high}{right}'


@dataclass
class ScenarioConfig:
    """
    Fully resolved configuration of one scenario run.

    Attributes:
        scenario: Scenario name
        params: Parameter values, one per default key
        out_dir: Output directory for artifacts
        seed: Root random seed
        sources: Where the non-default values came from (key -> 'file' or 'set')
    """
    scenario: str
    params: Dict[str, Value]
    out_dir: str = 'results'
    seed: int = DEFAULT_SEED
    sources: Dict[str, str] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Value:
        try:
            return self.params[key]
        except KeyError:
            raise ConfigError(f"scenario '{self.scenario}' has no parameter '{key}'") from None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scenario': self.scenario,
            'params': dict(sorted(self.params.items())),
            'seed': self.seed,
            'overridden': dict(sorted(self.sources.items())),
        }


class ScenarioConfigParser:
    """
    Builds ScenarioConfig objects from defaults, an optional JSON file and key=value overrides.

    Later sources win: defaults <- JSON file <- --set overrides. Every value is coerced to
    the type of its default, keys without a default are rejected, and the resolved values
    are checked against the parameter limits.
    """

    def __init__(self, defaults: Mapping[str, Mapping[str, Value]], limits: Optional[Mapping[str, Limit]] = None):
        """
        Args:
            defaults: Scenario name -> {parameter: default value}
            limits: Parameter name -> allowed values, shared by every scenario
        """
        self.defaults = {name: dict(values) for name, values in defaults.items()}
        self.limits = dict(limits or {})

    def scenarios(self) -> Tuple[str, ...]:
        return tuple(self.defaults)

    def parse(self, scenario: str, config_file: Optional[str] = None, overrides: Iterable[str] = (),
              out_dir: str = 'results', seed: Optional[int] = None) -> ScenarioConfig:
        """
        Resolve the configuration of a scenario.

        Args:
            scenario: Scenario name
            config_file: Path of a JSON object with parameter values (and optionally "seed")
            overrides: Strings of the form key=value
            out_dir: Output directory
            seed: Seed given on the command line; takes precedence over the file

        Returns:
            ScenarioConfig

        Raises:
            ConfigError: unknown scenario, unknown key, a value of the wrong type or outside its limits
        """
        if scenario not in self.defaults:
            raise ConfigError(f"unknown scenario '{scenario}'; choose one of: {', '.join(self.defaults)}")
        defaults = self.defaults[scenario]
        params = dict(defaults)
        sources: Dict[str, str] = {}
        resolved_seed = DEFAULT_SEED

        if config_file is not None:
            data = self.parse_file(config_file)
            if 'seed' in data:
                resolved_seed = self.coerce('seed', data.pop('seed'), DEFAULT_SEED)
            for key, raw in data.items():
                params[key] = self.coerce(key, raw, self._default(scenario, key))
                sources[key] = 'file'

        for text in overrides:
            key, raw = self.parse_override(text)
            if key == 'seed':
                resolved_seed = self.coerce('seed', raw, DEFAULT_SEED)
                continue
            params[key] = self.coerce(key, raw, self._default(scenario, key))
            sources[key] = 'set'

        if seed is not None:
            resolved_seed = self.coerce('seed', seed, DEFAULT_SEED)
        if resolved_seed < 0:
            raise ConfigError(f"seed must be non-negative, got {resolved_seed}")
        for key, value in params.items():
            if key in self.limits:
                self.limits[key].check(key, value)
        logger.debug("scenario %s resolved with %d overridden keys", scenario, len(sources))
        return ScenarioConfig(scenario, params, out_dir, resolved_seed, sources)

    def _default(self, scenario: str, key: str) -> Value:
        try:
            return self.defaults[scenario][key]
        except KeyError:
            known = ', '.join(sorted(self.defaults[scenario]))
            raise ConfigError(f"unknown parameter '{key}' for scenario '{scenario}' (known: {known})") from None

    @staticmethod
    def parse_file(filename: str) -> Dict[str, Any]:
        """
        Reads a JSON configuration file.

        Args:
            filename: Path to the file

        Returns:
            The top-level JSON object as a dict
        """
        try:
            with open(filename, 'r') as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read configuration file {filename}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"configuration file {filename} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"configuration file {filename} must hold a JSON object")
        return data

    @staticmethod
    def parse_override(text: str) -> Tuple[str, str]:
        key, sep, raw = text.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"override '{text}' is not of the form key=value")
        return key, raw.strip()

    @staticmethod
    def coerce(key: str, raw: Any, default: Value) -> Value:
        """
        Convert a raw value (string from --set, or JSON value) to the type of the default.

        Raises:
            ConfigError: if the value cannot represent that type
        """
        kind = type(default)
        try:
            if kind is bool:
                if isinstance(raw, bool):
                    return raw
                text = str(raw).strip().lower()
                if text in _TRUE:
                    return True
                if text in _FALSE:
                    return False
                raise ValueError(raw)
            if kind is int:
                if isinstance(raw, bool):
                    raise ValueError(raw)
                if isinstance(raw, int):
                    return raw
                number = float(raw)
                if not number.is_integer():
                    raise ValueError(raw)
                return int(number)
            if kind is float:
                if isinstance(raw, bool):
                    raise ValueError(raw)
                return float(raw)
            if not isinstance(raw, (str, int, float)) or isinstance(raw, bool):
                raise ValueError(raw)
            return str(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"parameter '{key}' expects {kind.__name__}, got {raw!r}") from None
