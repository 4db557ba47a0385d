"""
Config parser for run configurations given as flat ``key = value`` files and command-line flags.
"""
import math
import re
from dataclasses import dataclass, fields

from src.models.chain import ChainSpec
from src.utils.errors import ConfigError

FORMATS = ('csv', 'json')
PLOTS = ('none', 'svg')
COMMENT = re.compile(r'(^|\s)#.*')


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a command needs: chain parameters, solver settings and output settings.

    Frequencies are in units of gamma unless t1_us is set, in which case
    gamma, omega_a, omega_b, delta and j are in MHz (omega / 2pi).
    """
    n: int = 1
    gamma: float = 1.0
    eta2: float = 1.0
    omega_a: float = 1.0
    omega_b: float = 1.0
    delta: float = 0.0
    j: tuple = None
    t1_us: float = None
    tol: float = 1e-8
    budget: int = 400
    threads: int = 1
    format: str = 'csv'
    plot: str = 'none'
    out_dir: str = 'out'

    @property
    def absolute_units(self):
        return self.t1_us is not None


def _optional_float(text):
    return None if text.strip().lower() in ('', 'none') else float(text)


def _float_list(text):
    if text.strip().lower() in ('', 'none'):
        return None
    return tuple(float(part) for part in text.split(',') if part.strip())


def _choice(options):
    def convert(text):
        text = text.strip()
        if text not in options:
            raise ValueError(f'expected one of {options}, got {text!r}')
        return text
    return convert


class ConfigParser:
    """
    Class for reading, merging, validating and dumping run configurations.
    """

    CONVERTERS = {
        'n': int,
        'gamma': float,
        'eta2': float,
        'omega_a': float,
        'omega_b': float,
        'delta': float,
        'j': _float_list,
        't1_us': _optional_float,
        'tol': float,
        'budget': int,
        'threads': int,
        'format': _choice(FORMATS),
        'plot': _choice(PLOTS),
        'out_dir': str.strip,
    }

    @staticmethod
    def read_file(path):
        """
        Read a ``key = value`` file; blank lines and ``#`` comments are ignored.

        A ``#`` starts a comment only at the start of a line or after whitespace,
        so values such as ``out_dir = runs/#3`` are kept whole.

        Args:
            path (str): Config file path

        Returns:
            dict: Typed values keyed by config key
        """
        raw = {}
        try:
            with open(path) as f:
                lines = f.readlines()
        except OSError as e:
            raise ConfigError(f'cannot read config file {path}: {e}', key='config') from e
        for number, line in enumerate(lines, start=1):
            line = COMMENT.sub('', line).strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError(f'{path}:{number}: expected "key = value", got {line!r}', key='config')
            key, value = (part.strip() for part in line.split('=', 1))
            raw[key] = value
        return ConfigParser.convert(raw)

    @staticmethod
    def convert(raw):
        """Convert string values to their config types; unknown keys are errors."""
        values = {}
        for key, text in raw.items():
            if key not in ConfigParser.CONVERTERS:
                raise ConfigError(f'unknown config key {key!r}', key=key)
            try:
                values[key] = ConfigParser.CONVERTERS[key](text)
            except ValueError as e:
                raise ConfigError(f'invalid value for {key}: {text!r} ({e})', key=key) from None
        return values

    @staticmethod
    def build(file_values=None, overrides=None, defaults=None):
        """
        Merge defaults, file values and flags (flags win), then validate.

        Args:
            file_values (dict, optional): Values read from a config file
            overrides (dict, optional): Flag values; None means "not given"
            defaults (dict, optional): Command-specific defaults

        Returns:
            RunConfig: Validated configuration
        """
        merged = dict(defaults or {})
        merged.update(file_values or {})
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        known = {f.name for f in fields(RunConfig)}
        for key in merged:
            if key not in known:
                raise ConfigError(f'unknown config key {key!r}', key=key)
        if merged.get('j') is not None:
            merged['j'] = tuple(float(v) for v in merged['j']) or None
        config = RunConfig(**merged)
        ConfigParser.validate(config)
        return config

    @staticmethod
    def validate(config):
        if config.format not in FORMATS:
            raise ConfigError(f'format must be one of {FORMATS}, got {config.format!r}', key='format')
        if config.plot not in PLOTS:
            raise ConfigError(f'plot must be one of {PLOTS}, got {config.plot!r}', key='plot')
        if not config.tol > 0:
            raise ConfigError(f'tol must be positive, got {config.tol}', key='tol')
        if config.budget < 1:
            raise ConfigError(f'budget must be at least 1, got {config.budget}', key='budget')
        if config.threads < 1:
            raise ConfigError(f'threads must be at least 1, got {config.threads}', key='threads')
        if not 0.0 <= config.eta2 <= 1.0:
            raise ConfigError(f'eta2 must lie in [0, 1], got {config.eta2}', key='eta2')
        if not config.out_dir:
            raise ConfigError('out_dir must not be empty', key='out_dir')
        ConfigParser.to_chain_spec(config)

    @staticmethod
    def to_chain_spec(config):
        """
        ChainSpec in solver units: gamma units by default, rad/us with T1 in us
        when t1_us is set.
        """
        j = config.j if config.j is not None else (1.0,) * (config.n - 1)
        scale = 2.0 * math.pi if config.absolute_units else 1.0
        return ChainSpec(
            n=config.n,
            gamma=config.gamma * scale,
            eta=math.sqrt(config.eta2),
            omega_a=config.omega_a * scale,
            omega_b=config.omega_b * scale,
            delta=config.delta * scale,
            j=tuple(v * scale for v in j),
            t1=config.t1_us,
        )

    @staticmethod
    def dump(config):
        """Text form that read_file parses back to the same RunConfig."""
        lines = []
        for f in fields(RunConfig):
            value = getattr(config, f.name)
            if value is None:
                continue
            if f.name == 'j':
                text = ', '.join(repr(v) for v in value)
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f'{f.name} = {text}')
        return '\n'.join(lines) + '\n'
