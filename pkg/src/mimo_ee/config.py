"""Run configuration: INI-style file parsing with command-line overrides."""

import configparser
from dataclasses import dataclass, field

import numpy as np

from .analytic import PowerModel
from .errors import ConfigError
from .optimize import OptimizerSettings

_VALID_SWEEP_VARS = ("n_t", "snr_db")


@dataclass
class SweepSpec:
    variable: str = "snr_db"
    start: float = -10.0
    stop: float = 30.0
    points: int = 9
    spacing: str = "linear"

    def values(self):
        if self.points == 1:
            return [self.start]
        if self.spacing == "linear":
            vals = np.linspace(self.start, self.stop, self.points)
        else:
            vals = np.geomspace(self.start, self.stop, self.points)
        return list(vals)

    def integer_values(self):
        """Sweep values rounded to unique integers, order preserved."""
        out = []
        for v in self.values():
            i = int(round(v))
            if i not in out:
                out.append(i)
        return out


@dataclass
class RunConfig:
    """Everything one CLI invocation needs."""

    # [system]
    n_t: int = 8
    n_r: int = 16
    coherence: int = 5760
    training_len: int = 16
    snr_db: float = 20.0
    deltas: list = field(default_factory=lambda: [0.0, 0.15])
    # [lattice] oracle bounds
    nt_max: int = 64
    nr_max: int = 256
    tp_max: int = 512
    # [run]
    seed: int = 1
    trials: int = 1000
    threads: int = 1
    output: str = "out.csv"

    power: PowerModel = field(default_factory=PowerModel.reference)
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    sweep: SweepSpec = field(default_factory=SweepSpec)

    @property
    def snr(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


def _get(parser, section, key, cast, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def _delta_list(raw: str):
    vals = [float(v) for v in raw.replace(",", " ").split()]
    if not vals:
        raise ValueError("empty list")
    return vals


def _int(raw):
    return int(raw, 0) if isinstance(raw, str) else int(raw)


def load_config(path=None, overrides=()) -> RunConfig:
    """Build a RunConfig from an optional INI file plus section.key=value overrides."""
    parser = configparser.ConfigParser()
    if path is not None:
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") from exc
        unknown = set(parser.sections()) - {"system", "power", "optimizer", "sweep",
                                            "lattice", "run"}
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)

    cfg = RunConfig()
    cfg.n_t = _get(parser, "system", "n_t", _int, cfg.n_t)
    cfg.n_r = _get(parser, "system", "n_r", _int, cfg.n_r)
    cfg.coherence = _get(parser, "system", "coherence", _int, cfg.coherence)
    cfg.training_len = _get(parser, "system", "training_len", _int, cfg.training_len)
    cfg.snr_db = _get(parser, "system", "snr_db", float, cfg.snr_db)
    cfg.deltas = _get(parser, "system", "delta", _delta_list, cfg.deltas)

    ref = PowerModel.reference()
    st = _get(parser, "power", "symbol_time", float, ref.symbol_time)
    try:
        cfg.power = PowerModel(
            p_tx=_get(parser, "power", "p_tx_watts", float, ref.p_tx / ref.symbol_time) * st,
            p_rx=_get(parser, "power", "p_rx_watts", float, ref.p_rx / ref.symbol_time) * st,
            p_static=_get(parser, "power", "p_static_watts", float,
                          ref.p_static / ref.symbol_time) * st,
            amp_efficiency=_get(parser, "power", "amp_efficiency", float, ref.amp_efficiency),
            noise_energy=_get(parser, "power", "noise_energy", float, ref.noise_energy),
            symbol_time=st,
        )
        defaults = OptimizerSettings()
        cfg.optimizer = OptimizerSettings(
            ee_threshold=_get(parser, "optimizer", "ee_threshold", float, defaults.ee_threshold),
            max_outer_iters=_get(parser, "optimizer", "max_outer_iters", _int,
                                 defaults.max_outer_iters),
            line_search_tol=_get(parser, "optimizer", "line_search_tol", float,
                                 defaults.line_search_tol),
            beta_upper=_get(parser, "optimizer", "beta_upper", float, defaults.beta_upper),
        )
    except Exception as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

    sw = SweepSpec()
    sw.variable = _get(parser, "sweep", "variable", str, sw.variable)
    if sw.variable not in _VALID_SWEEP_VARS:
        raise ConfigError(f"[sweep] variable must be one of {_VALID_SWEEP_VARS}")
    sw.start = _get(parser, "sweep", "start", float, sw.start)
    sw.stop = _get(parser, "sweep", "stop", float, sw.stop)
    sw.points = _get(parser, "sweep", "points", _int, sw.points)
    if sw.points < 1:
        raise ConfigError("[sweep] points must be >= 1")
    sw.spacing = _get(parser, "sweep", "spacing", str, sw.spacing)
    if sw.spacing not in ("linear", "log"):
        raise ConfigError("[sweep] spacing must be 'linear' or 'log'")
    cfg.sweep = sw

    cfg.nt_max = _get(parser, "lattice", "n_t_max", _int, cfg.nt_max)
    cfg.nr_max = _get(parser, "lattice", "n_r_max", _int, cfg.nr_max)
    cfg.tp_max = _get(parser, "lattice", "t_p_max", _int, cfg.tp_max)

    cfg.seed = _get(parser, "run", "seed", _int, cfg.seed)
    cfg.trials = _get(parser, "run", "trials", _int, cfg.trials)
    cfg.threads = _get(parser, "run", "threads", _int, cfg.threads)
    cfg.output = _get(parser, "run", "output", str, cfg.output)

    for name, value in (("n_t", cfg.n_t), ("coherence", cfg.coherence),
                        ("training_len", cfg.training_len), ("trials", cfg.trials),
                        ("threads", cfg.threads)):
        if value < 1:
            raise ConfigError(f"{name} must be >= 1, got {value}")
    if cfg.n_r <= cfg.n_t:
        raise ConfigError(f"need n_r > n_t, got n_r={cfg.n_r}, n_t={cfg.n_t}")
    for d in cfg.deltas:
        if not 0 <= d < 1:
            raise ConfigError(f"delta values must be in [0, 1), got {d}")
    return cfg
