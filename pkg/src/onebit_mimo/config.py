"""Experiment configuration: a JSON-compatible tree with validated defaults.

Every key is optional; the defaults describe the reference four-cell
setup.  See ``docs/config_schema.md`` for the full schema.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from pathlib import Path

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "PowerConfig",
    "MCConfig",
    "AnalysisConfig",
    "OutputConfig",
    "ExperimentConfig",
    "load_config",
    "config_from_dict",
    "config_hash",
]


class ConfigError(ValueError):
    """Schema violation; the message names the offending field."""


@dataclass(frozen=True)
class ScenarioConfig:
    L: int = 4
    M: int = 128
    K: int = 8
    bs_positions: list | None = None
    placement_mode: str = "equally-spaced-circle"
    circle_radius: float = 250.0
    angular_offset: float = 0.0
    user_positions: list | None = None
    alpha: float = 3.0
    pathloss_const: float = 1e-3
    beta: list | None = None


@dataclass(frozen=True)
class PowerConfig:
    pt_db: list = field(default_factory=lambda: list(range(-30, 21, 2)))
    sigma2_dbm: float = -80.0
    rho_p: object = "inverse-noise"


@dataclass(frozen=True)
class MCConfig:
    trials: int = 2000
    symbol_draws: int = 200
    seed: int = 0
    symbols: str = "gaussian"
    qn_method: str = "covariance"
    transmit_gain: str = "deterministic"
    batches: int = 20


@dataclass(frozen=True)
class AnalysisConfig:
    epsilon: float = 1e-3
    kappa_criterion: str = "threshold"
    m_conv: list = field(default_factory=lambda: [100, 1000, 50000, 100000, 500000, 1000000])
    kappa_pt_db: list = field(default_factory=lambda: list(range(-30, 21)))
    m_grid: list = field(default_factory=lambda: [50, 100, 200, 300, 400, 600, 800])
    rate_target: float = 3.0
    fs_mhz: list = field(default_factory=lambda: list(range(20, 401, 20)))
    ee_m_conv: int = 128
    fixed_pt_db: float = 10.0
    p_rf: float = 0.0358
    amp_efficiency: float = 1.0
    b_fr: int = 10
    b_onebit: int = 1


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    power: PowerConfig = field(default_factory=PowerConfig)
    mc: MCConfig = field(default_factory=MCConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **blocks) -> "ExperimentConfig":
        """``cfg.with_overrides(mc={"seed": 3})`` replaces single fields."""
        out = self
        for name, changes in blocks.items():
            out = replace(out, **{name: replace(getattr(out, name), **changes)})
        return out


_BLOCKS = {"scenario": ScenarioConfig, "power": PowerConfig, "mc": MCConfig,
           "analysis": AnalysisConfig, "output": OutputConfig}

_CHOICES = {
    ("scenario", "placement_mode"): ("equally-spaced-circle", "random-circle", "explicit"),
    ("mc", "symbols"): ("gaussian", "qpsk"),
    ("mc", "qn_method"): ("covariance", "sampled"),
    ("mc", "transmit_gain"): ("deterministic", "exact"),
    ("analysis", "kappa_criterion"): ("threshold", "root"),
    ("output", "format"): ("csv", "json"),
}

_INTS = {("scenario", "L"), ("scenario", "M"), ("scenario", "K"), ("mc", "trials"),
         ("mc", "symbol_draws"), ("mc", "seed"), ("mc", "batches"), ("analysis", "ee_m_conv"),
         ("analysis", "b_fr"), ("analysis", "b_onebit")}

_NONEMPTY_LISTS = {("power", "pt_db"), ("analysis", "m_conv"), ("analysis", "kappa_pt_db"),
                   ("analysis", "m_grid"), ("analysis", "fs_mhz")}


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _check_field(block, name, value, default):
    where = f"{block}.{name}"
    if (block, name) in _CHOICES:
        if value not in _CHOICES[block, name]:
            raise ConfigError(f"{where}: {value!r} not one of {list(_CHOICES[block, name])}")
        return value
    if (block, name) in _INTS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if (block, name) in _NONEMPTY_LISTS:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{where}: expected a non-empty list of numbers")
        if not all(_is_number(v) for v in value):
            raise ConfigError(f"{where}: every entry must be a number")
        return value
    if (block, name) == ("power", "rho_p"):
        if value != "inverse-noise" and not (_is_number(value) and value >= 0):
            raise ConfigError(f"{where}: expected 'inverse-noise' or a nonnegative number")
        return value
    if name in ("bs_positions", "user_positions", "beta", "path"):
        return value
    if _is_number(default):
        if not _is_number(value):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    return value


def _semantic_checks(cfg: ExperimentConfig):
    sc, mc, an = cfg.scenario, cfg.mc, cfg.analysis
    if sc.L < 1 or sc.K < 1:
        raise ConfigError("scenario: L and K must be positive")
    if sc.M <= sc.K:
        raise ConfigError(f"scenario.M: M={sc.M} must exceed K={sc.K}")
    if sc.beta is None and sc.bs_positions is None and sc.L > 4:
        raise ConfigError("scenario.bs_positions: required when L > 4")
    if sc.bs_positions is not None and len(sc.bs_positions) != sc.L:
        raise ConfigError(f"scenario.bs_positions: expected {sc.L} positions")
    if sc.circle_radius <= 0:
        raise ConfigError("scenario.circle_radius: must be positive")
    if mc.trials < 0 or mc.symbol_draws < 1 or mc.batches < 1:
        raise ConfigError("mc: trials must be >= 0, symbol_draws and batches >= 1")
    if an.epsilon < 0:
        raise ConfigError("analysis.epsilon: must be nonnegative")
    bad = [m for m in an.m_grid if m <= sc.K]
    if bad:
        raise ConfigError(f"analysis.m_grid: entries {bad} do not exceed K={sc.K}")
    bad = [m for m in an.m_conv if m <= sc.K]
    if bad:
        raise ConfigError(f"analysis.m_conv: entries {bad} do not exceed K={sc.K}")
    if any(f < 0 for f in an.fs_mhz):
        raise ConfigError("analysis.fs_mhz: frequencies must be nonnegative")
    if not 0 < an.amp_efficiency <= 1:
        raise ConfigError("analysis.amp_efficiency: must lie in (0, 1]")


def config_from_dict(data: dict | None) -> ExperimentConfig:
    """Validate a (possibly partial) config tree and fill in defaults."""
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    unknown = set(data) - set(_BLOCKS)
    if unknown:
        raise ConfigError(f"unknown config block(s): {sorted(unknown)}")
    blocks = {}
    for name, cls in _BLOCKS.items():
        raw = data.get(name) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"{name}: expected a mapping")
        defaults = cls()
        names = {f.name for f in fields(cls)}
        extra = set(raw) - names
        if extra:
            raise ConfigError(f"{name}: unknown field(s) {sorted(extra)}")
        values = {k: _check_field(name, k, v, getattr(defaults, k)) for k, v in raw.items()}
        blocks[name] = replace(defaults, **values)
    cfg = ExperimentConfig(**blocks)
    _semantic_checks(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None
    return config_from_dict(data)


def _canonical(obj):
    if is_dataclass(obj):
        obj = asdict(obj)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form (output block excluded)."""
    d = cfg.to_dict()
    d.pop("output", None)
    return hashlib.sha256(_canonical(d).encode()).hexdigest()
