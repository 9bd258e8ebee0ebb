"""Scenario configuration: flat ``section.key = value`` text files plus
command-line overrides, validated into the typed parameter objects."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .mortality import MortalityModel, resolve_model
from .simulate import SimConfig
from .valuation import MarketParams, PolicySpec, Preference

__all__ = ["ScenarioConfig", "parse_config_file", "parse_override"]

_DEFAULTS: dict[str, object] = {
    "policy.chi": 35.0,
    "policy.t0": 0.0,
    "policy.T": 30.0,
    "policy.h": 1.0 / 9.0,
    "policy.A": 350000.0,
    "policy.P": None,
    "policy.x0": None,
    "market.r": 0.07,
    "market.mu": 0.08,
    "market.sigma": 0.12,
    "preference.gamma": 1.4,
    "mortality.subjective": "ON-female-1970",
    "mortality.objective": "ON-female-1970",
    "sim.paths": 100000,
    "sim.dt": 1.0 / 252.0,
    "sim.horizon": 60.0,
    "sim.seed": 20070401,
    "sim.antithetic": False,
}

_STRING_KEYS = {"mortality.subjective", "mortality.objective"}
_INT_KEYS = {"sim.paths", "sim.seed"}
_BOOL_KEYS = {"sim.antithetic"}


def _parse_number(text: str) -> float:
    """Parse a float, allowing simple fractions such as ``1/9``."""
    if "/" in text:
        num, _, den = text.partition("/")
        return float(num) / float(den)
    return float(text)


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in _STRING_KEYS:
        return raw
    if raw.lower() in ("none", ""):
        return None
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "yes", "1"):
            return True
        if raw.lower() in ("false", "no", "0"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        value = _parse_number(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}")
    return int(value) if key in _INT_KEYS else value


def parse_override(text: str) -> tuple[str, str]:
    """Split a ``section.key=value`` override argument."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, _, value = text.partition("=")
    return key.strip(), value.strip()


def parse_config_file(path) -> dict[str, str]:
    """Read a flat config file into raw key/value strings."""
    path = Path(path)
    out: dict[str, str] = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}: line {lineno}: expected 'section.key = value'")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out


@dataclass
class ScenarioConfig:
    """Validated scenario: policy, market, preference, models, sim."""

    policy: PolicySpec
    market: MarketParams
    preference: Preference
    subjective: MortalityModel
    objective: MortalityModel
    sim: SimConfig
    x0: float | None

    @classmethod
    def load(cls, config_path=None, overrides=(), seed=None) -> "ScenarioConfig":
        values = dict(_DEFAULTS)
        raw: dict[str, str] = {}
        if config_path is not None:
            raw.update(parse_config_file(config_path))
        for item in overrides:
            key, value = parse_override(item)
            raw[key] = value
        for key, value in raw.items():
            if key not in _DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = _coerce(key, value)
        if seed is not None:
            values["sim.seed"] = int(seed)
        # A premium override displaces the default fund.
        if values["policy.P"] is not None and "policy.A" not in raw:
            values["policy.A"] = None
        policy = PolicySpec(
            chi=values["policy.chi"],
            T=values["policy.T"],
            h=values["policy.h"],
            premium=values["policy.P"],
            fund=values["policy.A"],
            t0=values["policy.t0"],
        )
        market = MarketParams(
            r=values["market.r"], mu=values["market.mu"], sigma=values["market.sigma"]
        )
        preference = Preference(gamma=values["preference.gamma"])
        sim = SimConfig(
            paths=values["sim.paths"],
            dt=values["sim.dt"],
            horizon=values["sim.horizon"],
            seed=values["sim.seed"],
            antithetic=values["sim.antithetic"],
        )
        return cls(
            policy=policy,
            market=market,
            preference=preference,
            subjective=resolve_model(values["mortality.subjective"]),
            objective=resolve_model(values["mortality.objective"]),
            sim=sim,
            x0=values["policy.x0"],
        )
