"""Experiment configuration and its ``key = value`` text form."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from typing import Optional

PROTOCOLS = ("smart", "genie", "norm")
CODING_MODES = ("dof", "rank")


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str = "smart"
    n: int = 1000
    k: int = 100
    p_e: float = 0.1
    p_hat: Optional[float] = None
    beta_star: float = 0.9
    p_nack: float = 0.0
    rho: float = 0.0
    subslot_count: int = 16
    coding_mode: str = "dof"
    reestimate: bool = False
    norm_block_size: int = 250
    norm_aggregation_slots: int = 10
    trials: int = 100
    master_seed: int = 0

    def __post_init__(self):
        if self.p_hat is None:
            object.__setattr__(self, "p_hat", self.p_e)
        self.validate()

    def validate(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError("protocol", f"must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.coding_mode not in CODING_MODES:
            raise ConfigError("coding_mode", f"must be one of {CODING_MODES}, got {self.coding_mode!r}")
        for name in ("n", "k", "subslot_count", "norm_block_size", "trials"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(name, f"must be an integer >= 1, got {v!r}")
        if not isinstance(self.norm_aggregation_slots, int) or self.norm_aggregation_slots < 1:
            raise ConfigError("norm_aggregation_slots", f"must be an integer >= 1, got {self.norm_aggregation_slots!r}")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ConfigError("master_seed", f"must be a nonnegative integer, got {self.master_seed!r}")
        for name in ("p_e", "p_hat"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0):
                raise ConfigError(name, f"must lie in [0, 1), got {v!r}")
        if not (0.0 < self.beta_star < 1.0):
            raise ConfigError("beta_star", f"must lie in (0, 1), got {self.beta_star!r}")
        for name in ("p_nack", "rho"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigError(name, f"must lie in [0, 1], got {v!r}")

    def replace(self, **changes) -> "ScenarioConfig":
        if "p_e" in changes and "p_hat" not in changes and self.p_hat == self.p_e:
            changes["p_hat"] = None
        return dataclasses.replace(self, **changes)

    def to_lines(self) -> list[str]:
        return [f"{f.name}={_fmt(getattr(self, f.name))}" for f in fields(self)]

    @classmethod
    def from_mapping(cls, values: dict) -> "ScenarioConfig":
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError(key, "unknown configuration key")
            kwargs[key] = _parse(key, types[key], raw)
        return cls(**kwargs)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(key, typ, raw):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "Optional[float]":
            return None if raw.lower() in ("", "none") else float(raw)
        if typ == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {typ}") from None
    return raw


def parse_config_text(text: str) -> dict:
    """Read ``key = value`` lines; ``# key=value`` metadata lines count too, anything else is skipped."""
    out = {}
    for line in text.splitlines():
        body = line.strip()
        if body.startswith("#"):
            body = body[1:].strip()
        if "=" not in body or "," in body.split("=", 1)[0]:
            continue
        key, value = body.split("=", 1)
        key = key.strip()
        if key.isidentifier():
            out[key] = value.strip()
    return out


def load_config_file(path) -> dict:
    with open(path) as fh:
        return parse_config_text(fh.read())
