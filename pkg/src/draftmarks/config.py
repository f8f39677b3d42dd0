"""Engine configuration: analysis thresholds, profiles, service settings."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

ENV_STORE = "DRAFTMARKS_STORE"
ENV_LISTEN = "DRAFTMARKS_LISTEN"
ENV_CONFIG = "DRAFTMARKS_CONFIG"

_THRESHOLD_FIELDS = {
    "tonal_shift_overlap": float,
    "min_prompt_run": int,
    "feedback_integration": float,
    "chain_overlap": float,
    "deletion_threshold": int,
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class EngineConfig:
    tonal_shift_overlap: float = 0.6
    min_prompt_run: int = 3
    feedback_integration: float = 0.15
    chain_overlap: float = 0.5
    deletion_threshold: int = 10
    listen: str = "127.0.0.1:8040"
    profile_overrides: Mapping[str, Any] | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "thresholds": {name: getattr(self, name) for name in _THRESHOLD_FIELDS},
            "profiles": self.profile_overrides or {},
            "listen": self.listen,
        }

    def fingerprint(self) -> str:
        """Stable hash of everything that can change an exported schema."""
        payload = self.to_dict()
        del payload["listen"]  # serving address never alters analysis output
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, raw: Mapping) -> "EngineConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError("config root must be an object")
        kwargs: dict[str, Any] = {}
        thresholds = raw.get("thresholds", {})
        if not isinstance(thresholds, Mapping):
            raise ConfigError("'thresholds' must be an object")
        for name, value in thresholds.items():
            caster = _THRESHOLD_FIELDS.get(name)
            if caster is None:
                raise ConfigError(f"unknown threshold '{name}'")
            try:
                kwargs[name] = caster(value)
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for threshold '{name}'") from None
        if "profiles" in raw:
            if not isinstance(raw["profiles"], Mapping):
                raise ConfigError("'profiles' must be an object")
            kwargs["profile_overrides"] = dict(raw["profiles"])
        if "listen" in raw:
            if not isinstance(raw["listen"], str):
                raise ConfigError("'listen' must be a host:port string")
            kwargs["listen"] = raw["listen"]
        config = cls(**kwargs)
        if config.deletion_threshold < 1:
            raise ConfigError("deletion_threshold must be positive")
        if config.min_prompt_run < 1:
            raise ConfigError("min_prompt_run must be positive")
        for name in ("tonal_shift_overlap", "feedback_integration", "chain_overlap"):
            if not 0.0 <= getattr(config, name) <= 1.0:
                raise ConfigError(f"{name} must be within [0, 1]")
        return config

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        try:
            raw = json.loads(Path(path).read_text("utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "EngineConfig":
        env = os.environ if env is None else env
        path = env.get(ENV_CONFIG)
        config = cls.from_file(path) if path else cls()
        listen = env.get(ENV_LISTEN)
        if listen:
            config = cls.from_dict({**config.to_dict(), "listen": listen})
        return config
