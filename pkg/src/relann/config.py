"""Service configuration with environment overrides.

Every field can be set three ways, later wins: built-in default, environment
variable, explicit CLI flag. A None path means "use the packaged sample";
explicitly given paths must exist at startup.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping

ENV_PREFIX = "RELANN_"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8100
    corpus_dir: Path | None = None
    inventory_path: Path | None = None
    alignment_path: Path | None = None
    store_path: Path = Path("relann-records.jsonl")
    default_seed: int = 0

    def validated(self) -> "ServiceConfig":
        """Fail fast on paths that cannot resolve."""
        for label, path, want_dir in (
            ("corpus_dir", self.corpus_dir, True),
            ("inventory_path", self.inventory_path, False),
            ("alignment_path", self.alignment_path, False),
        ):
            if path is None:
                continue
            if want_dir and not path.is_dir():
                raise ConfigError(f"{label}: directory not found: {path}")
            if not want_dir and not path.is_file():
                raise ConfigError(f"{label}: file not found: {path}")
        parent = self.store_path.resolve().parent
        if not parent.is_dir():
            raise ConfigError(f"store_path: parent directory not found: {parent}")
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port out of range: {self.port}")
        return self


_ENV_FIELDS = {
    "HOST": ("host", str),
    "PORT": ("port", int),
    "CORPUS_DIR": ("corpus_dir", Path),
    "INVENTORY": ("inventory_path", Path),
    "ALIGNMENT": ("alignment_path", Path),
    "STORE": ("store_path", Path),
    "SEED": ("default_seed", int),
}


def config_from_env(
    base: ServiceConfig | None = None,
    env: Mapping[str, str] | None = None,
) -> ServiceConfig:
    """Overlay RELANN_* environment variables on a base config."""
    cfg = base if base is not None else ServiceConfig()
    source = os.environ if env is None else env
    updates = {}
    for suffix, (field_name, cast) in _ENV_FIELDS.items():
        raw = source.get(ENV_PREFIX + suffix)
        if raw is None or raw == "":
            continue
        try:
            updates[field_name] = cast(raw)
        except ValueError as exc:
            raise ConfigError(f"{ENV_PREFIX}{suffix}={raw!r}: {exc}") from exc
    return replace(cfg, **updates)
