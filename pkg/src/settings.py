#!/usr/bin/env python3

import os
from dataclasses import dataclass
from functools import lru_cache

from errors import ConfigError


@dataclass(frozen=True)
class Settings:
    threads: int
    log_dir: str
    bit_bound: int

    def workers_for(self, item_count: int) -> int:
        return max(1, min(item_count, self.threads))


def _positive_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e
    if value < 1:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read settings from the environment once per process"""
    return Settings(
        threads=_positive_int("TROPDYN_THREADS", os.cpu_count() or 1),
        log_dir=os.environ.get("TROPDYN_LOG_DIR") or "logs",
        bit_bound=_positive_int("TROPDYN_BIT_BOUND", 4096),
    )
