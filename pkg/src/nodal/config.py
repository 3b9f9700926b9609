"""Run configuration; every field can be overridden by a NODAL_* environment variable."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

ENV_PREFIX = "NODAL_"


def default_cache_path() -> str:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(Path.home(), ".cache")
    return os.path.join(base, "nodal", "fits.json")


@dataclass(frozen=True)
class Config:
    max_delta: int = 4
    sample_count: int = 3
    rng_seed: int = 1848
    cache_path: str = ""  # empty: no on-disk cache
    thread_count: int = 0  # 0: one worker per CPU

    def __post_init__(self):
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if self.max_delta < 0:
            raise ValueError("max_delta must be non-negative")
        if self.thread_count < 0:
            raise ValueError("thread_count must be non-negative")

    @property
    def workers(self) -> int:
        return self.thread_count or (os.cpu_count() or 1)

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None, **overrides) -> Config:
        """Defaults, then NODAL_* variables, then explicit keyword overrides (None is ignored)."""
        environ = os.environ if environ is None else environ
        values = {"cache_path": default_cache_path()}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            try:
                values[f.name] = int(raw) if f.type in ("int", int) else raw
            except ValueError as exc:
                raise ValueError(f"{ENV_PREFIX}{f.name.upper()}={raw!r} is not an integer") from exc
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_(self, **changes) -> Config:
        return replace(self, **changes)
