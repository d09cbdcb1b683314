from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .linalg import DIM_CAP

SEED_ENV = "QHAMMING_SEED"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


@dataclass(frozen=True)
class RunConfig:
    seed: int = field(default_factory=default_seed)
    dim_cap: int = DIM_CAP
    # named tolerance overrides used by the property suite
    tolerances: dict = field(default_factory=dict)
    corpus_len: int = 2
    corpus_sample: int = 200
    corpus_sample_len: int = 3
    restarts: int = 8
    steps: int = 200

    def __post_init__(self):
        if self.dim_cap < 1:
            raise ValueError("dim_cap must be at least 1")
        if self.restarts < 0 or self.steps < 0:
            raise ValueError("search budget must be nonnegative")

    def with_(self, **kw) -> "RunConfig":
        return replace(self, **kw)

    def tol(self, name: str, default: float, group: str | None = None) -> float:
        if name in self.tolerances:
            return float(self.tolerances[name])
        if group is not None and group in self.tolerances:
            return float(self.tolerances[group])
        return default
