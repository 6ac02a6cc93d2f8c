"""Run configuration shared by the CLI commands and the pipeline."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .errors import ConfigError

DEFAULT_TIMEOUT_SECS = 30.0


@dataclass
class RunConfig:
    corpus_path: str = ""
    classifier_spec: str = ""
    n: int = 1
    prototypes: int = 80
    population: int = 400
    sigma: float = 1.0
    balance: float = 0.5  # lambda: closeness vs diversity in instance selection
    ridge: float = 1e-3
    threshold: float = 0.1
    instances: int = 5
    seed: int = 0
    format: str = "json"
    method: str = "xprob"
    jobs: int = 1
    corpus_sizes: list[int] = field(default_factory=list)
    max_rounds: int = 32
    timeout_secs: float = DEFAULT_TIMEOUT_SECS

    def validate(self) -> "RunConfig":
        checks = [
            (self.n >= 1, f"n must be >= 1, got {self.n}"),
            (self.prototypes >= 1, f"prototypes must be >= 1, got {self.prototypes}"),
            (
                self.population >= self.prototypes,
                f"population ({self.population}) must be >= prototypes ({self.prototypes})",
            ),
            (self.sigma > 0, f"sigma must be positive, got {self.sigma}"),
            (0.0 <= self.balance <= 1.0, f"lambda must be in [0, 1], got {self.balance}"),
            (self.ridge >= 0, f"ridge must be >= 0, got {self.ridge}"),
            (self.threshold >= 0, f"threshold must be >= 0, got {self.threshold}"),
            (self.instances >= 1, f"instances must be >= 1, got {self.instances}"),
            (self.jobs >= 1, f"jobs must be >= 1, got {self.jobs}"),
            (self.max_rounds >= 1, f"max-rounds must be >= 1, got {self.max_rounds}"),
            (self.timeout_secs > 0, f"timeout must be positive, got {self.timeout_secs}"),
            (self.format in ("json", "html", "text"), f"unknown format {self.format!r}"),
            (self.method in ("xprob", "drop"), f"unknown method {self.method!r}"),
            (
                all(s >= 1 for s in self.corpus_sizes),
                f"corpus sizes must be positive, got {self.corpus_sizes}",
            ),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self


def timeout_from_env(default: float = DEFAULT_TIMEOUT_SECS) -> float:
    """Subprocess timeout, overridable via XPROB_TIMEOUT_SECS."""
    raw = os.environ.get("XPROB_TIMEOUT_SECS")
    if raw is None:
        return default
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"XPROB_TIMEOUT_SECS must be a number, got {raw!r}") from exc
    if value <= 0:
        raise ConfigError(f"XPROB_TIMEOUT_SECS must be positive, got {value}")
    return value
