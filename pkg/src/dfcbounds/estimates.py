"""Small records for numeric estimates and binomial confidence intervals."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta


@dataclass(frozen=True)
class Estimate:
    """A computed quantity with the method that produced it.

    ``ci`` is a two-sided interval for Monte Carlo values and None otherwise.
    """

    value: float
    method: str
    ci: tuple[float, float] | None = None
    samples: int | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        out = {"value": self.value, "method": self.method}
        if self.ci is not None:
            out["ci"] = list(self.ci)
        if self.samples is not None:
            out["samples"] = self.samples
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def clopper_pearson(k: int, n: int, level: float = 0.99) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval for k successes in n trials."""
    if n <= 0 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n and n > 0, got k={k}, n={n}")
    alpha = 1.0 - level
    lo = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def spawn_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator keyed by (seed, *keys); independent of call order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]))
