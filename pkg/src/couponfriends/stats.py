"""Reductions over trial outcomes: Wilson intervals, summaries, chi-square."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _sps

from .sim import DomainError

Z95 = float(_sps.norm.ppf(0.975))
Z999 = float(_sps.norm.ppf(0.9995))

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def z_for(confidence):
    """Two-sided normal quantile for a confidence level in (0, 1)."""
    if not 0 < confidence < 1:
        raise DomainError("confidence must be in (0, 1)")
    return float(_sps.norm.ppf(0.5 + confidence / 2))


def wilson_interval(successes, trials, z=Z95):
    if trials < 1:
        raise DomainError("wilson_interval needs trials >= 1")
    if not 0 <= successes <= trials:
        raise DomainError("successes must lie in [0, trials]")
    if z <= 0:
        raise DomainError("z must be > 0")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class SuccessSummary:
    trials: int
    successes: int
    z: float = Z95

    def __post_init__(self):
        if not 0 <= self.successes <= self.trials:
            raise DomainError("need 0 <= successes <= trials")

    @property
    def fraction(self):
        return self.successes / self.trials if self.trials else 0.0

    @property
    def wilson(self):
        return wilson_interval(self.successes, self.trials, self.z)

    @property
    def wilson_low(self):
        return self.wilson[0]

    @property
    def wilson_high(self):
        return self.wilson[1]

    def merge(self, other):
        if other.z != self.z:
            raise DomainError("cannot merge summaries computed at different z")
        return SuccessSummary(self.trials + other.trials, self.successes + other.successes, self.z)

    def as_dict(self):
        low, high = self.wilson
        return {
            "trials": self.trials,
            "successes": self.successes,
            "fraction": self.fraction,
            "wilson_low": low,
            "wilson_high": high,
        }


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    std: float
    minimum: float
    maximum: float
    quantiles: dict

    def as_dict(self):
        out = {
            "count": self.count,
            "mean": self.mean,
            "std": self.std,
            "min": self.minimum,
            "max": self.maximum,
        }
        out.update({f"q{int(round(q * 100)):02d}": v for q, v in self.quantiles.items()})
        return out


def nearest_rank(sorted_values, q):
    k = max(1, math.ceil(q * len(sorted_values)))
    return sorted_values[k - 1]


def summarize(values):
    """Count, mean, population standard deviation, extremes and nearest-rank quantiles."""
    xs = sorted(float(v) for v in values)
    if not xs:
        raise DomainError("summarize needs at least one value")
    mean = math.fsum(xs) / len(xs)
    var = math.fsum((x - mean) ** 2 for x in xs) / len(xs)
    return SummaryStats(
        count=len(xs),
        mean=mean,
        std=math.sqrt(var),
        minimum=xs[0],
        maximum=xs[-1],
        quantiles={q: nearest_rank(xs, q) for q in QUANTILES},
    )


@dataclass
class SampleAccumulator:
    """Mergeable multiset of observations; summaries see the merged multiset."""

    values: list = field(default_factory=list)

    def add(self, v):
        self.values.append(v)

    def extend(self, vs):
        self.values.extend(vs)

    def merge(self, other):
        return SampleAccumulator(self.values + other.values)

    def summary(self):
        return summarize(self.values)


def chi_square_uniform(observed):
    """p-value of Pearson's chi-square statistic against equal category counts."""
    obs = np.asarray(observed, dtype=float)
    if obs.ndim != 1 or obs.size < 2:
        raise DomainError("chi_square_uniform needs >= 2 categories")
    if obs.sum() < 1:
        raise DomainError("chi_square_uniform needs a positive total count")
    return float(_sps.chisquare(obs).pvalue)
