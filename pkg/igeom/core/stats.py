"""Summary statistics used by the verifiers and experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class MeanEstimate:
    mean: float
    stderr: float
    count: int

    def within(self, target: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - target) <= sigmas * self.stderr


def mean_stderr(samples: Sequence[float] | np.ndarray) -> MeanEstimate:
    values = np.asarray(samples, dtype=float)
    values = values[np.isfinite(values)]
    n = values.size
    if n == 0:
        return MeanEstimate(math.nan, math.nan, 0)
    if n == 1:
        return MeanEstimate(float(values[0]), math.inf, 1)
    return MeanEstimate(float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(n)), n)


def variance_stderr(samples: np.ndarray) -> tuple[float, float]:
    """Sample variance and its large-sample standard error."""

    values = np.asarray(samples, dtype=float)
    n = values.size
    if n < 4:
        return math.nan, math.nan
    var = float(np.var(values, ddof=1))
    centred = values - values.mean()
    m4 = float(np.mean(centred**4))
    return var, math.sqrt(max(m4 - var * var, 0.0) / n)


def normality_pvalue(samples: np.ndarray) -> float:
    """D'Agostino-Pearson p-value; NaN below 20 samples."""

    values = np.asarray(samples, dtype=float)
    if values.size < 20:
        return math.nan
    return float(stats.normaltest(values).pvalue)


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """KS statistic and its critical value at the 1% level."""

    result = stats.ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    n, m = len(a), len(b)
    critical = 1.628 * math.sqrt((n + m) / (n * m))
    return float(result.statistic), critical


def correlation_stderr(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Pearson correlation and ``1 / sqrt(n)`` as its standard error under independence."""

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        return math.nan, math.nan
    return float(stats.pearsonr(x, y)[0]), 1.0 / math.sqrt(x.size)


def pooled_difference(p1: float, n1: int, p2: float, n2: int) -> tuple[float, float]:
    """Difference of two proportions and its pooled standard error."""

    if n1 == 0 or n2 == 0:
        return math.nan, math.nan
    pooled = (p1 * n1 + p2 * n2) / (n1 + n2)
    se = math.sqrt(max(pooled * (1 - pooled), 0.0) * (1 / n1 + 1 / n2))
    return p1 - p2, se


def is_strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))
