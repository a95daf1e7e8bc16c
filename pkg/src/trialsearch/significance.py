"""Paired significance testing with Bonferroni correction.

The two-sided p-value comes from the regularized incomplete beta
function: for t with df degrees of freedom,
p = I_x(df/2, 1/2) with x = df / (df + t^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

ALPHA = 0.05


class DegenerateVarianceError(Exception):
    """All paired differences are equal and nonzero; t is undefined."""


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: int
    alpha_adjusted: float
    significant: bool


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, int]:
    """Two-sided paired Student t-test; returns (t, p, df).

    Identical samples (every difference zero) give t = 0, p = 1.  Equal
    nonzero differences leave the statistic undefined and raise.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"paired samples differ in length: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError(f"need at least 2 pairs, got {x.size}")
    d = x - y
    df = x.size - 1
    if np.all(d == 0.0):
        return (0.0, 1.0, df)
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise DegenerateVarianceError(
            "all paired differences are identical and nonzero"
        )
    t = float(d.mean()) / (sd / np.sqrt(x.size))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return (float(t), p, df)


def paired_ttest_bonferroni(
    a: Sequence[float], b: Sequence[float], family_size: int
) -> TTestResult:
    """Paired t-test with the comparison-family-adjusted threshold.

    The adjusted level is exactly ALPHA / family_size.
    """
    if family_size < 1:
        raise ValueError(f"family_size must be >= 1, got {family_size}")
    t, p, df = paired_ttest(a, b)
    alpha_adjusted = ALPHA / family_size
    return TTestResult(t, p, df, alpha_adjusted, p < alpha_adjusted)
