"""Perplexity-vs-fit trend statistics: least-squares slope with a one-tailed
t-test, and the exact binomial tail used as the meta-test across corpora and
model families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.special import betainc

Direction = Literal["positive", "negative"]


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr: float
    t_stat: float
    p_one_tailed: float
    n: int
    direction: Direction

    @property
    def degenerate(self) -> bool:
        """True when the residuals vanish so the t statistic is unbounded."""
        return self.stderr == 0.0


def t_sf(t: float, df: int) -> float:
    """P(T >= t) for Student's t with df degrees of freedom, via the
    regularized incomplete beta function."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    half_tail = 0.5 * float(betainc(df / 2.0, 0.5, x))
    return half_tail if t > 0 else 1.0 - half_tail


def slope_test(
    x: Sequence[float], y: Sequence[float], direction: Direction
) -> SlopeFit:
    """Ordinary least squares y ~ x with a one-tailed slope test.

    direction="positive" tests H1: slope > 0 (p is the upper tail of the
    t statistic); "negative" tests H1: slope < 0. With n < 3 the slope is
    still returned but stderr/t/p are NaN (no residual degrees of freedom).
    """
    if direction not in ("positive", "negative"):
        raise ValueError(f"direction must be positive or negative, got {direction!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d sequences of equal length")
    n = x.size
    if n < 2:
        raise ValueError("need at least 2 points for a slope")
    xbar = x.mean()
    ybar = y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx == 0.0:
        raise ValueError("x is constant; slope undefined")
    sxy = float(np.sum((x - xbar) * (y - ybar)))
    slope = sxy / sxx
    intercept = ybar - slope * xbar

    if n < 3:
        return SlopeFit(slope, intercept, math.nan, math.nan, math.nan, n, direction)

    rss = float(np.sum((y - intercept - slope * x) ** 2))
    # an exactly-linear relation leaves only rounding noise; call that zero
    syy = float(np.sum((y - ybar) ** 2))
    if rss <= syy * (64.0 * n * np.finfo(float).eps) ** 2:
        rss = 0.0
    stderr = math.sqrt(rss / (n - 2) / sxx)
    if stderr == 0.0:
        t = math.inf if slope > 0 else (-math.inf if slope < 0 else 0.0)
    else:
        t = slope / stderr
    if direction == "positive":
        p = t_sf(t, n - 2)
    else:
        p = 1.0 - t_sf(t, n - 2)
    return SlopeFit(slope, intercept, stderr, t, p, n, direction)


def binomial_tail(k: int, n: int, p0: float) -> float:
    """P(X >= k) for X ~ Binomial(n, p0), by exact summation."""
    if not 0 <= k <= n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("p0 must be a probability")
    if k == 0:
        return 1.0
    total = 0.0
    for i in range(k, n + 1):
        total += math.comb(n, i) * p0**i * (1.0 - p0) ** (n - i)
    return min(total, 1.0)


_METRIC_DIRECTION: dict[str, Direction] = {"dll": "positive", "mse": "negative"}


def fit_trend(
    variants: Sequence[tuple[float, float]], metric: str = "dll"
) -> SlopeFit:
    """Regress a fit metric on log perplexity across LM variants.

    x is the natural log of corpus perplexity (equivalently mean token
    surprisal in nats; the log base only rescales the slope, never t or p).
    metric "dll" runs the positive-direction test, "mse" the negative.
    """
    if metric not in _METRIC_DIRECTION:
        raise ValueError(f"metric must be one of {sorted(_METRIC_DIRECTION)}")
    if len(variants) < 2:
        raise ValueError("need at least 2 variants to fit a trend")
    ppl = np.asarray([v[0] for v in variants], dtype=float)
    if np.any(ppl <= 0):
        raise ValueError("perplexity must be positive")
    x = np.log(ppl)
    y = [v[1] for v in variants]
    return slope_test(x, y, _METRIC_DIRECTION[metric])
