"""Small statistical helpers: intervals, resampling, straight-line fits."""

from __future__ import annotations

import numpy as np


def wilson_interval(successes: int, trials: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion.

    Returns (lo, hi); degenerate inputs (0 trials) give the vacuous (0, 1).
    The all-success and no-success endpoints are pinned to exactly 1 and 0,
    where rounding in the score formula would otherwise leave a stray ulp.
    """
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = (z / denom) * np.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials))
    lo = 0.0 if successes == 0 else float(max(0.0, center - half))
    hi = 1.0 if successes == trials else float(min(1.0, center + half))
    return lo, hi


def multinomial_resamples(counts: np.ndarray, reps: int, seed: int) -> np.ndarray:
    """Resample a count vector as ``reps`` independent multinomials.

    Models redrawing the recorded walkers with replacement; rows sum to the
    original total.
    """
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    gen = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
    if total == 0:
        return np.zeros((reps, counts.size), dtype=np.int64)
    pvals = counts / total
    return gen.multinomial(total, pvals, size=reps)


def percentile_interval(samples: np.ndarray, level: float = 0.95):
    """Central percentile interval of a bootstrap sample."""
    samples = np.asarray(samples, dtype=float)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(samples, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def line_fit(xs, ys):
    """Least-squares line ``y = slope * x + intercept`` with its r squared.

    With fewer than two points, or zero variance in y, r2 is defined as 0.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2:
        return 0.0, float(ys[0]) if ys.size else 0.0, 0.0
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
