"""Statistical checks: Hill estimator, tail-ratio curves, the asymptotic
independence diagnostic and a blocks estimator of the extremal index."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .parallel import fsum_columns, run_chunks

__all__ = [
    "score_interval",
    "hill",
    "TailRatioCurve",
    "tail_ratio_curve",
    "quantile_thresholds",
    "H2Report",
    "h2_diagnostic",
    "extremal_index_blocks",
]

Z95 = 1.959963984540054


def score_interval(k: int, n: int, z: float = Z95):
    """Wilson score interval ``(lo, hi)`` for a binomial proportion ``k / n``."""
    if n <= 0:
        return 0.0, 1.0
    p = k / n
    z2 = z * z
    denom = 1 + z2 / n
    centre = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def hill(samples, k: int) -> float:
    """Hill estimate of the tail index from the ``k`` largest observations."""
    x = np.sort(np.asarray(samples, dtype=float))[::-1]
    n = len(x)
    if not 2 <= k < n:
        raise ValueError(f"need 2 <= k < n, got k={k}, n={n}")
    if x[k] <= 0:
        raise ValueError("Hill estimator needs positive order statistics")
    denom = math.fsum(np.log(x[:k] / x[k]))
    if denom <= 0:
        raise ValueError("tied top order statistics: Hill denominator is zero")
    return k / denom


# ------------------------------------------------------------ tail ratios


@dataclass
class TailRatioCurve:
    thresholds: np.ndarray
    ratios: np.ndarray
    ci: np.ndarray
    reference_constant: float
    counts: Optional[np.ndarray] = None
    n_samples: int = 0

    def __post_init__(self):
        if not (len(self.thresholds) == len(self.ratios) == len(self.ci)):
            raise ValueError("curve arrays must be aligned")

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(self.ratios - self.reference_constant)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "ratio", "ci", "reference"])
        for x, r, c in zip(self.thresholds, self.ratios, self.ci):
            w.writerow([repr(float(x)), repr(float(r)), repr(float(c)), repr(float(self.reference_constant))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def quantile_thresholds(dist, levels) -> np.ndarray:
    """Exact marginal quantiles ``x`` with ``P(X > x) = 1 - level``."""
    return np.asarray(dist.isf(1.0 - np.asarray(levels, dtype=float)), dtype=float)


def tail_ratio_curve(sampler: Callable[[int, np.random.Generator], np.ndarray], reference, thresholds,
                     n_samples: int, rng: np.random.Generator, reference_constant: float = float("nan"),
                     workers: int = 1) -> TailRatioCurve:
    """``P(Z > x) / reference.survival(x)`` on a threshold grid.

    ``sampler(n, rng)`` returns ``n`` draws of the numerator variable ``Z``.
    CI half-widths come from the Wilson score interval.
    """
    xs = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(xs) < 0):
        raise ValueError("thresholds must be ascending")

    def chunk(n, g):
        z = np.asarray(sampler(n, g), dtype=float)
        return (z[:, None] > xs[None, :]).sum(axis=0)

    counts = fsum_columns(run_chunks(chunk, n_samples, rng, workers)).astype(np.int64)
    ref = np.asarray(reference.survival(xs), dtype=float)
    ratios = counts / n_samples / ref
    half = np.array([(lambda lo, hi: (hi - lo) / 2)(*score_interval(int(k), n_samples)) for k in counts]) / ref
    return TailRatioCurve(xs, ratios, half, float(reference_constant), counts, n_samples)


# ---------------------------------------------------- asymptotic independence


@dataclass
class H2Report:
    thresholds: np.ndarray
    ratios: np.ndarray
    worst_pairs: list
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.ratios[-1] < self.bound)

    @property
    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.ratios) <= 0))


def h2_diagnostic(generator: Callable[[int, np.random.Generator], np.ndarray], pairs: Sequence, n_samples: int,
                  rng: np.random.Generator, thresholds=None, levels=None, bound: float = 0.05) -> H2Report:
    """``max_{(i, j)} P(X_i > x, X_j > x) / P(X_1 > x)`` per threshold.

    ``generator(n, rng)`` returns ``n`` rows of a sequence, one column per
    index. Thresholds are raw values or, via ``levels``, empirical quantiles
    of the pooled marginal sample. Indices in ``pairs`` are 0-based.
    """
    pairs = [tuple(p) for p in pairs]
    if not pairs or any(i == j for i, j in pairs):
        raise ValueError("pairs must be non-empty with i != j")
    if (thresholds is None) == (levels is None):
        raise ValueError("give exactly one of thresholds and levels")
    x = np.asarray(generator(n_samples, rng), dtype=float)
    if levels is not None:
        xs = np.quantile(x.ravel(), np.asarray(levels, dtype=float))
    else:
        xs = np.asarray(thresholds, dtype=float)
    ratios, worst = [], []
    for u in xs:
        above = x > u
        base = above[:, 0].sum()
        vals = [np.sum(above[:, i] & above[:, j]) / base if base else math.nan for i, j in pairs]
        k = int(np.nanargmax(vals)) if not np.all(np.isnan(vals)) else 0
        ratios.append(vals[k])
        worst.append(pairs[k])
    return H2Report(xs, np.asarray(ratios), worst, bound)


# ---------------------------------------------------------- extremal index


def extremal_index_blocks(series, block_size: int, threshold: Optional[float] = None,
                          level: Optional[float] = None) -> float:
    """Blocks estimator ``log(1 - K/k) / (b log(1 - N_u/n))``.

    ``K`` counts blocks of length ``b`` with an exceedance, ``k`` the number
    of complete blocks and ``N_u`` the exceedances among the ``n = k b``
    observations used.
    """
    y = np.asarray(series, dtype=float)
    if (threshold is None) == (level is None):
        raise ValueError("give exactly one of threshold and level")
    b = int(block_size)
    k = len(y) // b
    if k < 2:
        raise ValueError("need at least two complete blocks")
    y = y[: k * b]
    u = float(np.quantile(y, level)) if level is not None else float(threshold)
    above = y > u
    n_u = int(above.sum())
    n_blocks = int(above.reshape(k, b).any(axis=1).sum())
    if n_u == 0:
        raise ValueError("no exceedances of the threshold")
    if n_blocks == k:
        raise ValueError("every block exceeds the threshold; raise it")
    return math.log1p(-n_blocks / k) / (b * math.log1p(-n_u / (k * b)))
