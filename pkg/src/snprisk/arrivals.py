"""Counting processes: Poisson (homogeneous or not), renewal, and count laws.

Poisson arrivals are generated with the order-statistics property: draw
``N ~ Poisson(m(T))`` and place ``N`` i.i.d. points with density
``lambda(t) / m(T)`` on ``[0, T]`` by inverting ``m``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy import integrate, stats

__all__ = [
    "CountingProcessSpec",
    "HomogeneousPoisson",
    "InhomogeneousPoisson",
    "LinearIntensity",
    "PiecewiseConstantIntensity",
    "Renewal",
    "ScipyLaw",
    "ExponentialLaw",
    "CountLaw",
    "FixedCount",
    "PoissonCount",
    "DiscreteCount",
    "ArrivalSequence",
    "ArrivalBatch",
    "sample_arrivals",
    "sample_arrival_batch",
    "cumulative_intensity",
    "sample_v0",
    "count_moment_check",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class CountingProcessSpec:
    """Base class for arrival processes on ``[0, inf)``."""

    is_poisson = False

    def count_law(self, T: float) -> "CountLaw":
        raise ValueError(f"{type(self).__name__} has no closed-form count law")


class _PoissonBase(CountingProcessSpec):
    is_poisson = True

    def intensity(self, t):
        raise NotImplementedError

    def cumulative(self, t):
        raise NotImplementedError

    def inverse_cumulative(self, y, T: float):
        """Times ``t`` in ``[0, T]`` with ``m(t) = y``."""
        raise NotImplementedError

    def count_law(self, T: float) -> "PoissonCount":
        return PoissonCount(float(self.cumulative(T)))

    def breakpoints(self, T: float) -> list:
        return []


@dataclass(frozen=True)
class HomogeneousPoisson(_PoissonBase):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    def intensity(self, t):
        return np.full(np.shape(t), float(self.rate)) if np.ndim(t) else float(self.rate)

    def cumulative(self, t):
        return self.rate * np.asarray(t, dtype=float) if np.ndim(t) else self.rate * float(t)

    def inverse_cumulative(self, y, T: float):
        return np.asarray(y, dtype=float) / self.rate


@dataclass(frozen=True)
class InhomogeneousPoisson(_PoissonBase):
    """Poisson process with intensity ``lambda(t)``.

    If ``cumulative_fn`` is omitted, ``m`` is obtained by quadrature. Both
    callables must be vectorised over numpy arrays.
    """

    intensity_fn: Callable
    cumulative_fn: Optional[Callable] = None

    def intensity(self, t):
        return self.intensity_fn(t)

    def cumulative(self, t):
        if self.cumulative_fn is not None:
            return self.cumulative_fn(t)
        if np.ndim(t):
            return self._cumulative_gl(np.asarray(t, dtype=float))
        val, _ = integrate.quad(self.intensity_fn, 0.0, float(t), epsabs=0.0, epsrel=1e-10, limit=200)
        return val

    def _cumulative_gl(self, t: np.ndarray, panels: int = 64) -> np.ndarray:
        # composite 16-point Gauss-Legendre on [0, t]; vectorised in t
        t = np.atleast_1d(t)
        edges = t[:, None] * np.linspace(0.0, 1.0, panels + 1)[None, :]
        a, b = edges[:, :-1], edges[:, 1:]
        mid, half = (a + b) / 2, (b - a) / 2
        nodes = mid[..., None] + half[..., None] * _GL_NODES
        vals = self.intensity_fn(nodes)
        return np.sum(half * np.sum(vals * _GL_WEIGHTS, axis=-1), axis=-1)

    def check_nonnegative(self, T: float, n: int = 1001) -> None:
        grid = np.linspace(0.0, T, n)
        if np.any(np.asarray(self.intensity_fn(grid)) < 0):
            raise ValueError("negative intensity")

    def _table(self, T: float, panels: int = 4096):
        knots = np.linspace(0.0, T, panels + 1)
        a, b = knots[:-1], knots[1:]
        mid, half = (a + b) / 2, (b - a) / 2
        vals = self.intensity_fn(mid[:, None] + half[:, None] * _GL_NODES)
        pieces = half * np.sum(vals * _GL_WEIGHTS, axis=-1)
        return knots, np.concatenate([[0.0], np.cumsum(pieces)])

    def _partial(self, a: np.ndarray, t: np.ndarray) -> np.ndarray:
        mid, half = (a + t) / 2, (t - a) / 2
        vals = self.intensity_fn(mid[:, None] + half[:, None] * _GL_NODES)
        return half * np.sum(vals * _GL_WEIGHTS, axis=-1)

    def inverse_cumulative(self, y, T: float):
        y = np.asarray(y, dtype=float)
        if y.size == 0:
            return y.copy()
        if self.cumulative_fn is not None:
            return self._invert(y, T, lambda t: np.asarray(self.cumulative_fn(t), dtype=float), 0.0, float(T))
        flat = y.ravel()
        knots, cum = self._table(float(T))
        idx = np.clip(np.searchsorted(cum, flat, side="right") - 1, 0, len(knots) - 2)
        base, left, right = cum[idx], knots[idx], knots[idx + 1]
        out = self._invert(flat, T, lambda t: base + self._partial(left, t), left, right)
        return out.reshape(y.shape)

    def _invert(self, y, T, m, lo, hi):
        # safeguarded Newton inside a bracket, bisection fallback
        lo = np.broadcast_to(np.asarray(lo, dtype=float), y.shape).copy()
        hi = np.broadcast_to(np.asarray(hi, dtype=float), y.shape).copy()
        t = 0.5 * (lo + hi)
        for _ in range(200):
            f = m(t) - y
            lo = np.where(f <= 0, t, lo)
            hi = np.where(f > 0, t, hi)
            lam = np.asarray(self.intensity_fn(t), dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = t - f / lam
            bad = ~np.isfinite(step) | (step < lo) | (step > hi)
            new = np.where(bad, 0.5 * (lo + hi), step)
            moved = np.abs(new - t)
            t = new
            if np.all((moved <= 1e-12) | (hi - lo <= 1e-12)):
                break
        return t


@dataclass(frozen=True)
class LinearIntensity(_PoissonBase):
    """``lambda(t) = a + b t`` (requires ``a >= 0`` and ``b >= 0``)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("negative intensity")
        if self.a == 0 and self.b == 0:
            raise ValueError("intensity is identically zero")

    def intensity(self, t):
        return self.a + self.b * np.asarray(t, dtype=float) if np.ndim(t) else self.a + self.b * float(t)

    def cumulative(self, t):
        t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
        return self.a * t + 0.5 * self.b * t * t

    def inverse_cumulative(self, y, T: float):
        y = np.asarray(y, dtype=float)
        if self.b == 0:
            return y / self.a
        # stable root of b/2 t^2 + a t - y = 0
        return 2 * y / (self.a + np.sqrt(self.a * self.a + 2 * self.b * y))


@dataclass(frozen=True)
class PiecewiseConstantIntensity(_PoissonBase):
    """Rate ``rates[i]`` on ``[breaks[i], breaks[i+1])``; last rate extends to infinity.

    ``breaks[0]`` must be 0.
    """

    breaks: tuple
    rates: tuple

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        r = np.asarray(self.rates, dtype=float)
        if len(b) != len(r) or len(b) == 0 or b[0] != 0 or np.any(np.diff(b) <= 0):
            raise ValueError("breaks must start at 0, increase, and match rates")
        if np.any(r < 0):
            raise ValueError("negative intensity")
        object.__setattr__(self, "breaks", tuple(b))
        object.__setattr__(self, "rates", tuple(r))

    @cached_property
    def _knots(self):
        b = np.asarray(self.breaks)
        r = np.asarray(self.rates)
        cum = np.concatenate([[0.0], np.cumsum(r[:-1] * np.diff(b))])
        return b, r, cum

    def intensity(self, t):
        b, r, _ = self._knots
        idx = np.searchsorted(b, np.asarray(t, dtype=float), side="right") - 1
        out = r[np.clip(idx, 0, len(r) - 1)]
        return out if np.ndim(t) else float(out)

    def cumulative(self, t):
        b, r, cum = self._knots
        tt = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(b, tt, side="right") - 1, 0, len(r) - 1)
        out = cum[idx] + r[idx] * (tt - b[idx])
        return out if np.ndim(t) else float(out)

    def inverse_cumulative(self, y, T: float):
        b, r, cum = self._knots
        y = np.asarray(y, dtype=float)
        # zero-rate pieces never hold a point; use the last knot at or below y
        idx = np.clip(np.searchsorted(cum, y, side="right") - 1, 0, len(r) - 1)
        while True:
            zero = (r[idx] == 0) & (idx > 0)
            if not np.any(zero):
                break
            idx = np.where(zero, idx - 1, idx)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = b[idx] + np.where(r[idx] > 0, (y - cum[idx]) / r[idx], 0.0)
        return out

    def breakpoints(self, T: float) -> list:
        return [x for x in self.breaks if 0 < x < T]


class ScipyLaw:
    """Adapter for a frozen ``scipy.stats`` distribution on ``(0, inf)``."""

    def __init__(self, frozen):
        self.frozen = frozen

    def sample(self, rng: np.random.Generator, size=None):
        return self.frozen.rvs(size=size, random_state=rng)

    @property
    def mean(self) -> float:
        return float(self.frozen.mean())

    def laplace(self, s: float) -> float:
        """``E[exp(-s * D)]``."""
        return float(self.frozen.expect(lambda d: np.exp(-s * d)))

    def __repr__(self):
        dist = self.frozen.dist.name
        return f"ScipyLaw({dist}, args={self.frozen.args}, kwds={self.frozen.kwds})"


@dataclass(frozen=True)
class ExponentialLaw:
    rate: float

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(1.0 / self.rate, size)

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    def laplace(self, s: float) -> float:
        return self.rate / (self.rate + s)


@dataclass(frozen=True)
class Renewal(CountingProcessSpec):
    """Renewal process; ``interarrival`` needs ``sample(rng, size)`` and ``mean``."""

    interarrival: object

    def __post_init__(self):
        if not getattr(self.interarrival, "mean", 1.0) > 0:
            raise ValueError("inter-arrival law must have a positive mean")


# ---------------------------------------------------------------- count laws


class CountLaw:
    """Law of a random length ``N`` on the non-negative integers."""

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def pmf(self, n):
        raise NotImplementedError

    def prob_at_least(self, j):
        """``P(N >= j)``."""
        raise NotImplementedError


@dataclass(frozen=True)
class FixedCount(CountLaw):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")

    def sample(self, rng, size=None):
        return self.n if size is None else np.full(size, self.n, dtype=np.int64)

    def mean(self) -> float:
        return float(self.n)

    def pmf(self, n):
        return np.where(np.asarray(n) == self.n, 1.0, 0.0)

    def prob_at_least(self, j):
        return np.where(np.asarray(j) <= self.n, 1.0, 0.0)


@dataclass(frozen=True)
class PoissonCount(CountLaw):
    """Poisson law with the given mean, optionally conditioned on ``N >= min_count``."""

    mean_count: float
    min_count: int = 0

    def __post_init__(self):
        if self.mean_count < 0:
            raise ValueError("mean must be non-negative")
        if self.min_count > 0 and self.mean_count == 0:
            raise ValueError("cannot condition a zero-mean Poisson law on N >= 1")

    @property
    def _norm(self) -> float:
        return float(stats.poisson.sf(self.min_count - 1, self.mean_count)) if self.min_count > 0 else 1.0

    def sample(self, rng, size=None):
        if self.min_count == 0:
            return rng.poisson(self.mean_count, size)
        # inverse transform on the truncated law
        u = rng.random(size)
        lo_cdf = stats.poisson.cdf(self.min_count - 1, self.mean_count)
        out = stats.poisson.ppf(lo_cdf + u * (1 - lo_cdf), self.mean_count)
        out = np.maximum(out, self.min_count).astype(np.int64)
        return out if size is not None else int(out)

    def mean(self) -> float:
        if self.min_count == 0:
            return float(self.mean_count)
        k = np.arange(self.min_count)
        head = float(np.sum(k * stats.poisson.pmf(k, self.mean_count)))
        return (self.mean_count - head) / self._norm

    def pmf(self, n):
        n = np.asarray(n)
        p = stats.poisson.pmf(n, self.mean_count) / self._norm
        return np.where(n >= self.min_count, p, 0.0)

    def prob_at_least(self, j):
        j = np.asarray(j)
        tail = stats.poisson.sf(j - 1, self.mean_count) / self._norm
        return np.where(j <= self.min_count, 1.0, tail)


@dataclass(frozen=True)
class DiscreteCount(CountLaw):
    """Arbitrary law given by ``pmf[n] = P(N = n)`` for ``n = 0, 1, ...``."""

    probabilities: tuple

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "probabilities", tuple(p))

    def sample(self, rng, size=None):
        p = np.asarray(self.probabilities)
        return rng.choice(len(p), size=size, p=p / p.sum())

    def mean(self) -> float:
        p = np.asarray(self.probabilities)
        return float(np.dot(np.arange(len(p)), p))

    def pmf(self, n):
        p = np.asarray(self.probabilities)
        n = np.asarray(n)
        return np.where((n >= 0) & (n < len(p)), p[np.clip(n, 0, len(p) - 1)], 0.0)

    def prob_at_least(self, j):
        p = np.asarray(self.probabilities)
        tail = np.concatenate([np.cumsum(p[::-1])[::-1], [0.0]])
        j = np.asarray(j)
        return tail[np.clip(j, 0, len(p))]


# ----------------------------------------------------------- arrival samples


@dataclass(frozen=True)
class ArrivalSequence:
    times: np.ndarray
    horizon: float

    @property
    def count(self) -> int:
        return int(len(self.times))

    def __len__(self):
        return self.count


@dataclass
class ArrivalBatch:
    """Arrival times of many independent paths, padded with ``+inf``.

    ``times`` has shape ``(n_paths, max_count)``; row ``p`` holds
    ``counts[p]`` sorted times followed by padding.
    """

    times: np.ndarray
    counts: np.ndarray
    horizon: Optional[float]

    @property
    def mask(self) -> np.ndarray:
        return np.arange(self.times.shape[1])[None, :] < self.counts[:, None]

    def __len__(self):
        return len(self.counts)

    def row(self, p: int) -> ArrivalSequence:
        return ArrivalSequence(self.times[p, : self.counts[p]].copy(), self.horizon)


def _break_ties(times: np.ndarray) -> np.ndarray:
    # float ties are probability-zero events; nudge each repeat up by one ulp
    for k in range(1, times.shape[1]):
        prev = times[:, k - 1]
        col = times[:, k]
        clash = np.isfinite(col) & (col <= prev)
        if np.any(clash):
            times[clash, k] = np.nextafter(prev[clash], np.inf)
    return times


def _check_process(spec: CountingProcessSpec, T: float) -> None:
    if not T > 0:
        raise ValueError("horizon T must be positive")
    if isinstance(spec, InhomogeneousPoisson):
        spec.check_nonnegative(T)


def sample_arrival_batch(spec, T: float, n_paths: int, rng: np.random.Generator) -> ArrivalBatch:
    """Arrival times of ``n_paths`` independent paths on ``(0, T]``.

    ``spec`` may also be a :class:`CountLaw`; the batch then carries counts
    only (times are ``nan``) and ``T`` is ignored.
    """
    if isinstance(spec, CountLaw):
        counts = np.asarray(spec.sample(rng, n_paths), dtype=np.int64)
        width = int(counts.max()) if n_paths else 0
        times = np.where(np.arange(width)[None, :] < counts[:, None], np.nan, np.inf)
        return ArrivalBatch(times, counts, None)
    _check_process(spec, T)
    if isinstance(spec, Renewal):
        return _renewal_batch(spec, T, n_paths, rng)
    mT = float(spec.cumulative(T))
    counts = rng.poisson(mT, n_paths).astype(np.int64) if mT > 0 else np.zeros(n_paths, np.int64)
    width = int(counts.max()) if n_paths else 0
    mask = np.arange(width)[None, :] < counts[:, None]
    u = rng.random((n_paths, width))
    u = np.where(mask, u, np.inf)
    u.sort(axis=1)
    times = np.full_like(u, np.inf)
    times[mask] = np.clip(spec.inverse_cumulative(u[mask] * mT, T), 0.0, T)
    times = _break_ties(times)
    return ArrivalBatch(times, counts, float(T))


def _renewal_batch(spec: Renewal, T: float, n_paths: int, rng: np.random.Generator) -> ArrivalBatch:
    mean = float(getattr(spec.interarrival, "mean", 1.0))
    step = max(4, int(math.ceil(1.5 * T / mean)) + 4)
    cols = []
    total = np.zeros(n_paths)
    while True:
        gaps = np.asarray(spec.interarrival.sample(rng, (n_paths, step)), dtype=float)
        if np.any(gaps < 0):
            raise ValueError("negative inter-arrival time")
        block = total[:, None] + np.cumsum(gaps, axis=1)
        cols.append(block)
        total = block[:, -1]
        if n_paths == 0 or np.all(total > T):
            break
    times = np.concatenate(cols, axis=1) if cols else np.empty((n_paths, 0))
    counts = np.sum(times <= T, axis=1).astype(np.int64)
    width = int(counts.max()) if n_paths else 0
    times = times[:, :width]
    times = np.where(np.arange(width)[None, :] < counts[:, None], times, np.inf)
    return ArrivalBatch(_break_ties(times), counts, float(T))


def sample_arrivals(spec: CountingProcessSpec, T: float, rng: np.random.Generator) -> ArrivalSequence:
    """One path of arrival times on ``(0, T]``."""
    return sample_arrival_batch(spec, T, 1, rng).row(0)


def cumulative_intensity(spec: CountingProcessSpec, t: float) -> float:
    """``m(t) = int_0^t lambda(s) ds`` for Poisson kinds."""
    if not spec.is_poisson:
        raise ValueError("no intensity: renewal processes have no cumulative intensity")
    if t < 0:
        raise ValueError("t must be non-negative")
    return float(spec.cumulative(float(t)))


def sample_v0(spec: CountingProcessSpec, T: float, rng: np.random.Generator, size=None):
    """Draw from the density ``lambda(t) / m(T)`` on ``[0, T]``."""
    if not spec.is_poisson:
        raise ValueError("no intensity: renewal processes have no cumulative intensity")
    mT = float(spec.cumulative(T))
    if not mT > 0:
        raise ValueError("m(T) = 0: V0 is undefined")
    u = rng.random(size)
    out = np.clip(spec.inverse_cumulative(np.atleast_1d(u) * mT, T), 0.0, T)
    return out.reshape(np.shape(u)) if size is not None else float(out[0])


def count_moment_check(spec, T: float, order: float, n_paths: int, rng: np.random.Generator):
    """Empirical ``E[N(T)^order]`` with a warning when it looks unstable.

    Unstable means the top 1% of draws carry more than half of the total.
    Returns ``(estimate, stable)``.
    """
    counts = sample_arrival_batch(spec, T, n_paths, rng).counts.astype(float)
    powered = counts**order
    total = powered.sum()
    if total == 0:
        return 0.0, True
    top = np.sort(powered)[-max(1, n_paths // 100):].sum()
    stable = bool(top <= 0.5 * total)
    if not stable:
        warnings.warn(f"moment of order {order} of N(T) looks infinite or unstable", RuntimeWarning)
    return float(total / n_paths), stable
