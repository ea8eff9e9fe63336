"""Regularly varying marginal laws and a light-tailed volatility generator.

The canonical law is the Pareto distribution with survival
``(x_m / x) ** alpha`` on ``[x_m, inf)``. Arbitrary laws can be plugged in
through :class:`UserTail`, which trusts a declared tail index and mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize, signal

__all__ = [
    "HeavyTailDist",
    "Pareto",
    "UserTail",
    "Degenerate",
    "DependentSequenceGen",
    "sample",
    "survival",
    "integrated_tail_survival",
    "sample_dependent",
    "regular_variation_gap",
    "potter_bounds_hold",
    "sample_rows",
]

_TINY_UNIFORM = np.finfo(float).tiny


class HeavyTailDist:
    """Base class for a positive law with a regularly varying survival function."""

    alpha: float

    @property
    def gamma(self) -> Optional[float]:
        """Mean of the law, ``None`` when infinite."""
        raise NotImplementedError

    def survival(self, x):
        raise NotImplementedError

    def isf(self, u):
        """Inverse survival function, ``x`` such that ``survival(x) = u``."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        # u = 0 would map to +inf
        u = np.maximum(u, _TINY_UNIFORM) if size is not None else max(u, _TINY_UNIFORM)
        return self.isf(u)

    def integrated_tail_survival(self, y):
        raise NotImplementedError

    def _require_finite_mean(self) -> float:
        if self.gamma is None:
            raise ValueError("integrated tail undefined: infinite mean")
        return self.gamma


@dataclass(frozen=True)
class Pareto(HeavyTailDist):
    """Pareto law with tail index ``alpha`` and scale ``x_m``."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def kind(self) -> str:
        return "pareto"

    @property
    def gamma(self) -> Optional[float]:
        if self.alpha <= 1:
            return None
        return self.alpha * self.scale / (self.alpha - 1)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= self.scale, 1.0, (self.scale / np.maximum(x, self.scale)) ** self.alpha)
        return out if out.ndim else float(out)

    def isf(self, u):
        u = np.asarray(u, dtype=float)
        out = self.scale * u ** (-1.0 / self.alpha)
        return out if out.ndim else float(out)

    def integrated_tail_survival(self, y):
        gamma = self._require_finite_mean()
        y = np.asarray(y, dtype=float)
        a, xm = self.alpha, self.scale
        upper = xm**a * np.maximum(y, xm) ** (1 - a) / (a - 1)
        below = np.where(y < xm, xm - y, 0.0)
        out = (upper + below) / gamma
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class UserTail(HeavyTailDist):
    """Law given by its survival function, with declared tail index and mean.

    Parameters
    ----------
    survival_fn : callable
        Vectorised ``x -> P(X > x)``; must equal 1 at ``lower``.
    alpha : float
        Declared tail index; spot-check with :func:`regular_variation_gap`.
    mean : float or None
        Declared mean ``gamma`` (``None`` if infinite).
    lower : float
        Left end of the support.
    isf_fn : callable, optional
        Inverse survival function. Without it, sampling inverts
        ``survival_fn`` by root finding, one draw at a time.
    """

    survival_fn: Callable
    alpha: float
    mean: Optional[float] = None
    lower: float = 0.0
    isf_fn: Optional[Callable] = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.mean is not None and self.alpha <= 1:
            raise ValueError("a finite mean is incompatible with alpha <= 1")

    @property
    def kind(self) -> str:
        return "user"

    @property
    def gamma(self) -> Optional[float]:
        return self.mean

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= self.lower, 1.0, self.survival_fn(np.maximum(x, self.lower)))
        return out if out.ndim else float(out)

    def isf(self, u):
        if self.isf_fn is not None:
            return self.isf_fn(u)
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.array([self._invert(v) for v in u_arr])
        return out.reshape(np.shape(u)) if np.ndim(u) else float(out[0])

    def _invert(self, u: float) -> float:
        if u >= 1.0:
            return self.lower
        hi = max(1.0, 2 * abs(self.lower) + 1.0)
        while self.survival(hi) > u:
            hi *= 2.0
        return optimize.brentq(lambda x: self.survival(x) - u, self.lower, hi, xtol=1e-12, rtol=1e-12)

    def _truncation_point(self) -> float:
        x = max(1.0, abs(self.lower) + 1.0)
        while self.survival(x) >= 1e-12:
            x *= 2.0
        return x

    def integrated_tail_survival(self, y):
        gamma = self._require_finite_mean()
        cut = self._truncation_point()

        # beyond the cut the tail is regularly varying: int_c^inf F = c F(c) / (alpha - 1)
        remainder = cut * float(self.survival(cut)) / (self.alpha - 1)

        def one(v):
            if v >= cut:
                return float(v * self.survival(v) / (self.alpha - 1)) / gamma
            lo = max(v, self.lower)
            val, _ = integrate.quad(self.survival, lo, cut, epsabs=0.0, epsrel=1e-8, limit=500)
            return (val + remainder + max(self.lower - v, 0.0)) / gamma

        if np.ndim(y):
            return np.array([one(v) for v in np.asarray(y, dtype=float).ravel()]).reshape(np.shape(y))
        return one(float(y))


@dataclass(frozen=True)
class Degenerate:
    """Point mass, used for deterministic shocks, entries and inter-arrivals."""

    value: float

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return float(self.value)
        return np.full(size, float(self.value))

    @property
    def mean(self) -> float:
        return float(self.value)


def sample(dist: HeavyTailDist, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. values from ``dist``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return np.asarray(dist.sample(rng, n), dtype=float)


def survival(dist: HeavyTailDist, x):
    """``P(X > x)``."""
    return dist.survival(x)


def integrated_tail_survival(dist: HeavyTailDist, y):
    """``(1/gamma) * int_y^inf survival(x) dx``; raises for infinite mean."""
    return dist.integrated_tail_survival(y)


@dataclass(frozen=True)
class DependentSequenceGen:
    """Stochastic volatility sequence ``X_t = sigma_t * eps_t``.

    ``log sigma_t`` is a stationary Gaussian AR(1) with persistence ``phi`` and
    innovation standard deviation ``sigma_xi``; ``eps_t`` are i.i.d. draws of
    ``marginal``. The volatility is light tailed so the heavy tail of ``X``
    is inherited from the innovations.
    """

    marginal: HeavyTailDist
    volatility_persistence: float = 0.5
    volatility_noise_sd: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.volatility_persistence < 1.0:
            raise ValueError("volatility_persistence must lie in (0, 1)")
        if self.volatility_noise_sd < 0:
            raise ValueError("volatility_noise_sd must be non-negative")

    @property
    def alpha(self) -> float:
        return self.marginal.alpha

    @property
    def gamma(self) -> Optional[float]:
        g = self.marginal.gamma
        if g is None:
            return None
        phi, s = self.volatility_persistence, self.volatility_noise_sd
        # E[sigma] for the stationary log-normal volatility
        return g * math.exp(0.5 * s**2 / (1 - phi**2))

    def sample(self, rng: np.random.Generator, n: int, size: Optional[int] = None) -> np.ndarray:
        rows = 1 if size is None else size
        phi, s = self.volatility_persistence, self.volatility_noise_sd
        if n == 0:
            out = np.empty((rows, 0))
        else:
            xi = rng.standard_normal((rows, n)) * s
            xi[:, 0] *= 1.0 / math.sqrt(1 - phi**2)  # stationary start
            log_sigma = signal.lfilter([1.0], [1.0, -phi], xi, axis=1)
            eps = np.asarray(self.marginal.sample(rng, (rows, n)), dtype=float)
            out = np.exp(log_sigma) * eps
        return out[0] if size is None else out


def sample_dependent(gen: DependentSequenceGen, n: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """One stationary sequence of length ``n`` (or ``size`` independent rows)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return gen.sample(rng, n, size)


def sample_rows(marginal, rng: np.random.Generator, n_rows: int, width: int) -> np.ndarray:
    """``(n_rows, width)`` shock values; rows of a dependent generator are sequences."""
    if width == 0:
        return np.empty((n_rows, 0))
    if isinstance(marginal, DependentSequenceGen):
        return marginal.sample(rng, width, size=n_rows)
    return np.asarray(marginal.sample(rng, (n_rows, width)), dtype=float)


def regular_variation_gap(dist: HeavyTailDist, xs, ts) -> float:
    """Largest ``|survival(t x) / survival(x) - t**-alpha|`` over the grid."""
    xs = np.asarray(xs, dtype=float)[:, None]
    ts = np.asarray(ts, dtype=float)[None, :]
    ratio = dist.survival(ts * xs) / dist.survival(xs)
    return float(np.max(np.abs(ratio - ts ** (-dist.alpha))))


def potter_bounds_hold(dist: HeavyTailDist, xs, eps: float, c: float = 1.0, x0: Optional[float] = None) -> bool:
    """Check ``c^-1 r^(-a-eps) <= F(y)/F(x) <= c r^(-a+eps)`` for grid pairs y >= x >= x0."""
    xs = np.sort(np.asarray(xs, dtype=float))
    if x0 is not None:
        xs = xs[xs >= x0]
    x, y = np.meshgrid(xs, xs, indexing="ij")
    keep = y >= x
    x, y = x[keep], y[keep]
    r = y / x
    ratio = dist.survival(y) / dist.survival(x)
    a = dist.alpha
    # relative slack of a few ulps for the exact-equality case c = 1
    slack = 8 * np.finfo(float).eps
    lo = r ** (-a - eps) / c * (1 - slack)
    hi = c * r ** (-a + eps) * (1 + slack)
    return bool(np.all((lo <= ratio) & (ratio <= hi)))
