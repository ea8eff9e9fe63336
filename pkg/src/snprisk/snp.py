"""Shot noise paths ``Y(t) = sum_{T_i <= t} X_i h_i(t, T_i)``.

Single paths (:class:`SnpPath`) serve inspection and tests; Monte Carlo code
works on :class:`PathBatch`, a padded array layout holding many paths at once.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .arrivals import ArrivalBatch, ArrivalSequence, sample_arrival_batch
from .heavytail import Degenerate, sample_rows

__all__ = [
    "OmegaLaw",
    "ConstantOmega",
    "DiscreteOmega",
    "ContinuousOmega",
    "ShockFunctionSpec",
    "ConstantShock",
    "ExponentialShock",
    "IndicatorShock",
    "UserShock",
    "SnpPath",
    "Supremum",
    "PathBatch",
    "simulate_path",
    "simulate_batch",
    "evaluate",
    "embedded_chain",
    "path_supremum",
    "path_trace",
    "kdem_chain",
    "cramer_check",
    "batch_evaluate",
    "batch_chain",
    "batch_supremum",
    "batch_exceedance_integrals",
    "batch_from_arrivals",
    "as_omega_law",
]

NON_INCREASING = "non-increasing"
NON_DECREASING = "non-decreasing"
MIXED = "mixed"
_MONOTONICITY = (NON_INCREASING, NON_DECREASING, MIXED)

# ------------------------------------------------------------ omega laws


class OmegaLaw:
    """Law of the per-shock elimination rate ``omega``."""

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def support(self):
        """``(values, weights, method)`` used for expectations over omega."""
        raise NotImplementedError

    def expect(self, fn) -> float:
        values, weights, _ = self.support()
        return float(np.sum(weights * fn(values)))


@dataclass(frozen=True)
class ConstantOmega(OmegaLaw):
    value: float

    def sample(self, rng, size=None):
        return float(self.value) if size is None else np.full(size, float(self.value))

    def support(self):
        return np.array([float(self.value)]), np.array([1.0]), "quadrature"


@dataclass(frozen=True)
class DiscreteOmega(OmegaLaw):
    values: tuple
    probabilities: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        p = np.asarray(self.probabilities, dtype=float)
        if v.shape != p.shape or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise ValueError("omega values and probabilities must align and sum to 1")
        object.__setattr__(self, "values", tuple(v))
        object.__setattr__(self, "probabilities", tuple(p / p.sum()))

    def sample(self, rng, size=None):
        return rng.choice(np.asarray(self.values), size=size, p=np.asarray(self.probabilities))

    def support(self):
        return np.asarray(self.values), np.asarray(self.probabilities), "quadrature"


class ContinuousOmega(OmegaLaw):
    """Continuous omega law (e.g. a frozen ``scipy.stats`` distribution).

    Expectations use a fixed inner Monte Carlo sample of ``inner_draws``
    values drawn from ``inner_seed``, so they are deterministic.
    """

    def __init__(self, frozen, inner_draws: int = 100_000, inner_seed: int = 0):
        self.frozen = frozen
        self.inner_draws = inner_draws
        self.inner_seed = inner_seed
        self._support = None

    def sample(self, rng, size=None):
        return self.frozen.rvs(size=size, random_state=rng)

    def support(self):
        if self._support is None:
            draws = np.asarray(self.frozen.rvs(size=self.inner_draws, random_state=np.random.default_rng(self.inner_seed)))
            self._support = (draws, np.full(len(draws), 1.0 / len(draws)), "nested-mc")
        return self._support

    def __repr__(self):
        return f"ContinuousOmega({self.frozen.dist.name}, args={self.frozen.args}, kwds={self.frozen.kwds})"


def as_omega_law(omega) -> OmegaLaw:
    if isinstance(omega, OmegaLaw):
        return omega
    if isinstance(omega, (int, float)):
        return ConstantOmega(float(omega))
    return ContinuousOmega(omega)


# ------------------------------------------------------- shock functions


class ShockFunctionSpec:
    """Random shock function family ``h_i(t, s)``, zero for ``t < s``.

    Subclasses implement :meth:`h` vectorised over ``t``, ``s`` and the
    per-shock parameter array returned by :meth:`draw_params`.
    """

    monotonicity = MIXED
    # each realised h_i(., s) is monotone, possibly in different directions
    per_shock_monotone = False
    instantaneous = False

    def draw_params(self, rng: np.random.Generator, size):
        return None

    def h(self, t, s, params=None):
        raise NotImplementedError

    def expect(self, fn) -> float:
        """Expectation over the per-shock parameters of ``fn(params)``."""
        return float(fn(None))

    @property
    def quadrature_method(self) -> str:
        return "quadrature"


@dataclass(frozen=True)
class ConstantShock(ShockFunctionSpec):
    c: float = 1.0
    monotonicity = NON_INCREASING
    per_shock_monotone = True

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("constant shock level must be positive")

    def h(self, t, s, params=None):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        return np.where(t >= s, float(self.c), 0.0)


@dataclass(frozen=True)
class IndicatorShock(ShockFunctionSpec):
    """``h(t, s) = 1{t = s}``: every shock is felt only at its own instant."""

    monotonicity = NON_INCREASING
    per_shock_monotone = True
    instantaneous = True

    def h(self, t, s, params=None):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        return np.where(t == s, 1.0, 0.0)


class ExponentialShock(ShockFunctionSpec):
    """``h_i(t, s) = exp(-omega_i (t - s))`` with ``omega_i`` i.i.d. per shock."""

    per_shock_monotone = True

    def __init__(self, omega):
        self.omega = as_omega_law(omega)
        values, _, _ = self.omega.support()
        if np.all(values >= 0):
            self.monotonicity = NON_INCREASING
        elif np.all(values <= 0):
            self.monotonicity = NON_DECREASING
        else:
            self.monotonicity = MIXED

    @property
    def constant_omega(self) -> Optional[float]:
        if isinstance(self.omega, ConstantOmega):
            return float(self.omega.value)
        return None

    def draw_params(self, rng, size):
        return np.asarray(self.omega.sample(rng, size), dtype=float)

    def h(self, t, s, params=None):
        if params is None:
            params = self.constant_omega
            if params is None:
                raise ValueError("random omega requires per-shock parameters")
        t, s, w = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float), np.asarray(params, float))
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(-w * (t - s))
        return np.where(t >= s, out, 0.0)

    def expect(self, fn) -> float:
        return self.omega.expect(fn)

    @property
    def quadrature_method(self) -> str:
        return self.omega.support()[2]

    def __eq__(self, other):
        return isinstance(other, ExponentialShock) and repr(other.omega) == repr(self.omega)

    def __hash__(self):
        return hash(repr(self.omega))

    def __repr__(self):
        return f"ExponentialShock(omega={self.omega!r})"


class UserShock(ShockFunctionSpec):
    """Deterministic user shock ``h(t, s)`` with a declared monotonicity in ``t``."""

    def __init__(self, fn: Callable, monotonicity: str = MIXED):
        if monotonicity not in _MONOTONICITY:
            raise ValueError(f"monotonicity must be one of {_MONOTONICITY}")
        self.fn = fn
        self.monotonicity = monotonicity
        self.per_shock_monotone = monotonicity != MIXED

    def h(self, t, s, params=None):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        out = np.asarray(self.fn(t, np.minimum(s, t)), dtype=float)
        return np.where(t >= s, out, 0.0)

    def __repr__(self):
        return f"UserShock({getattr(self.fn, '__name__', 'fn')}, {self.monotonicity})"


def cramer_check(shock: ShockFunctionSpec, alpha: float, T: float, p: Optional[float] = None,
                 n: int = 100_000, rng: Optional[np.random.Generator] = None):
    """Empirical check of ``E[exp(p omega_- T)] < inf`` for some ``p > alpha``.

    Returns ``(estimate, ok)``; ``ok`` is False when the top 1% of draws
    carry more than half of the sample mean.
    """
    if not isinstance(shock, ExponentialShock):
        return 1.0, True
    p = alpha * 1.1 if p is None else p
    if p <= alpha:
        raise ValueError("p must exceed alpha")
    values, weights, method = shock.omega.support()
    if method != "nested-mc":
        return float(np.sum(weights * np.exp(p * np.maximum(-values, 0) * T))), True
    rng = np.random.default_rng(0) if rng is None else rng
    draws = np.asarray(shock.omega.sample(rng, n), dtype=float)
    with np.errstate(over="ignore"):
        vals = np.exp(p * np.maximum(-draws, 0) * T)
    top = np.sort(vals)[-max(1, n // 100):].sum()
    return float(vals.mean()), bool(np.isfinite(vals).all() and top <= 0.5 * vals.sum())


# ---------------------------------------------------------- single paths


@dataclass(frozen=True)
class SnpPath:
    arrivals: ArrivalSequence
    shocks: np.ndarray
    params: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.arrivals.count
        if len(self.shocks) != n or (self.params is not None and len(self.params) != n):
            raise ValueError("arrivals, shocks and parameters must have the same length")

    @property
    def horizon(self) -> float:
        return self.arrivals.horizon

    @property
    def times(self) -> np.ndarray:
        return self.arrivals.times

    @classmethod
    def from_arrays(cls, times, shocks, horizon: float, params=None) -> "SnpPath":
        times = np.asarray(times, dtype=float)
        params = None if params is None else np.asarray(params, dtype=float)
        return cls(ArrivalSequence(times, float(horizon)), np.asarray(shocks, dtype=float), params)


@dataclass(frozen=True)
class Supremum:
    value: float
    mode: str
    warning: Optional[str] = None


def _path_params(path: SnpPath, spec: ShockFunctionSpec):
    if path.params is not None:
        return path.params
    if isinstance(spec, ExponentialShock) and spec.constant_omega is not None:
        return np.full(path.arrivals.count, spec.constant_omega)
    return None


def simulate_path(marginal, counting, shock: ShockFunctionSpec, T: float, rng: np.random.Generator) -> SnpPath:
    """Draw one path: arrivals, then shocks, then per-shock parameters."""
    batch = simulate_batch(marginal, counting, shock, T, 1, rng)
    n = int(batch.counts[0])
    params = None if batch.params is None else batch.params[0, :n].copy()
    return SnpPath(ArrivalSequence(batch.times[0, :n].copy(), float(T)), batch.shocks[0, :n].copy(), params)


def evaluate(path: SnpPath, spec: ShockFunctionSpec, t):
    """``Y(t)``; ``t`` may be a scalar or an array of times."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if path.arrivals.count == 0:
        out = np.zeros_like(tt)
    else:
        params = _path_params(path, spec)
        p = None if params is None else params[None, :]
        vals = spec.h(tt[:, None], path.times[None, :], p)
        vals = np.where(path.times[None, :] <= tt[:, None], vals, 0.0)
        out = vals @ path.shocks
    return out if np.ndim(t) else float(out[0])


def embedded_chain(path: SnpPath, spec: ShockFunctionSpec) -> np.ndarray:
    """``(Y(T_1), ..., Y(T_N))``, each including the shock just arrived."""
    if path.arrivals.count == 0:
        return np.empty(0)
    return np.asarray(evaluate(path, spec, path.times), dtype=float)


def _dense_grid(path: SnpPath, dt: float) -> np.ndarray:
    T = path.horizon
    n = int(math.ceil(T / dt))
    grid = np.linspace(0.0, T, n + 1)
    return np.union1d(grid, path.times)


def path_supremum(path: SnpPath, spec: ShockFunctionSpec, mode: str = "skeleton+terminal",
                  dt: Optional[float] = None) -> Supremum:
    """Supremum of ``Y`` over ``[0, T]``.

    ``skeleton`` takes the max over the embedded chain, ``skeleton+terminal``
    adds ``Y(T)``, and ``dense`` evaluates on a grid of step ``dt`` (default
    ``T / 10**4``) merged with the arrival instants.
    """
    warning = None
    if mode == "skeleton" and spec.monotonicity != NON_INCREASING:
        warning = f"skeleton supremum may miss the maximum for {spec.monotonicity} shocks; use dense mode as oracle"
    if path.arrivals.count == 0:
        return Supremum(0.0, mode, warning)
    if mode == "skeleton":
        value = float(np.max(embedded_chain(path, spec)))
    elif mode == "skeleton+terminal":
        value = max(float(np.max(embedded_chain(path, spec))), float(evaluate(path, spec, path.horizon)))
    elif mode == "dense":
        dt = path.horizon / 1e4 if dt is None else dt
        if not dt > 0:
            raise ValueError("dense mode requires dt > 0")
        value = float(np.max(evaluate(path, spec, _dense_grid(path, dt))))
    else:
        raise ValueError(f"unknown supremum mode {mode!r}")
    return Supremum(max(value, 0.0), mode, warning)


def path_trace(path: SnpPath, spec: ShockFunctionSpec, dt: Optional[float] = None):
    """``(t, Y(t))`` on a dense grid, for CSV export and plotting."""
    dt = path.horizon / 1e3 if dt is None else dt
    grid = _dense_grid(path, dt)
    return grid, np.asarray(evaluate(path, spec, grid))


def kdem_chain(omega, interarrival, shock, n_steps: int, rng: np.random.Generator,
               y0: float = 0.0, burn_in: int = 0) -> np.ndarray:
    """Embedded KDEM chain ``Y_{n+1} = exp(-omega_{n+1} dT_{n+1}) Y_n + X_{n+1}``.

    ``omega`` is a number or :class:`OmegaLaw`; ``interarrival`` and ``shock``
    are numbers (point masses) or laws with ``sample(rng, size)``. With
    ``burn_in > 0`` the first ``burn_in`` steps are discarded, which needs
    ``E[omega] > 0`` for a stationary solution to exist.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    omega = as_omega_law(omega)
    interarrival = Degenerate(interarrival) if isinstance(interarrival, (int, float)) else interarrival
    shock = Degenerate(shock) if isinstance(shock, (int, float)) else shock
    if burn_in > 0 and not omega.expect(lambda w: w) > 0:
        raise ValueError("no stationary solution: E[omega] must be positive")
    total = n_steps + burn_in
    w = np.asarray(omega.sample(rng, total), dtype=float)
    gaps = np.asarray(interarrival.sample(rng, total), dtype=float)
    x = np.asarray(shock.sample(rng, total), dtype=float)
    decay = np.exp(-w * gaps)
    if np.all(decay == 1.0):
        out = y0 + np.cumsum(x)
    else:
        out = np.empty(total)
        y = float(y0)
        for i, (a, xi) in enumerate(zip(decay.tolist(), x.tolist())):
            y = a * y + xi
            out[i] = y
    return out[burn_in:]


# ---------------------------------------------------------- path batches


@dataclass
class PathBatch:
    """Many independent paths in padded layout.

    ``times`` is padded with ``+inf``, ``shocks`` with 0, ``params`` (if any)
    with 0. Row ``p`` holds ``counts[p]`` live entries.
    """

    times: np.ndarray
    shocks: np.ndarray
    params: Optional[np.ndarray]
    counts: np.ndarray
    horizon: float

    @property
    def mask(self) -> np.ndarray:
        return np.arange(self.times.shape[1])[None, :] < self.counts[:, None]

    def __len__(self):
        return len(self.counts)

    def path(self, p: int) -> SnpPath:
        n = int(self.counts[p])
        params = None if self.params is None else self.params[p, :n].copy()
        return SnpPath(ArrivalSequence(self.times[p, :n].copy(), self.horizon), self.shocks[p, :n].copy(), params)

    def rows(self, idx) -> "PathBatch":
        idx = np.asarray(idx)
        counts = self.counts[idx]
        width = int(counts.max()) if len(counts) else 0
        params = None if self.params is None else self.params[idx, :width]
        return PathBatch(self.times[idx, :width], self.shocks[idx, :width], params, counts, self.horizon)


def simulate_batch(marginal, counting, shock: ShockFunctionSpec, T: float, n_paths: int,
                   rng: np.random.Generator) -> PathBatch:
    """Draw ``n_paths`` independent shot noise paths on ``[0, T]``."""
    arr = sample_arrival_batch(counting, T, n_paths, rng)
    return batch_from_arrivals(arr, marginal, shock, rng)


def batch_from_arrivals(arr: ArrivalBatch, marginal, shock: ShockFunctionSpec, rng) -> PathBatch:
    width = arr.times.shape[1]
    mask = arr.mask
    x = np.where(mask, sample_rows(marginal, rng, len(arr), width), 0.0)
    params = shock.draw_params(rng, (len(arr), width))
    if params is not None:
        params = np.where(mask, params, 0.0)
    return PathBatch(arr.times, x, params, arr.counts, arr.horizon)


def _batch_params(batch: PathBatch, shock: ShockFunctionSpec):
    if batch.params is not None:
        return batch.params
    if isinstance(shock, ExponentialShock) and shock.constant_omega is not None:
        return np.full(batch.times.shape, shock.constant_omega)
    return None


def batch_evaluate(batch: PathBatch, shock: ShockFunctionSpec, t: float) -> np.ndarray:
    """``Y(t)`` for every path."""
    live = batch.mask & (batch.times <= t)
    vals = shock.h(t, np.where(live, batch.times, t), _batch_params(batch, shock))
    return np.sum(np.where(live, vals * batch.shocks, 0.0), axis=1)


def _chunk_rows(n_rows: int, width: int, budget: int = 4_000_000):
    step = max(1, budget // max(1, width * width))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def batch_chain(batch: PathBatch, shock: ShockFunctionSpec) -> np.ndarray:
    """Embedded chains, shape ``(n_paths, width)``, padded with ``-inf``."""
    mask = batch.mask
    x = batch.shocks
    if isinstance(shock, ConstantShock):
        out = shock.c * np.cumsum(x, axis=1)
    elif isinstance(shock, IndicatorShock):
        out = x.copy()
    elif isinstance(shock, ExponentialShock) and shock.constant_omega is not None:
        w = shock.constant_omega
        out = np.empty_like(x)
        y = np.zeros(len(batch))
        prev = np.zeros(len(batch))
        for k in range(x.shape[1]):
            tk = np.where(mask[:, k], batch.times[:, k], prev)
            y = np.exp(-w * (tk - prev)) * y + x[:, k]
            out[:, k] = y
            prev = tk
    else:
        params = _batch_params(batch, shock)
        out = np.empty_like(x)
        width = x.shape[1]
        for sl in _chunk_rows(len(batch), width):
            t = batch.times[sl]
            tk = np.where(mask[sl], t, 0.0)
            p = None if params is None else params[sl][:, None, :]
            h = shock.h(tk[:, :, None], tk[:, None, :], p)
            lower = np.tril(np.ones((width, width), dtype=bool))
            h = np.where(lower[None] & mask[sl][:, None, :], h, 0.0)
            out[sl] = np.einsum("pkj,pj->pk", h, x[sl])
    return np.where(mask, out, -np.inf)


def batch_supremum(batch: PathBatch, shock: ShockFunctionSpec, mode: str = "skeleton+terminal",
                   dt: Optional[float] = None) -> np.ndarray:
    """Path suprema over ``[0, T]`` for every path (0 for empty paths)."""
    if mode == "dense":
        dt = batch.horizon / 1e4 if dt is None else dt
        return np.array([path_supremum(batch.path(p), shock, "dense", dt).value for p in range(len(batch))])
    chain = batch_chain(batch, shock)
    sup = np.max(chain, axis=1, initial=0.0) if chain.shape[1] else np.zeros(len(batch))
    if mode == "skeleton+terminal":
        sup = np.maximum(sup, batch_evaluate(batch, shock, batch.horizon))
    elif mode != "skeleton":
        raise ValueError(f"unknown supremum mode {mode!r}")
    return np.maximum(sup, 0.0)


# ----------------------------------------- exceedance time and severity


def _exp_segment(x_i, s_i, w_i, a: float, b: float, level: float):
    """Time above ``level`` and integral of ``(Y - level)_+`` on ``[a, b]``.

    ``Y(t) = sum x_i exp(-w_i (t - s_i))`` is a positive combination of
    exponentials, hence convex on the segment.
    """

    def y(t):
        return float(np.sum(x_i * np.exp(-w_i * (t - s_i))))

    def dy(t):
        return float(np.sum(-w_i * x_i * np.exp(-w_i * (t - s_i))))

    def integral(u, v):
        d = v - u
        base = x_i * np.exp(-w_i * (u - s_i))
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(w_i == 0, d, -np.expm1(-w_i * d) / np.where(w_i == 0, 1.0, w_i))
        return float(np.sum(base * factor))

    ya, yb = y(a), y(b)
    if b <= a or max(ya, yb) <= level:
        return 0.0, 0.0
    # minimiser of the convex function on [a, b]
    if dy(a) >= 0:
        tmin = a
    elif dy(b) <= 0:
        tmin = b
    else:
        tmin = optimize.brentq(dy, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    intervals = []
    if y(tmin) > level:
        intervals.append((a, b))
    else:
        if ya > level:
            r = optimize.brentq(lambda t: y(t) - level, a, tmin, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            intervals.append((a, r))
        if yb > level:
            r = optimize.brentq(lambda t: y(t) - level, tmin, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            intervals.append((r, b))
    time = sum(v - u for u, v in intervals)
    excess = sum(integral(u, v) - level * (v - u) for u, v in intervals)
    return time, max(excess, 0.0)


def _segments(path: SnpPath):
    T = path.horizon
    edges = np.concatenate([path.times, [T]])
    for k in range(path.arrivals.count):
        yield k, float(edges[k]), float(edges[k + 1])


def _path_exceedance(path: SnpPath, shock: ShockFunctionSpec, level: float, dt: Optional[float]):
    n = path.arrivals.count
    if n == 0 or shock.instantaneous:
        return 0.0, 0.0
    if isinstance(shock, ConstantShock):
        vals = shock.c * np.cumsum(path.shocks)
        lengths = np.diff(np.concatenate([path.times, [path.horizon]]))
        return float(np.sum(lengths * (vals > level))), float(np.sum(lengths * np.maximum(vals - level, 0.0)))
    if isinstance(shock, ExponentialShock):
        params = _path_params(path, shock)
        time = excess = 0.0
        for k, a, b in _segments(path):
            t_seg, e_seg = _exp_segment(path.shocks[: k + 1], path.times[: k + 1], params[: k + 1], a, b, level)
            time += t_seg
            excess += e_seg
        return time, excess
    # generic shocks: trapezoid on a dense grid
    dt = path.horizon / 1e4 if dt is None else dt
    grid = _dense_grid(path, dt)
    vals = np.asarray(evaluate(path, shock, grid))
    above = (vals > level).astype(float)
    return float(integrate.trapezoid(above, grid)), float(integrate.trapezoid(np.maximum(vals - level, 0.0), grid))


def batch_exceedance_integrals(batch: PathBatch, shock: ShockFunctionSpec, level: float,
                               dt: Optional[float] = None):
    """Per-path ``int_0^T 1{Y > level} dt`` and ``int_0^T (Y - level)_+ dt``.

    Exact for constant, indicator and exponential shocks; generic shocks use
    a dense grid. Only paths whose supremum exceeds ``level`` are visited.
    """
    time = np.zeros(len(batch))
    excess = np.zeros(len(batch))
    if len(batch) == 0 or shock.instantaneous:
        return time, excess
    if isinstance(shock, (ConstantShock, ExponentialShock)):
        # convex segments: the supremum lies on the skeleton or at T
        candidates = np.nonzero(batch_supremum(batch, shock, "skeleton+terminal") > level)[0]
    else:
        candidates = np.arange(len(batch))
    for p in candidates:
        time[p], excess[p] = _path_exceedance(batch.path(int(p)), shock, level, dt)
    return time, excess


def warn_if_mixed(shock: ShockFunctionSpec, mode: str) -> None:
    if mode == "skeleton" and shock.monotonicity != NON_INCREASING:
        warnings.warn(f"skeleton supremum with {shock.monotonicity} shocks may underestimate", RuntimeWarning)
