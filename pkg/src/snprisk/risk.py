"""Asymptotic risk constants of shot noise processes and their Monte Carlo
counterparts.

Every constant is a weighted integral over the arrival instant ``s`` of a
shock kernel, ``int_0^T lambda(s) E[k(s)] ds``, with the expectation taken
over the per-shock parameters (``omega`` for exponential shocks):

=========  ==============================================
tail       ``k(s) = h(T, s)^alpha``
ruin       ``k(s) = max(h(s, s), h(T, s))^alpha``
ies        ``k(s) = int_s^T h(t, s)^alpha dt``
=========  ==============================================

The ruin kernel is valid whenever each realised shock function is monotone
in ``t``: the largest value of a single big shock is then reached either at
its arrival or at the horizon.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import integrate

from .arrivals import CountingProcessSpec, HomogeneousPoisson, Renewal
from .estimators import Z95, score_interval
from .heavytail import HeavyTailDist
from .parallel import fsum_columns, run_chunks
from .snp import (
    ConstantShock,
    ExponentialShock,
    IndicatorShock,
    PathBatch,
    ShockFunctionSpec,
    UserShock,
    batch_evaluate,
    batch_exceedance_integrals,
    batch_supremum,
    simulate_batch,
)

__all__ = [
    "NotAvailable",
    "RiskScenario",
    "RiskEntry",
    "RiskReport",
    "INDICATORS",
    "CONDITIONAL",
    "tail_constant",
    "ruin_constant",
    "es_constant",
    "ies_constant",
    "etot_limit",
    "closed_form",
    "extremal_index",
    "numeric_limit_trace",
    "kdem_constants",
    "mc_indicator",
    "risk_report",
    "content_hash",
]

INDICATORS = ("tail-ratio", "ruin", "es", "ies", "etot")
_QUAD = dict(epsabs=0.0, epsrel=1e-10, limit=500)


class NotAvailable(Exception):
    """A closed form does not exist for this scenario."""


@dataclass(frozen=True)
class RiskScenario:
    marginal: HeavyTailDist
    counting: CountingProcessSpec
    shock: ShockFunctionSpec
    horizon: float

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")

    @property
    def alpha(self) -> float:
        return self.marginal.alpha

    def with_horizon(self, T: float) -> "RiskScenario":
        return replace(self, horizon=float(T))

    @property
    def quadrature_method(self) -> str:
        return self.shock.quadrature_method


# ----------------------------------------------------------- kernels


def _phi(z):
    """``(1 - exp(-z)) / z`` with the removable singularity at 0 filled in."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 - z / 2, -np.expm1(-safe) / safe)


def _kernel(shock: ShockFunctionSpec, alpha: float, kind: str, T: float):
    """Scalar function ``s -> E[k(s)]`` for the kernels in the module docstring."""
    if isinstance(shock, ExponentialShock):
        w, p, _ = shock.omega.support()
        aw = alpha * w

        def fn(s):
            u = T - s
            if kind == "tail":
                v = np.exp(-aw * u)
            elif kind == "ruin":
                v = np.exp(np.maximum(-aw * u, 0.0))
            else:
                v = u * _phi(aw * u)
            return float(np.dot(p, v))

        return fn
    if isinstance(shock, ConstantShock):
        ca = shock.c**alpha
        return {"tail": lambda s: ca, "ruin": lambda s: ca, "ies": lambda s: ca * (T - s)}[kind]
    if isinstance(shock, IndicatorShock):
        # h(T, s) = 0 except on the null set s = T
        return {"tail": lambda s: 0.0, "ruin": lambda s: 1.0, "ies": lambda s: 0.0}[kind]
    if isinstance(shock, UserShock):
        h = shock.h
        if kind == "tail":
            return lambda s: float(h(T, s)) ** alpha
        if kind == "ruin":
            if not shock.per_shock_monotone:
                raise NotAvailable("ruin constant needs a declared monotone shock function")
            return lambda s: max(float(h(s, s)), float(h(T, s))) ** alpha
        return lambda s: integrate.quad(lambda t: float(h(t, s)) ** alpha, s, T, **_QUAD)[0] if T > s else 0.0
    raise NotAvailable(f"no closed form for shock {shock!r}")


def _weighted(counting: CountingProcessSpec, T: float, fn) -> float:
    """``int_0^T lambda(s) fn(s) ds``."""
    if isinstance(counting, Renewal) or not getattr(counting, "is_poisson", False):
        raise NotAvailable("closed forms need a Poisson counting process")
    if T == 0:
        return 0.0
    points = [b for b in counting.breakpoints(T) if 0 < b < T] or None
    if isinstance(counting, HomogeneousPoisson):
        val, _ = integrate.quad(fn, 0.0, T, points=points, **_QUAD)
        return counting.rate * val
    val, _ = integrate.quad(lambda s: float(counting.intensity(s)) * fn(s), 0.0, T, points=points, **_QUAD)
    return val


def _check_scenario(scn: RiskScenario) -> None:
    if isinstance(scn.shock, ExponentialShock) and np.any(scn.shock.omega.support()[0] < 0):
        from .snp import cramer_check

        _, ok = cramer_check(scn.shock, scn.alpha, scn.horizon)
        if not ok:
            raise NotAvailable("Cramer condition on the negative part of omega looks violated")


def tail_constant(scn: RiskScenario) -> float:
    """``K`` with ``P(Y(T) > x) ~ K P(X > x)``, i.e. ``m(T) E[h^alpha(T, V0)]``."""
    _check_scenario(scn)
    return _weighted(scn.counting, scn.horizon, _kernel(scn.shock, scn.alpha, "tail", scn.horizon))


def ruin_constant(scn: RiskScenario) -> float:
    """``K`` with ``P(sup_{t <= T} Y(t) > x) ~ K P(X > x)``."""
    if not scn.shock.per_shock_monotone:
        raise NotAvailable("ruin constant needs a declared monotone shock function")
    _check_scenario(scn)
    return _weighted(scn.counting, scn.horizon, _kernel(scn.shock, scn.alpha, "ruin", scn.horizon))


def _gamma(scn: RiskScenario) -> float:
    g = scn.marginal.gamma
    if g is None:
        raise ValueError("infinite mean: severity constants need alpha > 1")
    return g


def es_constant(scn: RiskScenario) -> float:
    """``K_ES`` with ``E[(Y(T) - x)_+] ~ K_ES Fbar^I(x)``."""
    return _gamma(scn) * tail_constant(scn)


def _ies_integral(scn: RiskScenario) -> float:
    """``int_0^T m(t) E[h^alpha(t, V0(t))] dt``."""
    _check_scenario(scn)
    return _weighted(scn.counting, scn.horizon, _kernel(scn.shock, scn.alpha, "ies", scn.horizon))


def ies_constant(scn: RiskScenario) -> float:
    """``K_IES`` with ``int_0^T E[(Y(t) - x)_+] dt ~ K_IES Fbar^I(x)``."""
    return _gamma(scn) * _ies_integral(scn)


def etot_limit(scn: RiskScenario) -> float:
    """Limit of the expected time over ``x`` given ruin, as ``x -> inf``."""
    ruin = ruin_constant(scn)
    if not ruin > 0:
        raise ValueError("ruin constant is zero: ETOT limit undefined")
    return _ies_integral(scn) / ruin


_CLOSED = {
    "tail-ratio": tail_constant,
    "ruin": ruin_constant,
    "es": es_constant,
    "ies": ies_constant,
    "etot": etot_limit,
}


def closed_form(scn: RiskScenario, indicator: str) -> Optional[float]:
    """Closed-form constant for ``indicator``, ``None`` when not available."""
    try:
        return _CLOSED[indicator](scn)
    except KeyError:
        raise ValueError(f"unknown indicator {indicator!r}") from None
    except NotAvailable:
        return None


# ---------------------------------------------------- KDEM plug-in route


def kdem_constants(omega, alpha: float, rate: float, T: float, gamma: Optional[float] = None) -> dict:
    """Explicit KDEM formulas under a homogeneous Poisson process.

    Evaluated directly from the ``omega`` law, independently of the kernel
    quadrature used by :func:`tail_constant` and friends.
    """
    from .snp import as_omega_law

    w, p, _ = as_omega_law(omega).support()
    aw = alpha * w
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lin = np.where(aw == 0, T, -np.expm1(-aw * T) / np.where(aw == 0, 1.0, aw))
        quad = np.where(aw == 0, T * T / 2, (aw * T + np.expm1(-aw * T)) / np.where(aw == 0, 1.0, aw) ** 2)
    tail = rate * float(np.dot(p, lin))
    ruin = rate * (T * float(np.dot(p, w > 0)) + float(np.dot(p, np.where(w <= 0, lin, 0.0))))
    out = {"tail-ratio": tail, "ruin": ruin, "etot": float(np.dot(p, quad)) / float(np.dot(p, np.where(w > 0, T, lin)))}
    if gamma is not None:
        out["es"] = gamma * tail
        out["ies"] = gamma * rate * float(np.dot(p, quad))
    return out


# ------------------------------------------------------- extremal index


def numeric_limit_trace(scn: RiskScenario, T_grid=(10.0, 20.0, 40.0, 80.0)):
    """``theta(T) = 1 / ETOT(T)`` on the grid and its Neville extrapolation in ``1/T``.

    Returns ``(T_grid, theta_T, diagonal)`` where ``diagonal[k]`` is the
    extrapolation to ``1/T = 0`` using the first ``k + 1`` grid points.
    """
    Ts = np.asarray(sorted(T_grid), dtype=float)
    theta = []
    for T in Ts:
        e = etot_limit(scn.with_horizon(T))
        theta.append(math.inf if e == 0 else 1.0 / e)
    theta = np.asarray(theta)
    if np.all(np.isinf(theta)):
        return Ts, theta, theta.copy()
    h = 1.0 / Ts
    table = [theta.copy()]
    diag = [theta[0]]
    for level in range(1, len(Ts)):
        prev = table[-1]
        cur = np.array([
            (h[i] * prev[i + 1] - h[i + level] * prev[i]) / (h[i] - h[i + level])
            for i in range(len(Ts) - level)
        ])
        table.append(cur)
        diag.append(cur[0])
    return Ts, theta, np.asarray(diag)


def _omega_support(scn):
    if not isinstance(scn.shock, ExponentialShock):
        return None
    return scn.shock.omega.support()


def extremal_index(scn: RiskScenario, mode: str = "numeric-limit", T_grid=(10.0, 20.0, 40.0, 80.0),
                   rtol: float = 0.02) -> float:
    """Extremal index ``theta`` in ``[0, inf]``.

    Modes
    -----
    numeric-limit
        ``1 / lim_{T -> inf} ETOT`` by extrapolation on ``T_grid``; raises
        ``ArithmeticError`` with the trace when the last two extrapolations
        differ by more than ``rtol``.
    paper-closed-form
        ``alpha E[omega^2] / E[omega]`` for ``omega > 0``, ``alpha omega_-``
        for a constant negative part, 0 for random walks (``omega = 0`` or
        constant shocks) and ``inf`` for indicator shocks.
    embedded-chain
        ``1 - E[exp(-alpha omega dT)]`` for the chain on arrival instants.
    """
    alpha = scn.alpha
    if mode == "numeric-limit":
        Ts, theta, diag = numeric_limit_trace(scn, T_grid)
        if np.isinf(diag[-1]):
            return math.inf
        last, prev = diag[-1], diag[-2]
        if not abs(last - prev) <= rtol * max(abs(last), 1e-3) + 1e-9:
            trace = ", ".join(f"T={T:g}: {t:.6g}" for T, t in zip(Ts, theta))
            raise ArithmeticError(f"numeric extremal index did not converge ({trace})")
        return max(float(last), 0.0)
    if mode == "paper-closed-form":
        if isinstance(scn.shock, IndicatorShock):
            return math.inf
        if isinstance(scn.shock, ConstantShock):
            return 0.0
        sup = _omega_support(scn)
        if sup is None:
            raise NotAvailable("closed-form extremal index needs exponential shocks")
        w, p, _ = sup
        if np.all(w == 0):
            return 0.0
        if np.all(w > 0):
            return alpha * float(np.dot(p, w * w)) / float(np.dot(p, w))
        neg = w[w < 0]
        if len(neg) and np.all(neg == neg[0]):
            return alpha * float(-neg[0])
        raise NotAvailable("closed-form extremal index needs omega > 0 or a constant negative part")
    if mode == "embedded-chain":
        if isinstance(scn.shock, IndicatorShock):
            return 1.0
        if isinstance(scn.shock, ConstantShock):
            return 0.0
        sup = _omega_support(scn)
        if sup is None:
            raise NotAvailable("embedded-chain extremal index needs exponential shocks")
        w, p, _ = sup
        if np.any(w < 0):
            raise NotAvailable("embedded chain has no stationary extremes with negative omega")
        if isinstance(scn.counting, HomogeneousPoisson):
            lam = scn.counting.rate
            return float(np.dot(p, alpha * w / (lam + alpha * w)))
        if isinstance(scn.counting, Renewal) and hasattr(scn.counting.interarrival, "laplace"):
            lap = np.array([scn.counting.interarrival.laplace(alpha * v) for v in w])
            return float(1.0 - np.dot(p, lap))
        raise NotAvailable("embedded-chain extremal index needs i.i.d. inter-arrivals")
    raise ValueError(f"unknown extremal index mode {mode!r}")


# ------------------------------------------------------------ Monte Carlo


@dataclass
class RiskEntry:
    indicator: str
    closed_form_constant: Optional[float]
    mc_estimate: float
    ci_half_width: float
    ci_low: float
    ci_high: float
    n_paths: int
    threshold: float
    n_exceedances: int
    flagged: bool = False
    method: str = "plain"
    quadrature: str = "quadrature"


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
CONDITIONAL = ("tail-ratio", "es", "ies")


def _largest_shock_terms(scn: RiskScenario, x: float, times, shocks, params, t, kind: str) -> np.ndarray:
    """Conditional expectations given every shock value except the largest.

    The event is split by which ``X_i`` is the largest and that value is
    integrated out. With ``a_i = h_i(t, T_i)``, ``S_{-i} = Y(t) - a_i X_i``,
    ``M_{-i} = max_{j != i} X_j``, ``c = (x - S_{-i}) / a_i`` and
    ``L = max(M_{-i}, c)``, the term for ``i`` is ``P(X > L)`` for
    ``kind="tail"`` and ``a_i ((L - c) P(X > L) + int_L^inf P(X > v) dv)``
    for ``kind="excess"``. When ``a_i = 0`` the terms reduce to
    ``1{S_{-i} > x} P(X > M_{-i})`` and ``(S_{-i} - x)_+ P(X > M_{-i})``.

    ``times``, ``shocks`` and ``params`` are ``(m, k)`` arrays of paths with
    exactly ``k >= 1`` arrivals; ``t`` is ``(m, G)``. Returns ``(m, G)``.
    """
    dist = scn.marginal
    m, k = shocks.shape
    if params is None and isinstance(scn.shock, ExponentialShock):
        params = np.full(times.shape, scn.shock.constant_omega)
    if k == 1:
        m_other = np.zeros((m, 1))
    else:
        order = np.sort(shocks, axis=1)
        m_other = np.where(shocks == order[:, -1:], order[:, -2:-1], order[:, -1:])
    surv_m = dist.survival(m_other)[:, None, :]
    m_other = m_other[:, None, :]
    out = np.empty(t.shape)
    step = max(1, 2_000_000 // max(1, t.shape[1] * k))
    for lo in range(0, m, step):
        sl = slice(lo, min(m, lo + step))
        p_ = None if params is None else params[sl][:, None, :]
        a = scn.shock.h(t[sl][:, :, None], times[sl][:, None, :], p_)
        if np.any(a < 0):
            raise ValueError("conditional estimator needs a non-negative shock function")
        contrib = a * shocks[sl][:, None, :]
        rest = contrib.sum(axis=2, keepdims=True) - contrib
        mo, sm = m_other[sl], surv_m[sl]
        pos = a > 0
        c = np.where(pos, (x - rest) / np.where(pos, a, 1.0), 0.0)
        level = np.maximum(mo, c)
        surv_l = dist.survival(level)
        if kind == "tail":
            vals = np.where(pos, surv_l, (rest > x) * sm)
        else:
            tail_int = dist.gamma * dist.integrated_tail_survival(level)
            vals = np.where(pos, a * ((level - c) * surv_l + tail_int), np.maximum(rest - x, 0.0) * sm)
        out[sl] = vals.sum(axis=2)
    return out


def _conditional_values(batch: PathBatch, scn: RiskScenario, x: float, kind: str, over_time: bool) -> np.ndarray:
    """Per-path conditional estimates, at ``T`` or integrated over ``[0, T]``.

    Paths are grouped by arrival count so each group is evaluated at its own
    width. The time integral uses 16-point Gauss-Legendre on every
    inter-arrival segment, so no node sits on a jump.
    """
    T = batch.horizon
    out = np.zeros(len(batch))
    for k in np.unique(batch.counts):
        if k == 0:
            continue
        rows = np.flatnonzero(batch.counts == k)
        times = batch.times[rows, :k]
        shocks = batch.shocks[rows, :k]
        params = None if batch.params is None else batch.params[rows, :k]
        m = len(rows)
        if over_time:
            edges = np.concatenate([np.zeros((m, 1)), times, np.full((m, 1), T)], axis=1)
            lo, hi = edges[:, :-1, None], edges[:, 1:, None]
            half = (hi - lo) / 2
            t = (lo + half * (1 + _GL_NODES)).reshape(m, -1)
            w = (half * _GL_WEIGHTS).reshape(m, -1)
        else:
            t = np.full((m, 1), T)
            w = np.ones((m, 1))
        out[rows] = np.sum(_largest_shock_terms(scn, x, times, shocks, params, t, kind) * w, axis=1)
    return out


def _chunk_stats(scn: RiskScenario, indicator: str, x: float, method: str, sup_mode: str):
    def fn(n, g):
        batch = simulate_batch(scn.marginal, scn.counting, scn.shock, scn.horizon, n, g)
        if method == "conditional":
            kind = "tail" if indicator == "tail-ratio" else "excess"
            v = _conditional_values(batch, scn, x, kind, over_time=indicator == "ies")
            if indicator == "ies":
                hits = batch_supremum(batch, scn.shock, sup_mode) > x
            else:
                hits = batch_evaluate(batch, scn.shock, scn.horizon) > x
            return [math.fsum(v), math.fsum(v * v), float(np.sum(hits))]
        if indicator == "tail-ratio":
            return [float(np.sum(batch_evaluate(batch, scn.shock, scn.horizon) > x))]
        if indicator == "ruin":
            return [float(np.sum(batch_supremum(batch, scn.shock, sup_mode) > x))]
        if indicator == "es":
            v = np.maximum(batch_evaluate(batch, scn.shock, scn.horizon) - x, 0.0)
            return [math.fsum(v), math.fsum(v * v), float(np.sum(v > 0))]
        time, excess = batch_exceedance_integrals(batch, scn.shock, x)
        if indicator == "ies":
            return [math.fsum(excess), math.fsum(excess * excess), float(np.sum(excess > 0))]
        hit = (batch_supremum(batch, scn.shock, sup_mode) > x).astype(float)
        return [math.fsum(time), math.fsum(time * time), math.fsum(hit), math.fsum(time * hit)]

    return fn


def _normal_ci(s, s2, n):
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return mean, Z95 * math.sqrt(var / n)


def mc_indicator(scn: RiskScenario, indicator: str, x: float, n_paths: int, rng: np.random.Generator,
                 workers: int = 1, method: str = "plain", sup_mode: str = "skeleton+terminal") -> RiskEntry:
    """Monte Carlo estimate of the finite-``x`` ratio that converges to the constant.

    ``tail-ratio`` and ``ruin`` are divided by ``P(X > x)``; ``es`` and
    ``ies`` by ``Fbar^I(x)``; ``etot`` is the mean time above ``x`` among
    paths whose supremum exceeds ``x``. ``method="conditional"`` (tail ratio,
    ES and IES) integrates out the largest shock analytically; for ES and
    IES this also removes the infinite variance of the plain payoff when
    ``alpha <= 2``.
    """
    if indicator not in INDICATORS:
        raise ValueError(f"unknown indicator {indicator!r}")
    if not x > 0:
        raise ValueError("threshold must be positive")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if method not in ("plain", "conditional"):
        raise ValueError(f"unknown method {method!r}")
    if method == "conditional" and (indicator not in CONDITIONAL or not isinstance(scn.marginal, HeavyTailDist)):
        raise ValueError("conditional method applies to the tail ratio, ES and IES of i.i.d. shocks only")
    stats = fsum_columns(run_chunks(_chunk_stats(scn, indicator, x, method, sup_mode), n_paths, rng, workers))
    n = n_paths
    if indicator in ("tail-ratio", "ruin") and method == "plain":
        k = int(stats[0])
        scale = float(scn.marginal.survival(x))
        lo, hi = (0.0, 1.0) if n == 1 else score_interval(k, n)
        est, lo, hi = k / n / scale, lo / scale, hi / scale
        half = (hi - lo) / 2
    elif indicator == "etot":
        sa, sa2, sb, sab = stats
        k = int(sb)
        if k == 0:
            est, half = 0.0, math.inf
        else:
            est = sa / sb
            # delta method for a ratio of means
            var = (sa2 - 2 * est * sab + est * est * sb) / n / max(n - 1, 1) * n
            half = Z95 * math.sqrt(max(var, 0.0) / n) / (sb / n)
        lo, hi = max(est - half, 0.0), est + half
    else:
        k = int(stats[2])
        scale = float(scn.marginal.survival(x)) if indicator == "tail-ratio" else float(scn.marginal.integrated_tail_survival(x))
        mean, half = _normal_ci(stats[0], stats[1], n)
        est = mean / scale
        half = half / scale if k > 0 or method == "conditional" else math.inf
        lo, hi = max(est - half, 0.0), est + half
    return RiskEntry(indicator, closed_form(scn, indicator), float(est), float(half), float(lo), float(hi),
                     n, float(x), k, k == 0, method, scn.quadrature_method)


# ------------------------------------------------------------- reports


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    if isinstance(v, dict):
        return {k: _jsonable(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(w) for w in v]
    return v


def content_hash(payload) -> str:
    """sha256 of the canonical JSON encoding of ``payload``."""
    text = json.dumps(_jsonable(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RiskReport:
    entries: list
    config: dict = field(default_factory=dict)
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)

    @property
    def input_hash(self) -> str:
        return content_hash({"config": self.config, "seed": self.seed})

    def as_dict(self) -> dict:
        return _jsonable({
            "config": self.config,
            "seed": self.seed,
            "input_hash": self.input_hash,
            "entries": [asdict(e) for e in self.entries],
            **self.extra,
        })

    def to_json(self, path=None) -> str:
        text = json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def to_csv(self, path=None) -> str:
        cols = ["indicator", "closed_form_constant", "mc_estimate", "ci_half_width", "n_paths", "threshold"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for e in self.entries:
            row = asdict(e)
            w.writerow(["not-available" if row[c] is None else row[c] for c in cols])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def risk_report(scn: RiskScenario, indicators, x: float, n_paths: int, rng: np.random.Generator,
                workers: int = 1, method: str = "plain") -> RiskReport:
    """Run :func:`mc_indicator` for each indicator, in order, from one stream."""
    entries = []
    for ind in indicators:
        m = method if ind in CONDITIONAL else "plain"
        entries.append(mc_indicator(scn, ind, x, n_paths, rng, workers, m))
    return RiskReport(entries)
