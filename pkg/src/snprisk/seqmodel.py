"""Random-length sequences ``C(N) = A(N) X(N)``.

A :class:`SequenceScenario` couples a marginal law for ``X``, a law for the
length ``N`` (a counting process on ``[0, T]`` or a plain count law), a
matrix kind for ``A(N)`` and a norm. Monte Carlo routines draw many
realisations at once in padded arrays; :func:`realize` returns a single one
with a lazily built matrix.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .arrivals import ArrivalBatch, ArrivalSequence, CountingProcessSpec, CountLaw, sample_arrival_batch
from .estimators import score_interval
from .heavytail import DependentSequenceGen, HeavyTailDist, sample_rows
from .parallel import fsum_columns, run_chunks
from .snp import ExponentialShock, PathBatch, ShockFunctionSpec, batch_chain

__all__ = [
    "Norm",
    "L1",
    "LINF",
    "norm_eval",
    "induced_matrix_norm",
    "MatrixSpec",
    "IdentityMatrix",
    "DiagonalShock",
    "LowerTriangularShock",
    "DenseIID",
    "SequenceScenario",
    "RealizedMatrix",
    "Realization",
    "MCEstimate",
    "SpectralAtoms",
    "SpectralEstimate",
    "MomentDiagnostic",
    "realize",
    "sample_norms",
    "breiman_constant_mc",
    "spectral_atoms_closed",
    "empirical_spectral_measure",
    "h4_moment_diagnostic",
]

Z95 = 1.959963984540054

# ----------------------------------------------------------------- norms


@dataclass(frozen=True)
class Norm:
    """``l1``, ``linf`` or ``lp`` (with ``1 < p < inf``) on finite sequences."""

    kind: str
    p: Optional[float] = None

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("l1", "linf", "lp"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if kind == "lp":
            if self.p is None or not 1 < self.p < math.inf:
                raise ValueError("lp norm needs 1 < p < inf")
        object.__setattr__(self, "kind", kind)

    @property
    def induced_is_exact(self) -> bool:
        return self.kind != "lp"

    def rows(self, u: np.ndarray) -> np.ndarray:
        """Norm of every row of a 2-d array (padding must be 0)."""
        a = np.abs(np.asarray(u, dtype=float))
        if a.shape[-1] == 0:
            return np.zeros(a.shape[:-1])
        if self.kind == "l1":
            return a.sum(axis=-1)
        top = a.max(axis=-1)
        if self.kind == "linf":
            return top
        safe = np.where(top > 0, top, 1.0)
        val = top * np.sum((a / safe[..., None]) ** self.p, axis=-1) ** (1.0 / self.p)
        # rounding can push the scaled value a hair outside [linf, l1]
        return np.clip(val, top, a.sum(axis=-1))

    def __str__(self):
        return self.kind if self.kind != "lp" else f"lp({self.p:g})"


L1 = Norm("l1")
LINF = Norm("linf")


def norm_eval(norm: Norm, u) -> float:
    """Norm of a finite sequence, taken on absolute values."""
    return float(norm.rows(np.atleast_1d(np.asarray(u, dtype=float))))


def induced_matrix_norm(norm: Norm, A) -> float:
    """Operator norm of ``A`` induced by ``norm``.

    Exact for ``l1`` (max column sum) and ``linf`` (max row sum). For ``lp``
    the Riesz-Thorin bound ``||A||_1^(1/p) ||A||_inf^(1-1/p)`` is returned;
    it is an upper bound, see :attr:`Norm.induced_is_exact`.
    """
    A = np.abs(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0.0
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("induced norm needs a square matrix")
    col = float(A.sum(axis=0).max())
    row = float(A.sum(axis=1).max())
    if norm.kind == "l1":
        return col
    if norm.kind == "linf":
        return row
    return col ** (1.0 / norm.p) * row ** (1.0 - 1.0 / norm.p)


def _induced_batch(norm: Norm, A: np.ndarray) -> np.ndarray:
    A = np.abs(A)
    if A.shape[-1] == 0:
        return np.zeros(A.shape[0])
    col = A.sum(axis=1).max(axis=-1)
    row = A.sum(axis=2).max(axis=-1)
    if norm.kind == "l1":
        return col
    if norm.kind == "linf":
        return row
    return col ** (1.0 / norm.p) * row ** (1.0 - 1.0 / norm.p)


# -------------------------------------------------------------- matrices


class MatrixSpec:
    needs_times = False


@dataclass(frozen=True)
class IdentityMatrix(MatrixSpec):
    pass


@dataclass(frozen=True)
class DiagonalShock(MatrixSpec):
    """``a_jj = h_j(T, T_j)``: ``C`` is the vector of shock contributions at ``T``."""

    shock: ShockFunctionSpec
    needs_times = True


@dataclass(frozen=True)
class LowerTriangularShock(MatrixSpec):
    """``a_kj = h_j(T_k, T_j)`` for ``j <= k``: ``C`` is the embedded chain."""

    shock: ShockFunctionSpec
    needs_times = True


@dataclass(frozen=True)
class DenseIID(MatrixSpec):
    """I.i.d. non-negative entries drawn from ``entry`` (any ``sample(rng, size)`` law)."""

    entry: object


@dataclass(frozen=True)
class SequenceScenario:
    marginal: Union[HeavyTailDist, DependentSequenceGen]
    length: Union[CountingProcessSpec, CountLaw]
    matrix: MatrixSpec = IdentityMatrix()
    norm: Norm = L1
    horizon: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.length, CountingProcessSpec):
            if self.horizon is None or not self.horizon > 0:
                raise ValueError("a counting-process length needs a positive horizon")
        elif not isinstance(self.length, CountLaw):
            raise TypeError("length must be a counting process or a count law")
        if self.matrix.needs_times and not isinstance(self.length, CountingProcessSpec):
            raise ValueError("shock-based matrices need arrival times from a counting process")

    @property
    def alpha(self) -> float:
        return self.marginal.alpha

    @property
    def shock(self) -> Optional[ShockFunctionSpec]:
        return getattr(self.matrix, "shock", None)


@dataclass
class _Draw:
    """Padded joint draw of ``n`` realisations."""

    arrivals: ArrivalBatch
    x: np.ndarray
    params: Optional[np.ndarray]
    entries: Optional[np.ndarray]

    @property
    def counts(self):
        return self.arrivals.counts

    @property
    def mask(self):
        return self.arrivals.mask


def _draw(scn: SequenceScenario, n: int, rng: np.random.Generator) -> _Draw:
    arr = sample_arrival_batch(scn.length, scn.horizon, n, rng)
    width = arr.times.shape[1]
    mask = arr.mask
    x = np.where(mask, sample_rows(scn.marginal, rng, n, width), 0.0)
    params = entries = None
    shock = scn.shock
    if shock is not None:
        params = shock.draw_params(rng, (n, width))
        if params is not None:
            params = np.where(mask, params, 0.0)
    if isinstance(scn.matrix, DenseIID):
        entries = np.asarray(scn.matrix.entry.sample(rng, (n, width, width)), dtype=float)
        if np.any(entries < 0):
            raise ValueError("matrix entries must be non-negative")
        entries = np.where(mask[:, :, None] & mask[:, None, :], entries, 0.0)
    return _Draw(arr, x, params, entries)


def _shock_params(shock, params, shape):
    if params is not None:
        return params
    if isinstance(shock, ExponentialShock) and shock.constant_omega is not None:
        return np.full(shape, shock.constant_omega)
    return None


def _matrices(scn: SequenceScenario, d: _Draw, rows: slice) -> np.ndarray:
    """Full ``(m, width, width)`` matrices for a slice of rows."""
    mask = d.mask[rows]
    m, width = mask.shape
    both = mask[:, :, None] & mask[:, None, :]
    kind = scn.matrix
    if isinstance(kind, IdentityMatrix):
        return np.where(both, np.eye(width)[None], 0.0)
    if isinstance(kind, DenseIID):
        return d.entries[rows]
    t = np.where(mask, d.arrivals.times[rows], 0.0)
    p = _shock_params(kind.shock, None if d.params is None else d.params[rows], t.shape)
    pk = None if p is None else p[:, None, :]
    if isinstance(kind, DiagonalShock):
        diag = kind.shock.h(scn.horizon, t, p)
        return np.where(both, np.eye(width)[None] * diag[:, None, :], 0.0)
    h = kind.shock.h(t[:, :, None], t[:, None, :], pk)
    lower = np.tril(np.ones((width, width), dtype=bool))[None]
    return np.where(both & lower, h, 0.0)


def _row_chunks(n_rows: int, width: int, budget: int = 2_000_000):
    step = max(1, budget // max(1, width * width))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def _products(scn: SequenceScenario, d: _Draw) -> np.ndarray:
    kind = scn.matrix
    if isinstance(kind, IdentityMatrix):
        return d.x
    if isinstance(kind, DiagonalShock):
        t = np.where(d.mask, d.arrivals.times, 0.0)
        p = _shock_params(kind.shock, d.params, t.shape)
        return np.where(d.mask, kind.shock.h(scn.horizon, t, p) * d.x, 0.0)
    if isinstance(kind, LowerTriangularShock):
        batch = PathBatch(d.arrivals.times, d.x, d.params, d.counts, float(scn.horizon))
        return np.where(d.mask, batch_chain(batch, kind.shock), 0.0)
    out = np.zeros_like(d.x)
    for sl in _row_chunks(len(d.x), d.x.shape[1]):
        out[sl] = np.einsum("pkj,pj->pk", _matrices(scn, d, sl), d.x[sl])
    return out


def _column_norms(scn: SequenceScenario, d: _Draw) -> np.ndarray:
    """``||A_k(N)||`` for every column ``k`` (0 on padding)."""
    kind = scn.matrix
    if isinstance(kind, IdentityMatrix):
        return d.mask.astype(float)
    if isinstance(kind, DiagonalShock):
        t = np.where(d.mask, d.arrivals.times, 0.0)
        p = _shock_params(kind.shock, d.params, t.shape)
        return np.where(d.mask, np.abs(kind.shock.h(scn.horizon, t, p)), 0.0)
    out = np.zeros_like(d.x)
    for sl in _row_chunks(len(d.x), d.x.shape[1]):
        A = _matrices(scn, d, sl)
        out[sl] = scn.norm.rows(np.swapaxes(A, 1, 2))
    return out


# ------------------------------------------------------- single draws


class RealizedMatrix:
    """One realised ``A(N)``, built column by column on demand."""

    def __init__(self, scn: SequenceScenario, d: _Draw):
        self._scn = scn
        self._d = d
        self.n = int(d.counts[0])

    def column(self, k: int) -> np.ndarray:
        if not 0 <= k < self.n:
            raise IndexError(k)
        kind = self._scn.matrix
        if isinstance(kind, IdentityMatrix):
            col = np.zeros(self.n)
            col[k] = 1.0
            return col
        if isinstance(kind, DenseIID):
            return self._d.entries[0, : self.n, k].copy()
        t = self._d.arrivals.times[0, : self.n]
        p = _shock_params(kind.shock, None if self._d.params is None else self._d.params[0, : self.n], t.shape)
        pk = None if p is None else p[k]
        col = np.zeros(self.n)
        if isinstance(kind, DiagonalShock):
            col[k] = kind.shock.h(self._scn.horizon, t[k], pk)
        else:
            col[k:] = kind.shock.h(t[k:], t[k], pk)
        return col

    def column_norms(self, norm: Optional[Norm] = None) -> np.ndarray:
        norm = self._scn.norm if norm is None else norm
        return np.array([norm_eval(norm, self.column(k)) for k in range(self.n)])

    def toarray(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros((0, 0))
        return np.column_stack([self.column(k) for k in range(self.n)])

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = np.zeros(self.n)
        for k in range(self.n):
            if v[k] != 0:
                out += v[k] * self.column(k)
        return out

    @property
    def shape(self):
        return (self.n, self.n)


@dataclass
class Realization:
    arrivals: ArrivalSequence
    x: np.ndarray
    matrix: RealizedMatrix
    c: np.ndarray
    norm: float


def realize(scenario: SequenceScenario, rng: np.random.Generator) -> Realization:
    """One joint draw of ``(arrivals, X(N), A(N), C(N), ||C(N)||)``."""
    d = _draw(scenario, 1, rng)
    n = int(d.counts[0])
    c = _products(scenario, d)[0, :n].copy()
    times = d.arrivals.times[0, :n].copy()
    return Realization(ArrivalSequence(times, scenario.horizon), d.x[0, :n].copy(),
                       RealizedMatrix(scenario, d), c, norm_eval(scenario.norm, c) if n else 0.0)


def sample_norms(scenario: SequenceScenario, n: int, rng: np.random.Generator) -> np.ndarray:
    """``||C(N)||`` for ``n`` independent realisations (0 when ``N = 0``)."""
    d = _draw(scenario, n, rng)
    return scenario.norm.rows(_products(scenario, d))


# ---------------------------------------------------- Breiman constant


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    ci_half_width: float
    std_error: float
    n_samples: int


def _mean_estimate(sums: np.ndarray, n: int) -> MCEstimate:
    s, s2 = sums[0], sums[1]
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    se = math.sqrt(var / n)
    return MCEstimate(float(mean), float(Z95 * se), float(se), int(n))


def breiman_constant_mc(scenario: SequenceScenario, n_samples: int, rng: np.random.Generator,
                        workers: int = 1) -> MCEstimate:
    """Monte Carlo estimate of ``E[sum_k ||A_k(N)||^alpha]`` with a 95% CI."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    alpha = scenario.alpha

    def chunk(n, g):
        d = _draw(scenario, n, g)
        vals = np.sum(_column_norms(scenario, d) ** alpha, axis=1)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise FloatingPointError(f"non-finite Breiman sample (N={int(d.counts[k])}, value={vals[k]})")
        return [math.fsum(vals), math.fsum(vals * vals)]

    sums = fsum_columns(run_chunks(chunk, n_samples, rng, workers))
    return _mean_estimate(sums, n_samples)


# ------------------------------------------------------ spectral atoms


@dataclass(frozen=True)
class SpectralAtoms:
    atoms: tuple
    j_max: int
    deficit: float

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])


def _count_law(length, horizon=None) -> CountLaw:
    if isinstance(length, CountLaw):
        return length
    if isinstance(length, CountingProcessSpec) and length.is_poisson:
        if horizon is None:
            raise ValueError("a counting process needs a horizon")
        return length.count_law(horizon)
    raise ValueError("spectral atoms need a count law or a Poisson process with horizon")


def spectral_atoms_closed(length, j_max: Optional[int] = None, horizon: Optional[float] = None,
                          tail_cutoff: float = 1e-12) -> SpectralAtoms:
    """Atoms ``p_j = P(N >= j) / E[N]`` of the spectral measure of ``X(N)``.

    Without ``j_max`` the atoms run until ``p_j`` drops below
    ``tail_cutoff``; ``deficit`` is the mass left out.
    """
    law = _count_law(length, horizon)
    mean = law.mean()
    if not mean > 0:
        raise ValueError("E[N] = 0: spectral measure undefined")
    atoms = []
    j = 1
    while True:
        p = float(law.prob_at_least(j)) / mean
        if j_max is None and p < tail_cutoff:
            break
        atoms.append((j, p))
        if j_max is not None and j >= j_max:
            break
        j += 1
    total = math.fsum(p for _, p in atoms)
    return SpectralAtoms(tuple(atoms), len(atoms), max(0.0, 1.0 - total))


@dataclass
class SpectralEstimate:
    threshold: float
    n_exceedances: int
    n_samples: int
    weights: np.ndarray
    ci_half_width: np.ndarray
    moment: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.arange(1, len(self.weights) + 1)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "weight", "ci_half_width"])
        for j, p, h in zip(self.indices, self.weights, self.ci_half_width):
            w.writerow([int(j), repr(float(p)), repr(float(h))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def empirical_spectral_measure(scenario: SequenceScenario, n_samples: int, rng: np.random.Generator,
                               threshold: Optional[float] = None, level: Optional[float] = None,
                               min_exceedances: int = 200, max_samples: Optional[int] = None,
                               workers: int = 1) -> SpectralEstimate:
    """Spectral summaries of ``C / ||C||`` given ``||C|| > x``.

    Give either a raw ``threshold`` or a probability ``level``; the latter is
    turned into the empirical ``level``-quantile of ``||C||`` from a pilot run
    of ``n_samples``. Batches of ``n_samples`` are drawn until
    ``min_exceedances`` are collected or ``max_samples`` (default
    ``20 * n_samples``) is exhausted.

    Returns atom weights ``P(argmax_i |Theta_i| = j)`` with score CIs, and
    the mean of ``|Theta_i|^alpha`` per coordinate.
    """
    if (threshold is None) == (level is None):
        raise ValueError("give exactly one of threshold and level")
    max_samples = 20 * n_samples if max_samples is None else max_samples
    alpha = scenario.alpha
    if level is not None:
        if not 0 < level < 1:
            raise ValueError("level must lie in (0, 1)")
        pilot = np.concatenate(run_chunks(lambda n, g: sample_norms(scenario, n, g), n_samples, rng, workers))
        threshold = float(np.quantile(pilot, level))

    def chunk(n, g):
        d = _draw(scenario, n, g)
        c = np.abs(_products(scenario, d))
        norms = scenario.norm.rows(c)
        keep = norms > threshold
        return c[keep] / norms[keep, None]

    thetas, used = [], 0
    count = 0
    while count < min_exceedances:
        if used >= max_samples:
            raise RuntimeError(f"threshold too extreme for budget: {count} exceedances of x={threshold:g} "
                               f"in {used} samples")
        for part in run_chunks(chunk, n_samples, rng, workers):
            thetas.append(part)
            count += len(part)
        used += n_samples
    width = max(t.shape[1] for t in thetas)
    theta = np.vstack([np.pad(t, ((0, 0), (0, width - t.shape[1]))) for t in thetas])
    k = len(theta)
    arg = np.argmax(theta, axis=1)
    counts = np.bincount(arg, minlength=width)
    weights = counts / k
    half = np.array([(lambda lo, hi: (hi - lo) / 2)(*score_interval(int(c), k)) for c in counts])
    moment = np.mean(theta**alpha, axis=0)
    return SpectralEstimate(float(threshold), k, used, weights, half, moment)


# -------------------------------------------------------- H4 diagnostic


@dataclass(frozen=True)
class MomentDiagnostic:
    estimate: float
    stable: bool
    top_share: float
    n_samples: int


def h4_moment_diagnostic(scenario: SequenceScenario, eps: float, n_samples: int,
                         rng: np.random.Generator) -> MomentDiagnostic:
    """Empirical ``E[||A(N)||^(alpha+eps) N^(1+alpha+eps)]``.

    ``stable`` is False when the top 1% of the samples carry more than half
    of the total, the usual signature of an infinite moment.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    a = scenario.alpha + eps
    d = _draw(scenario, n_samples, rng)
    induced = np.zeros(n_samples)
    for sl in _row_chunks(n_samples, d.x.shape[1]):
        induced[sl] = _induced_batch(scenario.norm, _matrices(scenario, d, sl))
    vals = induced**a * d.counts.astype(float) ** (1 + a)
    total = math.fsum(vals)
    if total == 0:
        return MomentDiagnostic(0.0, True, 0.0, n_samples)
    top = math.fsum(np.sort(vals)[-max(1, n_samples // 100):])
    share = top / total
    return MomentDiagnostic(total / n_samples, bool(share <= 0.5), float(share), n_samples)
