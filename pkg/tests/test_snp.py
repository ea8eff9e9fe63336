import math

import numpy as np
import pytest
from scipy import stats

from snprisk.arrivals import ExponentialLaw, HomogeneousPoisson, LinearIntensity
from snprisk.heavytail import Degenerate, Pareto
from snprisk.snp import (
    ConstantShock,
    ContinuousOmega,
    DiscreteOmega,
    ExponentialShock,
    IndicatorShock,
    SnpPath,
    UserShock,
    batch_chain,
    batch_evaluate,
    batch_exceedance_integrals,
    batch_supremum,
    cramer_check,
    embedded_chain,
    evaluate,
    kdem_chain,
    path_supremum,
    path_trace,
    simulate_batch,
    simulate_path,
)

MIXED = ExponentialShock(DiscreteOmega((1.0, -1.0), (0.5, 0.5)))


def test_evaluate_examples():
    empty = SnpPath.from_arrays([], [], 1.0)
    assert evaluate(empty, ConstantShock(), 0.5) == 0.0
    one = SnpPath.from_arrays([0.5], [5.0], 1.0)
    assert evaluate(one, ExponentialShock(1.0), 1.0) == pytest.approx(5 * math.exp(-0.5), rel=1e-15)
    assert evaluate(one, ExponentialShock(1.0), 0.4) == 0.0
    two = SnpPath.from_arrays([0.1, 0.2], [2.0, 3.0], 1.0)
    assert evaluate(two, ConstantShock(1.0), 0.3) == 5.0


def test_path_length_mismatch_rejected():
    with pytest.raises(ValueError):
        SnpPath.from_arrays([0.1, 0.2], [1.0], 1.0)


def test_embedded_chain_examples(rng):
    path = simulate_path(Pareto(2.0), HomogeneousPoisson(5.0), ConstantShock(1.0), 2.0, rng)
    np.testing.assert_allclose(embedded_chain(path, ConstantShock(1.0)), np.cumsum(path.shocks))
    np.testing.assert_array_equal(embedded_chain(path, IndicatorShock()), path.shocks)
    chain = embedded_chain(path, ExponentialShock(0.7))
    gaps = np.diff(path.times)
    np.testing.assert_allclose(chain[1:], np.exp(-0.7 * gaps) * chain[:-1] + path.shocks[1:], rtol=1e-12)
    assert embedded_chain(SnpPath.from_arrays([], [], 1.0), ConstantShock()).size == 0


def test_supremum_examples():
    assert path_supremum(SnpPath.from_arrays([], [], 1.0), ConstantShock()).value == 0.0
    one = SnpPath.from_arrays([0.5], [5.0], 1.0)
    assert path_supremum(one, ExponentialShock(1.0)).value == 5.0
    grow = SnpPath.from_arrays([0.0], [1.0], 1.0)
    assert path_supremum(grow, ExponentialShock(-1.0)).value == pytest.approx(math.e, rel=1e-15)
    sk = path_supremum(grow, ExponentialShock(-1.0), mode="skeleton")
    assert sk.value == 1.0 and sk.warning is not None
    with pytest.raises(ValueError):
        path_supremum(grow, ExponentialShock(-1.0), mode="dense", dt=0.0)


def test_dense_dominates_skeleton_and_matches_for_decay(rng):
    shock = ExponentialShock(2.0)
    for _ in range(50):
        path = simulate_path(Pareto(1.5), HomogeneousPoisson(3.0), shock, 2.0, rng)
        dense = path_supremum(path, shock, "dense", dt=1e-3).value
        skel = path_supremum(path, shock, "skeleton").value
        assert dense >= skel
        # decay between grid cells is at most a factor exp(-omega dt)
        assert dense <= skel + 1e-12


def test_skeleton_terminal_is_exact_for_mixed_omega(rng):
    # sums of exponentials are convex between jumps, so no interior maximum
    for _ in range(100):
        path = simulate_path(Pareto(1.5), HomogeneousPoisson(3.0), MIXED, 2.0, rng)
        dense = path_supremum(path, MIXED, "dense", dt=2e-4).value
        exact = path_supremum(path, MIXED, "skeleton+terminal").value
        assert dense <= exact * (1 + 1e-12)
        assert dense >= exact * (1 - 1e-3)


def test_jump_structure(rng):
    for shock in (ExponentialShock(1.3), ConstantShock(2.0), MIXED):
        path = simulate_path(Pareto(2.0), HomogeneousPoisson(4.0), shock, 1.0, rng)
        for k, t in enumerate(path.times):
            before = evaluate(path, shock, np.nextafter(t, -np.inf))
            c = shock.c if isinstance(shock, ConstantShock) else 1.0
            assert evaluate(path, shock, t) - before == pytest.approx(c * path.shocks[k], rel=1e-9, abs=1e-9)


def test_constant_shock_terminal_is_l1_norm(rng):
    path = simulate_path(Pareto(1.5), HomogeneousPoisson(4.0), ConstantShock(1.0), 3.0, rng)
    assert evaluate(path, ConstantShock(1.0), 3.0) == pytest.approx(np.abs(path.shocks).sum(), rel=1e-15)


def test_kdem_chain_examples(rng):
    walk = kdem_chain(0.0, ExponentialLaw(1.0), Degenerate(2.0), 10, rng)
    np.testing.assert_allclose(walk, 2.0 * np.arange(1, 11))
    decay = kdem_chain(1.0, Degenerate(0.5), 0.0, 8, rng, y0=1.0)
    np.testing.assert_allclose(decay, np.exp(-0.5 * np.arange(1, 9)), rtol=1e-14)
    fixed = kdem_chain(1.0, math.log(2.0), 1.0, 60, rng)
    assert fixed[-1] == pytest.approx(2.0, abs=1e-12)


def test_kdem_stationarity_guard(rng):
    with pytest.raises(ValueError, match="no stationary solution"):
        kdem_chain(DiscreteOmega((1.0, -1.0), (0.5, 0.5)), 1.0, Pareto(2.0), 10, rng, burn_in=5)
    assert kdem_chain(1.0, 1.0, Pareto(2.0), 10, rng, burn_in=5).shape == (10,)


def test_kdem_chain_matches_path_chain():
    # same draws fed through the recursion and through the path evaluator
    g = np.random.default_rng(5)
    gaps = g.exponential(1.0, 30)
    x = g.pareto(1.5, 30) + 1
    path = SnpPath.from_arrays(np.cumsum(gaps), x, float(np.sum(gaps)) + 1)

    class Fixed:
        def __init__(self, v):
            self.v = v

        def sample(self, rng, size=None):
            return self.v

    chain = kdem_chain(0.8, Fixed(gaps), Fixed(x), 30, g)
    np.testing.assert_allclose(chain, embedded_chain(path, ExponentialShock(0.8)), rtol=1e-12)


@pytest.mark.parametrize("shock", [ExponentialShock(1.0), MIXED, ConstantShock(1.5), IndicatorShock(),
                                   ExponentialShock(ContinuousOmega(stats.norm(0.5, 1.0), 1000)),
                                   UserShock(lambda t, s: 1.0 / (1.0 + (t - s)), "non-increasing")])
def test_batch_matches_single_path(shock, rng):
    batch = simulate_batch(Pareto(1.5), LinearIntensity(1.0, 2.0), shock, 2.0, 300, rng)
    chains = batch_chain(batch, shock)
    sups = batch_supremum(batch, shock)
    terminal = batch_evaluate(batch, shock, 2.0)
    for p in range(len(batch)):
        path = batch.path(p)
        n = path.arrivals.count
        np.testing.assert_allclose(chains[p, :n], embedded_chain(path, shock), rtol=1e-12)
        assert sups[p] == pytest.approx(path_supremum(path, shock).value, rel=1e-12)
        assert terminal[p] == pytest.approx(evaluate(path, shock, 2.0), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("shock", [ExponentialShock(1.0), MIXED, ConstantShock(1.0)])
def test_exceedance_integrals_against_dense_grid(shock, rng):
    level = 3.0
    batch = simulate_batch(Pareto(2.0), HomogeneousPoisson(1.0), shock, 5.0, 400, rng)
    time, excess = batch_exceedance_integrals(batch, shock, level)
    for p in np.argsort(-time)[:8]:
        t, y = path_trace(batch.path(int(p)), shock, dt=1e-5)
        above = np.trapezoid((y > level).astype(float), t)
        area = np.trapezoid(np.maximum(y - level, 0.0), t)
        assert time[p] == pytest.approx(above, abs=5e-5)
        assert excess[p] == pytest.approx(area, rel=1e-4, abs=1e-6)
    assert np.all(time >= 0) and np.all(time <= 5.0)


def test_indicator_has_no_exceedance_time(rng):
    batch = simulate_batch(Pareto(1.0), HomogeneousPoisson(5.0), IndicatorShock(), 1.0, 100, rng)
    time, excess = batch_exceedance_integrals(batch, IndicatorShock(), 1.0)
    assert not time.any() and not excess.any()


def test_cramer_check():
    val, ok = cramer_check(ExponentialShock(DiscreteOmega((1.0, -1.0), (0.5, 0.5))), 1.0, 1.0)
    assert ok and val == pytest.approx(0.5 + 0.5 * math.exp(1.1), rel=1e-12)
    heavy = ExponentialShock(ContinuousOmega(stats.cauchy(0.0, 1.0), 1000))
    _, ok = cramer_check(heavy, 1.0, 1.0, rng=np.random.default_rng(1))
    assert not ok


def test_monotonicity_declarations():
    assert ExponentialShock(1.0).monotonicity == "non-increasing"
    assert ExponentialShock(-1.0).monotonicity == "non-decreasing"
    assert MIXED.monotonicity == "mixed" and MIXED.per_shock_monotone
    assert not UserShock(lambda t, s: np.sin(t - s) + 2).per_shock_monotone
    with pytest.raises(ValueError):
        UserShock(lambda t, s: t, "sideways")
