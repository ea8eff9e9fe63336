import json
import math

import numpy as np
import pytest
from scipy import integrate, stats

from snprisk.arrivals import (
    ExponentialLaw,
    HomogeneousPoisson,
    LinearIntensity,
    PiecewiseConstantIntensity,
    Renewal,
    ScipyLaw,
)
from snprisk.heavytail import Pareto
from snprisk.risk import (
    NotAvailable,
    RiskScenario,
    closed_form,
    content_hash,
    es_constant,
    etot_limit,
    extremal_index,
    ies_constant,
    kdem_constants,
    mc_indicator,
    numeric_limit_trace,
    risk_report,
    ruin_constant,
    tail_constant,
)
from snprisk.snp import ConstantShock, ContinuousOmega, DiscreteOmega, ExponentialShock, IndicatorShock, UserShock

E = math.e


def kdem(omega, alpha=1.0, lam=1.0, T=1.0):
    return RiskScenario(Pareto(alpha), HomogeneousPoisson(lam), ExponentialShock(omega), T)


def test_tail_constant_examples():
    assert tail_constant(kdem(1.0)) == pytest.approx(1 - 1 / E, rel=1e-12)
    scn = RiskScenario(Pareto(1.5), LinearIntensity(1.0, 2.0), ConstantShock(2.0), 3.0)
    assert tail_constant(scn) == pytest.approx(2.0**1.5 * (3.0 + 9.0), rel=1e-12)
    assert tail_constant(RiskScenario(Pareto(2.0), HomogeneousPoisson(1.0), IndicatorShock(), 1.0)) == 0.0


def test_tail_constant_quadrature_oracle():
    # density of V0 on [0, T] is lambda(s) / m(T) for linear intensity
    a, b, T, w, alpha = 0.5, 1.5, 2.0, 0.8, 1.3
    scn = RiskScenario(Pareto(alpha), LinearIntensity(a, b), ExponentialShock(w), T)
    oracle, _ = integrate.quad(lambda s: (a + b * s) * math.exp(-alpha * w * (T - s)), 0, T, epsrel=1e-12)
    assert tail_constant(scn) == pytest.approx(oracle, rel=1e-9)


def test_piecewise_intensity_breakpoints():
    scn = RiskScenario(Pareto(2.0), PiecewiseConstantIntensity((0.0, 0.5), (1.0, 3.0)), ExponentialShock(1.0), 1.0)
    exact = (math.exp(-1.0) - math.exp(-2.0)) / 2 + 3 * (1 - math.exp(-1.0)) / 2
    assert tail_constant(scn) == pytest.approx(exact, rel=1e-10)


def test_ruin_constant_examples():
    assert ruin_constant(RiskScenario(Pareto(1.5), HomogeneousPoisson(1.0), ConstantShock(1.0), 10.0)) == pytest.approx(10.0)
    assert ruin_constant(kdem(1.0)) == pytest.approx(1.0, rel=1e-12)
    assert ruin_constant(kdem(-1.0)) == pytest.approx(E - 1, rel=1e-12)
    # non-decreasing shocks: ruin and tail coincide
    assert ruin_constant(kdem(-0.5)) == pytest.approx(tail_constant(kdem(-0.5)), rel=1e-12)


def test_ruin_constant_mixed_sign():
    omega = DiscreteOmega((2.0, -1.0), (0.3, 0.7))
    T, lam = 1.5, 2.0
    expect = lam * (T * 0.3 + 0.7 * (math.exp(T) - 1))
    assert ruin_constant(kdem(omega, lam=lam, T=T)) == pytest.approx(expect, rel=1e-10)


def test_es_constant_examples():
    assert es_constant(kdem(1.0, alpha=2.0)) == pytest.approx(1 - math.exp(-2), rel=1e-12)
    scn = RiskScenario(Pareto(3.0), HomogeneousPoisson(2.0), ConstantShock(1.0), 1.5)
    assert es_constant(scn) == pytest.approx(1.5 * 2.0 * 1.5, rel=1e-12)
    assert es_constant(kdem(1.0, alpha=2.0, T=1e-9)) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(ValueError, match="infinite mean"):
        es_constant(kdem(1.0, alpha=1.0))


def test_ies_constant_examples():
    assert kdem_constants(1.0, 1.0, 1.0, 1.0, gamma=2.0)["ies"] == pytest.approx(2 / E, rel=1e-12)
    # gamma = 2 for Pareto(2, 1)
    assert ies_constant(kdem(1.0, alpha=2.0)) == pytest.approx((1 + math.exp(-2)) / 2, rel=1e-10)
    scn = RiskScenario(Pareto(2.0), HomogeneousPoisson(1.5), ConstantShock(1.0), 2.0)
    assert ies_constant(scn) == pytest.approx(2.0 * 1.5 * 4.0 / 2, rel=1e-12)
    assert ies_constant(kdem(1.0, alpha=2.0, T=1e-9)) == pytest.approx(0.0, abs=1e-12)


def test_etot_examples():
    assert etot_limit(kdem(1.0)) == pytest.approx(1 / E, rel=1e-10)
    assert etot_limit(RiskScenario(Pareto(1.5), HomogeneousPoisson(1.0), IndicatorShock(), 1.0)) == 0.0
    assert etot_limit(RiskScenario(Pareto(1.5), HomogeneousPoisson(2.0), ConstantShock(1.0), 4.0)) == pytest.approx(2.0)


def test_etot_undefined_without_ruin():
    null = UserShock(lambda t, s: 0.0 * (t - s), "non-increasing")
    scn = RiskScenario(Pareto(1.5), HomogeneousPoisson(1.0), null, 1.0)
    with pytest.raises(ValueError, match="ruin constant is zero"):
        etot_limit(scn)


@pytest.mark.parametrize("omega", [1.0, -1.0, 0.0, 2.5, DiscreteOmega((1.0, -0.5, 3.0), (0.2, 0.5, 0.3))])
@pytest.mark.parametrize("alpha", [1.5, 2.0])
def test_general_route_matches_kdem_plug_in(omega, alpha):
    lam, T = 1.7, 1.3
    scn = kdem(omega, alpha, lam, T)
    ref = kdem_constants(omega, alpha, lam, T, gamma=scn.marginal.gamma)
    for ind, val in ref.items():
        assert closed_form(scn, ind) == pytest.approx(val, rel=1e-10), ind


def test_ratio_identity_for_decreasing_user_shock():
    h = lambda t, s: 1.0 / (1.0 + (t - s)) ** 2
    alpha, T, lam = 1.5, 2.0, 1.0
    scn = RiskScenario(Pareto(alpha), HomogeneousPoisson(lam), UserShock(h, "non-increasing"), T)
    num, _ = integrate.quad(lambda s: h(T, s) ** alpha / T, 0, T, epsrel=1e-12)
    assert tail_constant(scn) / ruin_constant(scn) == pytest.approx(num / 1.0, rel=1e-8)


def test_not_available_cases():
    renewal = RiskScenario(Pareto(2.0), Renewal(ExponentialLaw(1.0)), ExponentialShock(1.0), 1.0)
    with pytest.raises(NotAvailable):
        tail_constant(renewal)
    assert closed_form(renewal, "ruin") is None
    wiggly = RiskScenario(Pareto(2.0), HomogeneousPoisson(1.0), UserShock(lambda t, s: 2 + np.sin(t - s)), 1.0)
    assert closed_form(wiggly, "ruin") is None
    assert closed_form(wiggly, "tail-ratio") is not None
    cauchy = kdem(ContinuousOmega(stats.cauchy(0.0, 1.0), 2000))
    assert closed_form(cauchy, "tail-ratio") is None
    with pytest.raises(ValueError):
        closed_form(kdem(1.0), "bogus")


def test_extremal_index_examples():
    scn = kdem(1.0, alpha=2.0)
    assert extremal_index(scn, "numeric-limit") == pytest.approx(2.0, rel=0.02)
    assert extremal_index(scn, "paper-closed-form") == 2.0
    assert extremal_index(kdem(1.0), "embedded-chain") == pytest.approx(0.5, rel=1e-15)
    assert extremal_index(kdem(0.0), "paper-closed-form") == 0.0
    ind = RiskScenario(Pareto(2.0), HomogeneousPoisson(1.0), IndicatorShock(), 1.0)
    assert extremal_index(ind, "paper-closed-form") == math.inf
    assert extremal_index(ind, "numeric-limit") == math.inf
    assert extremal_index(kdem(-1.0, alpha=1.5), "paper-closed-form") == 1.5


def test_extremal_index_embedded_chain_renewal():
    scn = RiskScenario(Pareto(1.0), Renewal(ScipyLaw(stats.gamma(2.0, scale=0.5))), ExponentialShock(1.0), 1.0)
    # 1 - E[exp(-dT)] for Gamma(2, 1/2)
    assert extremal_index(scn, "embedded-chain") == pytest.approx(1 - (1 / 1.5) ** 2, rel=1e-6)


def test_extremal_index_random_omega_two_readings():
    omega = DiscreteOmega((0.5, 2.0), (0.5, 0.5))
    scn = kdem(omega, alpha=1.0)
    numeric = extremal_index(scn, "numeric-limit", T_grid=(20.0, 40.0, 80.0, 160.0))
    closed = extremal_index(scn, "paper-closed-form")
    assert numeric == pytest.approx(1.0 / (0.5 * (1 / 0.5 + 1 / 2.0)), rel=0.02)
    assert closed == pytest.approx((0.5 * 0.25 + 0.5 * 4) / 1.25, rel=1e-12)
    assert abs(numeric - closed) > 0.5


def test_numeric_limit_failure_carries_trace():
    with pytest.raises(ArithmeticError, match="T=10"):
        extremal_index(kdem(0.05), "numeric-limit")
    Ts, theta, diag = numeric_limit_trace(kdem(1.0, alpha=2.0))
    assert len(Ts) == len(theta) == len(diag) == 4


@pytest.mark.parametrize("w", [0.3, 1.0, 3.0])
@pytest.mark.parametrize("alpha", [0.8, 1.5, 3.0])
@pytest.mark.parametrize("T", [0.5, 2.0, 7.0])
def test_ordering_and_etot_bounds(w, alpha, T):
    scn = kdem(w, alpha, 1.3, T)
    assert tail_constant(scn) <= ruin_constant(scn)
    assert 0.0 <= etot_limit(scn) <= T


def test_mc_constant_shock_ruin(rng):
    scn = RiskScenario(Pareto(1.5), HomogeneousPoisson(1.0), ConstantShock(1.0), 10.0)
    x = float(scn.marginal.isf(1e-3))
    e = mc_indicator(scn, "ruin", x, 200_000, rng)
    assert e.closed_form_constant == pytest.approx(10.0)
    assert e.ci_low <= e.mc_estimate <= e.ci_high and e.ci_half_width > 0
    assert 8.0 < e.mc_estimate < 22.0


def test_mc_all_paths_ruin(rng):
    scn = RiskScenario(Pareto(2.0), HomogeneousPoisson(50.0), ConstantShock(1.0), 1.0)
    x = 1e-3
    e = mc_indicator(scn, "ruin", x, 500, rng)
    assert e.mc_estimate == pytest.approx(1.0 / scn.marginal.survival(x))


def test_mc_single_path_ci(rng):
    scn = kdem(1.0, alpha=2.0)
    e = mc_indicator(scn, "tail-ratio", 3.0, 1, rng)
    assert e.ci_low == 0.0 and e.ci_high == pytest.approx(1.0 / scn.marginal.survival(3.0))


def test_mc_zero_exceedances_flagged(rng):
    e = mc_indicator(kdem(1.0, alpha=2.0), "es", 1e9, 100, rng)
    assert e.flagged and e.n_exceedances == 0 and e.ci_half_width == math.inf


def test_mc_terminal_and_sup_agree_for_increasing_shock(rng):
    scn = kdem(-1.0, alpha=2.0)
    x = float(scn.marginal.isf(1e-3))
    a = mc_indicator(scn, "tail-ratio", x, 100_000, np.random.default_rng(3))
    b = mc_indicator(scn, "ruin", x, 100_000, np.random.default_rng(3))
    assert a.mc_estimate == b.mc_estimate


def test_conditional_matches_plain_at_moderate_threshold(rng):
    scn = kdem(1.0, alpha=1.5, lam=2.0, T=1.0)
    x = float(scn.marginal.isf(1e-2))
    plain = mc_indicator(scn, "tail-ratio", x, 200_000, rng)
    cond = mc_indicator(scn, "tail-ratio", x, 200_000, rng, method="conditional")
    assert cond.method == "conditional"
    assert abs(plain.mc_estimate - cond.mc_estimate) <= 3 * math.hypot(plain.ci_half_width, cond.ci_half_width) / 1.96
    assert cond.ci_half_width < plain.ci_half_width


def test_mc_rejects_bad_input(rng):
    with pytest.raises(ValueError):
        mc_indicator(kdem(1.0), "tail-ratio", -1.0, 10, rng)
    with pytest.raises(ValueError):
        mc_indicator(kdem(1.0), "tail-ratio", 1.0, 0, rng)
    with pytest.raises(ValueError):
        mc_indicator(kdem(1.0), "ruin", 1.0, 10, rng, method="conditional")


def test_report_serialisation(rng):
    scn = kdem(1.0, alpha=2.0)
    rep = risk_report(scn, ["tail-ratio", "ruin", "es", "ies", "etot"], 5.0, 2000, rng)
    rep.config = {"alpha": 2.0}
    rep.seed = 7
    d = json.loads(rep.to_json())
    assert [e["indicator"] for e in d["entries"]] == ["tail-ratio", "ruin", "es", "ies", "etot"]
    assert d["input_hash"] == content_hash({"config": {"alpha": 2.0}, "seed": 7})
    assert all(e.ci_half_width >= 0 and e.mc_estimate >= 0 for e in rep.entries)
    assert rep.to_csv().splitlines()[0].startswith("indicator,closed_form_constant")


def test_content_hash_is_canonical():
    assert content_hash({"a": 1, "b": [1.0, math.inf]}) == content_hash({"b": [1.0, math.inf], "a": 1})
    assert content_hash({"a": 1}) != content_hash({"a": 2})


@pytest.mark.parametrize("omega", [1.0, -1.0, DiscreteOmega((1.0, -1.0), (0.5, 0.5))])
@pytest.mark.parametrize("indicator", ["es", "ies"])
def test_conditional_severity_matches_plain(omega, indicator):
    scn = kdem(omega, alpha=2.5, lam=1.5)
    x = float(scn.marginal.isf(0.05))
    plain = mc_indicator(scn, indicator, x, 200_000, np.random.default_rng(11))
    cond = mc_indicator(scn, indicator, x, 200_000, np.random.default_rng(12), method="conditional")
    assert abs(plain.mc_estimate - cond.mc_estimate) <= 3 * math.hypot(plain.ci_half_width, cond.ci_half_width) / 1.96
    assert cond.ci_half_width < plain.ci_half_width


def test_conditional_ies_time_rule_against_fine_grid():
    from snprisk.risk import _conditional_values, _largest_shock_terms
    from snprisk.snp import simulate_batch

    scn = kdem(DiscreteOmega((1.0, -1.0), (0.5, 0.5)), alpha=2.0, lam=3.0)
    batch = simulate_batch(scn.marginal, scn.counting, scn.shock, 1.0, 40, np.random.default_rng(2))
    x = 5.0
    got = _conditional_values(batch, scn, x, "excess", over_time=True)
    grid = np.linspace(0.0, 1.0, 100_001)
    for p in range(len(batch)):
        k = int(batch.counts[p])
        if k == 0:
            assert got[p] == 0.0
            continue
        vals = _largest_shock_terms(scn, x, batch.times[p:p + 1, :k], batch.shocks[p:p + 1, :k],
                                    batch.params[p:p + 1, :k], grid[None, :], "excess")[0]
        assert got[p] == pytest.approx(np.trapezoid(vals, grid), rel=1e-3)


def test_conditional_severity_is_exact_for_single_shock(rng):
    # one arrival at s: E[(a X - x)_+] = a * gamma * Fbar^I(x / a)
    from snprisk.risk import _conditional_values
    from snprisk.snp import PathBatch

    scn = kdem(1.0, alpha=2.0)
    s, x = 0.3, 4.0
    batch = PathBatch(np.array([[s]]), np.array([[7.0]]), None, np.array([1]), 1.0)
    a = math.exp(-(1.0 - s))
    got = _conditional_values(batch, scn, x, "excess", over_time=False)[0]
    assert got == pytest.approx(a * 2.0 * scn.marginal.integrated_tail_survival(x / a), rel=1e-13)
