import math

import numpy as np
import pytest
from scipy import integrate, stats

from snprisk.arrivals import FixedCount, HomogeneousPoisson, PoissonCount, ScipyLaw
from snprisk.heavytail import Degenerate, DependentSequenceGen, Pareto
from snprisk.seqmodel import (
    L1,
    LINF,
    DenseIID,
    DiagonalShock,
    IdentityMatrix,
    LowerTriangularShock,
    Norm,
    SequenceScenario,
    breiman_constant_mc,
    empirical_spectral_measure,
    h4_moment_diagnostic,
    induced_matrix_norm,
    norm_eval,
    realize,
    sample_norms,
    spectral_atoms_closed,
)
from snprisk.snp import ConstantShock, ExponentialShock

L2 = Norm("lp", 2.0)


def test_norm_examples():
    assert norm_eval(L1, [1, 2, 3]) == 6
    assert norm_eval(LINF, [1, 2, 3]) == 3
    assert norm_eval(L2, [3, 4]) == pytest.approx(5.0, rel=1e-15)
    assert norm_eval(L1, [-1, 2]) == 3
    assert not L2.induced_is_exact and L1.induced_is_exact


def test_norm_rejects_bad_kinds():
    with pytest.raises(ValueError):
        Norm("l3")
    with pytest.raises(ValueError):
        Norm("lp", 1.0)


def test_induced_norm_examples():
    A = [[1, 2], [3, 4]]
    assert induced_matrix_norm(LINF, A) == 7
    assert induced_matrix_norm(L1, A) == 6
    for norm in (L1, LINF, L2):
        assert induced_matrix_norm(norm, np.eye(3)) == 1.0
        assert induced_matrix_norm(norm, np.zeros((0, 0))) == 0.0
    with pytest.raises(ValueError):
        induced_matrix_norm(L1, np.ones((2, 3)))


def test_induced_bound_dominates_true_l2_norm(rng):
    for _ in range(50):
        A = rng.random((4, 4))
        assert np.linalg.norm(A, 2) <= induced_matrix_norm(L2, A) * (1 + 1e-12)


def test_scenario_validation():
    with pytest.raises(ValueError):
        SequenceScenario(Pareto(2.0), HomogeneousPoisson(1.0))
    with pytest.raises(ValueError):
        SequenceScenario(Pareto(2.0), FixedCount(2), DiagonalShock(ConstantShock()))
    assert SequenceScenario(Pareto(1.5), FixedCount(2)).alpha == 1.5


@pytest.mark.parametrize("norm", [L1, LINF, L2])
def test_realize_single_identity(norm, rng):
    r = realize(SequenceScenario(Pareto(2.0), FixedCount(1), norm=norm), rng)
    assert r.c.shape == (1,) and r.norm == r.x[0]
    np.testing.assert_array_equal(r.matrix.toarray(), [[1.0]])


def test_realize_diagonal_and_lower_with_unit_shock(rng):
    diag = SequenceScenario(Pareto(2.0), HomogeneousPoisson(5.0), DiagonalShock(ConstantShock()), L1, 1.0)
    r = realize(diag, rng)
    assert r.norm == pytest.approx(r.x.sum(), rel=1e-14)
    low = SequenceScenario(Pareto(2.0), HomogeneousPoisson(5.0), LowerTriangularShock(ConstantShock()), LINF, 1.0)
    r = realize(low, rng)
    assert r.norm == pytest.approx(r.x.sum(), rel=1e-14)
    M = r.matrix.toarray()
    np.testing.assert_array_equal(M, np.tril(np.ones_like(M)))
    np.testing.assert_allclose(r.matrix.matvec(r.x), r.c, rtol=1e-14)


def test_realize_matrix_matches_product(rng):
    scn = SequenceScenario(Pareto(1.5), HomogeneousPoisson(4.0), LowerTriangularShock(ExponentialShock(0.8)), L1, 2.0)
    for _ in range(20):
        r = realize(scn, rng)
        if len(r.x):
            M = r.matrix.toarray()
            assert np.all(M >= 0) and np.allclose(M, np.tril(M))
            np.testing.assert_allclose(M @ r.x, r.c, rtol=1e-12)


def test_breiman_identity_is_mean_count(rng):
    est = breiman_constant_mc(SequenceScenario(Pareto(2.0), PoissonCount(10.0)), 200_000, rng)
    assert abs(est.estimate - 10.0) <= est.ci_half_width * 1.5
    assert est.n_samples == 200_000


def test_breiman_diagonal_exponential(rng):
    lam, omega, T, alpha = 2.0, 0.7, 3.0, 1.5
    scn = SequenceScenario(Pareto(alpha), HomogeneousPoisson(lam), DiagonalShock(ExponentialShock(omega)), L1, T)
    est = breiman_constant_mc(scn, 200_000, rng)
    exact = lam * (1 - math.exp(-alpha * omega * T)) / (alpha * omega)
    oracle, _ = integrate.quad(lambda s: lam * math.exp(-alpha * omega * (T - s)), 0, T)
    assert exact == pytest.approx(oracle, rel=1e-12)
    assert abs(est.estimate - exact) <= 2 * est.ci_half_width


def test_breiman_dense_constant_entry(rng):
    scn = SequenceScenario(Pareto(2.5), FixedCount(1), DenseIID(Degenerate(1.7)))
    est = breiman_constant_mc(scn, 1000, rng)
    assert est.estimate == pytest.approx(1.7**2.5, rel=1e-13) and est.ci_half_width == 0.0


def test_breiman_rejects_non_finite(rng):
    class Inf:
        def sample(self, rng, size=None):
            return np.full(size, np.inf)

    with pytest.raises(FloatingPointError):
        breiman_constant_mc(SequenceScenario(Pareto(2.0), FixedCount(2), DenseIID(Inf())), 10, rng)


def test_spectral_atoms_examples():
    three = spectral_atoms_closed(FixedCount(3))
    np.testing.assert_allclose(three.probabilities, [1 / 3] * 3, rtol=1e-15)
    assert spectral_atoms_closed(FixedCount(1)).probabilities.tolist() == [1.0]
    pois = spectral_atoms_closed(PoissonCount(2.0), j_max=3)
    oracle = [stats.poisson(2.0).sf(j - 1) / 2.0 for j in (1, 2, 3)]
    np.testing.assert_allclose(pois.probabilities, oracle, rtol=1e-12)
    np.testing.assert_allclose(pois.probabilities, [0.4323, 0.2970, 0.1617], atol=1e-4)


def test_spectral_atoms_normalise_and_decrease():
    atoms = spectral_atoms_closed(HomogeneousPoisson(3.0), horizon=2.0)
    p = atoms.probabilities
    assert math.fsum(p) + atoms.deficit == pytest.approx(1.0, abs=1e-12)
    assert atoms.deficit < 1e-10
    assert np.all(np.diff(p) <= 0)


def test_spectral_atoms_reject_empty_law():
    with pytest.raises(ValueError):
        spectral_atoms_closed(FixedCount(0))


def test_empirical_spectral_fixed_three(rng):
    scn = SequenceScenario(Pareto(2.0), FixedCount(3))
    est = empirical_spectral_measure(scn, 1_000_000, rng, level=0.999, min_exceedances=1000)
    assert est.n_exceedances >= 1000
    np.testing.assert_allclose(est.weights, [1 / 3] * 3, atol=0.05)
    assert "index,weight,ci_half_width" in est.to_csv()


def test_empirical_spectral_moment_matches_atoms(rng):
    # under l1 the sum of a few Pareto(2) terms approaches the limit slowly; linf is tight
    scn = SequenceScenario(Pareto(2.0), PoissonCount(2.0, min_count=1), norm=LINF)
    est = empirical_spectral_measure(scn, 500_000, rng, level=0.999, min_exceedances=1000)
    closed = spectral_atoms_closed(PoissonCount(2.0, min_count=1), j_max=3).probabilities
    np.testing.assert_allclose(est.moment[:3], closed, atol=0.05)


def test_empirical_spectral_single_column(rng):
    scn = SequenceScenario(Pareto(2.0), FixedCount(1), DenseIID(Degenerate(2.0)))
    est = empirical_spectral_measure(scn, 10_000, rng, threshold=10.0, min_exceedances=20)
    assert est.weights.tolist() == [1.0] and est.moment.tolist() == [1.0]


def test_empirical_spectral_budget_cap(rng):
    scn = SequenceScenario(Pareto(2.0), FixedCount(2))
    with pytest.raises(RuntimeError, match="threshold too extreme for budget"):
        empirical_spectral_measure(scn, 1000, rng, threshold=1e6, max_samples=3000)


def test_h4_fixed_count(rng):
    d = h4_moment_diagnostic(SequenceScenario(Pareto(2.0), FixedCount(4)), 0.5, 1000, rng)
    assert d.estimate == pytest.approx(4 ** 3.5, rel=1e-12) and d.stable


def test_h4_poisson_is_stable(rng):
    d = h4_moment_diagnostic(SequenceScenario(Pareto(1.5), HomogeneousPoisson(3.0), horizon=2.0), 0.5, 100_000, rng)
    # E[N^3] for Poisson(6)
    m = 6.0
    assert d.stable and d.estimate == pytest.approx(m**3 + 3 * m**2 + m, rel=0.05)


def test_h4_heavy_entries_flagged(rng):
    scn = SequenceScenario(Pareto(2.0), FixedCount(2), DenseIID(ScipyLaw(stats.pareto(0.5))))
    assert not h4_moment_diagnostic(scn, 0.5, 100_000, rng).stable


def test_sample_norms_with_dependent_marginal(rng):
    gen = DependentSequenceGen(Pareto(2.0))
    v = sample_norms(SequenceScenario(gen, FixedCount(5), norm=LINF), 1000, rng)
    assert v.shape == (1000,) and np.all(v > 0)
