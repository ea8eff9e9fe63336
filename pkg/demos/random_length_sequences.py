"""Random-length sums ``||A(N) X(N)||``: Breiman constant, tail ratio and
the spectral atoms of the normalised vector.

Run with ``python demos/random_length_sequences.py``.
"""

import numpy as np

from snprisk import Pareto, SequenceScenario
from snprisk.arrivals import PoissonCount
from snprisk.seqmodel import LINF, breiman_constant_mc, empirical_spectral_measure, spectral_atoms_closed

scn = SequenceScenario(Pareto(2.0), PoissonCount(3.0), norm=LINF)
rng = np.random.default_rng(3)

c = breiman_constant_mc(scn, 400_000, rng)
print(f"Breiman constant E||A||^alpha: {c.estimate:.4f} +/- {c.ci_half_width:.4f} (E[N] = 3 for the identity)")

closed = spectral_atoms_closed(scn.length)
emp = empirical_spectral_measure(scn, 200_000, rng, level=0.999, workers=4)
print(f"spectral atoms at x = {emp.threshold:.1f} ({emp.n_exceedances} exceedances)")
print(f"{'j':>3} {'closed':>8} {'empirical':>10} {'+/-':>7}")
for j in range(1, 7):
    print(f"{j:>3} {closed.probabilities[j - 1]:8.4f} {emp.weights[j - 1]:10.4f} {emp.ci_half_width[j - 1]:7.4f}")
