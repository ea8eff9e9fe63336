"""Clustering of extremes in an exponentially decaying shot noise process.

The continuous-time extremal index (closed form and large-horizon numeric
limit) is printed next to the index of the chain sampled at arrival
instants, whose closed form is checked against a blocks estimate.

Run with ``python demos/extremal_clusters.py``.
"""

import numpy as np

from snprisk import ExponentialShock, HomogeneousPoisson, Pareto, RiskScenario
from snprisk.arrivals import ExponentialLaw
from snprisk.estimators import extremal_index_blocks
from snprisk.risk import extremal_index
from snprisk.snp import kdem_chain

alpha, rate = 1.0, 1.0
rng = np.random.default_rng(5)
print(f"{'omega':>5} {'closed':>7} {'numeric':>8} {'chain':>6} {'blocks':>7}")
for omega in (0.5, 1.0, 2.0):
    scn = RiskScenario(Pareto(alpha), HomogeneousPoisson(rate), ExponentialShock(omega), 1.0)
    closed = extremal_index(scn, "paper-closed-form")
    numeric = extremal_index(scn, "numeric-limit")
    chain_theta = extremal_index(scn, "embedded-chain")
    chain = kdem_chain(omega, ExponentialLaw(rate), Pareto(alpha), 1_000_000, rng, burn_in=1000)
    blocks = extremal_index_blocks(chain, 100, level=0.999)
    print(f"{omega:5.1f} {closed:7.3f} {numeric:8.3f} {chain_theta:6.3f} {blocks:7.3f}")
