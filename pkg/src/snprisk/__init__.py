"""Heavy-tailed shot noise processes and random-length sequences.

Simulation, closed-form asymptotic risk constants and Monte Carlo checks for
``Y(t) = sum_{T_i <= t} X_i h_i(t, T_i)`` and ``C(N) = A(N) X(N)`` with
regularly varying shocks.
"""

__version__ = "0.1.0"

from .heavytail import DependentSequenceGen, Pareto, UserTail  # noqa: E402
from .arrivals import HomogeneousPoisson, InhomogeneousPoisson, Renewal  # noqa: E402
from .snp import ConstantShock, ExponentialShock, IndicatorShock, UserShock  # noqa: E402
from .risk import RiskScenario, mc_indicator  # noqa: E402
from .seqmodel import Norm, SequenceScenario  # noqa: E402

__all__ = [
    "Pareto",
    "UserTail",
    "DependentSequenceGen",
    "HomogeneousPoisson",
    "InhomogeneousPoisson",
    "Renewal",
    "ConstantShock",
    "ExponentialShock",
    "IndicatorShock",
    "UserShock",
    "RiskScenario",
    "mc_indicator",
    "Norm",
    "SequenceScenario",
]
