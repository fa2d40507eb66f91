"""Projection-free online convex optimization toolkit.

Learners that touch the feasible set only through a linear optimization
oracle (full-information and bandit online Frank-Wolfe), exact
projection-based baselines, closed-form set oracles, and a harness that
checks the learners' per-step guarantees and regret certificates.
"""

from . import baselines, fw_solver, geometry, losses, objective, ofw_bandit, ofw_full, rng
from ._backend import backend_name

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "baselines",
    "fw_solver",
    "geometry",
    "losses",
    "objective",
    "ofw_bandit",
    "ofw_full",
    "rng",
]
