"""Single source of truth for numerical tolerances.

Every module reads its defaults from DEFAULT rather than hard-coding
magic numbers, so acceptance thresholds live in exactly one place.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-9      # constraint satisfaction in LPs / certificates
    root_residual: float = 1e-10   # |f(r)| bound for reported polynomial roots
    ratio: float = 1e-6            # ratio reporting precision
    mass: float = 1e-12            # probability normalization
    duality_gap: float = 1e-7      # |primal - dual| for optimal LP solves


DEFAULT = Tolerances()
