"""Shared tolerance configuration.

All thresholds in the package are relative: rank decisions compare singular
values against ``rank_rel`` times the largest one, commutator residuals are
measured in Frobenius norm, and so on. The defaults below are the documented
per-operation values; :func:`set_tolerances` installs a replacement record
(the command line exposes this through ``--tol``, which rescales every
threshold so that the rank cutoff equals the requested value).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

_BASE_RANK_REL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    rank_rel: float = 1e-10      # singular values below rank_rel * s_max count as zero
    unitarity: float = 1e-10     # ||U^dag U - I||_F / sqrt(dim)
    hermiticity: float = 1e-10   # ||A - A^dag||_F relative to ||A||_F
    support: float = 1e-10       # state weight allowed outside a declared subspace
    commutator: float = 1e-8     # Frobenius residual of commutators / subspace overlaps
    eig_gap: float = 1e-8        # minimum relative eigenvalue separation in validators
    scalar_dev: float = 1e-6     # distance from scalar multiples of the identity
    prob_slack: float = 1e-12    # snapping slack for probabilities near 0 and 1
    branch_cut: float = 1e-9     # guard band above the -pi eigenphase branch cut
    max_dim: int = 4096          # cap on the total Hilbert-space dimension

    def scaled(self, rank_rel: float) -> "Tolerances":
        """Return a record with every threshold rescaled by rank_rel / default."""
        factor = float(rank_rel) / _BASE_RANK_REL
        updates = {
            field.name: getattr(self, field.name) * factor
            for field in dataclasses.fields(self)
            if field.name != "max_dim"
        }
        return dataclasses.replace(self, **updates)


_active = Tolerances()


def get_tolerances() -> Tolerances:
    """Return the tolerance record currently in force."""
    return _active


def set_tolerances(tol: Tolerances) -> Tolerances:
    """Install ``tol`` as the active record; returns the previous one."""
    global _active
    previous = _active
    _active = tol
    return previous
