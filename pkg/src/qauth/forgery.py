"""Eve's forgery attack: replacing the in-transit state with her own.

A forged state is accepted for every key exactly when its code-space block
lies in the intersection of the kernels of the io-adjoint blocks of all
non-trivial coding unitaries. When that intersection is trivial, the best Eve
can do is the top eigenvector of the summed transformed projectors, which
bounds her average success probability by the largest eigenvalue over K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import get_tolerances
from .errors import DegenerateFamilyError, DimensionError
from .linalg import dagger, eigh, rank_and_kernel
from .protocol import CodingSet, SpaceLayout, check_density, io_decompose, transformed_projector

__all__ = [
    "ForgeryReport",
    "embed_in_code",
    "forgery_kernel",
    "optimal_forgery",
    "p_forge",
]


def embed_in_code(layout: SpaceLayout, rho_ii) -> np.ndarray:
    """Lift a density operator on the code space to the full space.

    Any state accepted for every key necessarily has this form (code-space
    block, zeros elsewhere); the helper builds it without enforcing it on the
    scoring functions, so near-miss forgeries can be evaluated too.
    """
    rho_ii = check_density(rho_ii, layout.c_dim)
    e, c = layout.e_dim, layout.c_dim
    out = np.zeros((e, e), dtype=np.complex128)
    out[:c, :c] = rho_ii
    return out


def forgery_kernel(cs: CodingSet) -> np.ndarray:
    """Orthonormal basis of code-space vectors accepted under every key.

    Stacks the io-adjoint blocks of all non-trivial unitaries and returns the
    kernel of the stack; an empty basis (shape C x 0) means no deterministic
    forgery exists. Refuses single-element families: with only the public rule
    the whole code space is trivially forgeable.
    """
    if cs.k_count < 2:
        raise DegenerateFamilyError(
            "forgery analysis needs K >= 2; a single public rule protects nothing"
        )
    layout = cs.layout
    maps = []
    for k in range(1, cs.k_count):
        u_io = io_decompose(layout, cs.unitary(k)).io
        maps.append(dagger(u_io))
    stacked = np.vstack(maps)
    _, kernel = rank_and_kernel(stacked)
    return kernel


def p_forge(cs: CodingSet, rho_e) -> float:
    """Average acceptance probability of a forged state over all keys."""
    rho = check_density(rho_e, cs.layout.e_dim)
    total = 0.0
    for k in range(cs.k_count):
        total += float(np.real(np.trace(transformed_projector(cs, k) @ rho)))
    value = total / cs.k_count
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class ForgeryReport:
    """Outcome of the forgery optimization for one coding set.

    ``optimal_p_forge`` equals the top eigenvalue of the summed transformed
    projectors divided by K, attained by ``optimal_state``. A nonempty
    ``kernel_basis`` certifies a deterministic forgery; ``top_multiplicity``
    reports how degenerate the maximizer is.
    """

    kernel_basis: np.ndarray
    perfect_forgery_exists: bool
    optimal_state: np.ndarray
    optimal_p_forge: float
    top_multiplicity: int


def optimal_forgery(cs: CodingSet) -> ForgeryReport:
    """Maximize the forgery success probability over all states."""
    kernel = forgery_kernel(cs)
    total = np.zeros((cs.layout.e_dim,) * 2, dtype=np.complex128)
    for k in range(cs.k_count):
        total += transformed_projector(cs, k)
    dec = eigh(total)
    top = float(dec.eigenvalues[-1])
    gap_tol = get_tolerances().eig_gap * max(1.0, abs(top))
    multiplicity = int(np.count_nonzero(dec.eigenvalues > top - gap_tol))
    vec = dec.eigenvectors[:, -1]
    state = np.outer(vec, vec.conj())
    value = min(max(top / cs.k_count, 0.0), 1.0)
    return ForgeryReport(
        kernel_basis=kernel,
        perfect_forgery_exists=kernel.shape[1] > 0,
        optimal_state=state,
        optimal_p_forge=value,
        top_multiplicity=multiplicity,
    )
