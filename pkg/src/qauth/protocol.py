"""Authentication pipeline: space layout, tagging, encoding, verification.

The message space (dimension M) and tag space (dimension T) combine into the
total space of dimension E = M * T. A subspace of valid tags (dimension v)
singles out the code space of valid tagged messages, of dimension C = M * v;
its complement has dimension D = M * (T - v). All operators in this package
live in a *canonical* basis ordering in which the code space occupies the
first C coordinates, so the projector onto it is diag(I_C, 0) and every block
computation is submatrix slicing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import get_tolerances
from .errors import (
    DimensionError,
    DomainError,
    InvalidTagError,
    KeyIndexError,
    LayoutError,
)
from .linalg import as_complex_matrix, dagger, is_unitary

__all__ = [
    "BlockDecomposition",
    "CodingSet",
    "SpaceLayout",
    "VerifyResult",
    "canonical_basis_permutation",
    "check_density",
    "decode",
    "encode",
    "io_decompose",
    "maximally_mixed",
    "pure_density",
    "tag_message",
    "transformed_projector",
    "verify",
]


@dataclass(frozen=True)
class SpaceLayout:
    """Dimensions of the message, tag and valid-tag spaces.

    Derived quantities: code dimension C = m_dim * v_dim, complement dimension
    D = m_dim * (t_dim - v_dim), total dimension E = C + D. The ratios
    q = D / C and p = E / C are exposed when they are integers (several
    constructions require that).
    """

    m_dim: int
    t_dim: int
    v_dim: int

    def __post_init__(self):
        if self.m_dim < 2:
            raise LayoutError("message dimension must be at least 2")
        if self.t_dim < 2:
            raise LayoutError("tag dimension must be at least 2")
        if not 1 <= self.v_dim < self.t_dim:
            raise LayoutError(
                "valid-tag dimension must satisfy 1 <= v_dim < t_dim"
            )
        if self.e_dim > get_tolerances().max_dim:
            raise DimensionError(
                f"total dimension {self.e_dim} exceeds the cap of "
                f"{get_tolerances().max_dim}"
            )

    @property
    def c_dim(self) -> int:
        return self.m_dim * self.v_dim

    @property
    def d_dim(self) -> int:
        return self.m_dim * (self.t_dim - self.v_dim)

    @property
    def e_dim(self) -> int:
        return self.m_dim * self.t_dim

    @property
    def q(self) -> int | None:
        """D / C when integer, else None."""
        c, d = self.c_dim, self.d_dim
        return d // c if d % c == 0 else None

    @property
    def p(self) -> int | None:
        """E / C when integer, else None."""
        c, e = self.c_dim, self.e_dim
        return e // c if e % c == 0 else None

    @property
    def c_exceeds_d(self) -> bool:
        """Flagged (not forbidden) at construction; the validators reject it."""
        return self.c_dim > self.d_dim


def canonical_basis_permutation(layout: SpaceLayout) -> np.ndarray:
    """Permutation from the natural product basis to the canonical ordering.

    The product basis enumerates message index times tag index with the tag
    fastest; entry ``perm[i]`` is the product-basis index of the i-th
    canonical vector. Valid-tag coordinates come first (in product order), so
    the first C canonical coordinates span the code space.
    """
    m, t, v = layout.m_dim, layout.t_dim, layout.v_dim
    indices = np.arange(m * t)
    valid = indices[indices % t < v]
    invalid = indices[indices % t >= v]
    return np.concatenate([valid, invalid])


def _to_canonical(layout: SpaceLayout, a: np.ndarray) -> np.ndarray:
    perm = canonical_basis_permutation(layout)
    return a[np.ix_(perm, perm)]


def check_density(rho, dim: int | None = None, tol: float | None = None) -> np.ndarray:
    """Validate a density operator: Hermitian, PSD, unit trace (all within tol)."""
    rho = as_complex_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionError("density operator must be square")
    if dim is not None and rho.shape[0] != dim:
        raise DimensionError(
            f"density operator has dimension {rho.shape[0]}, expected {dim}"
        )
    tol = get_tolerances().hermiticity if tol is None else tol
    scale = max(1.0, float(np.linalg.norm(rho)))
    if np.linalg.norm(rho - dagger(rho)) > tol * scale:
        raise DomainError("density operator is not Hermitian within tolerance")
    eigenvalues = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
    if eigenvalues.size and eigenvalues[0] < -tol:
        raise DomainError(
            f"density operator has negative eigenvalue {eigenvalues[0]:.3e}"
        )
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError(f"density operator has trace {np.trace(rho):.12g}, not 1")
    return rho


def pure_density(vec) -> np.ndarray:
    """Density operator of a pure state (the vector is normalized first)."""
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DomainError("cannot normalize the zero vector")
    v = v / norm
    return np.outer(v, v.conj())


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128) / dim


class CodingSet:
    """An ordered family of K unitaries on the total space, the first being I.

    The arrays are defensively copied and frozen, so a coding set can be
    shared across concurrent analyses.
    """

    def __init__(self, layout: SpaceLayout, unitaries):
        mats = []
        for u in unitaries:
            m = as_complex_matrix(u).copy()
            m.setflags(write=False)
            mats.append(m)
        if not mats:
            raise DomainError("coding set needs at least one unitary")
        e = layout.e_dim
        for index, u in enumerate(mats):
            if u.shape != (e, e):
                raise DimensionError(
                    f"unitary {index} has shape {u.shape}, expected ({e}, {e})"
                )
            if not is_unitary(u):
                raise DomainError(f"member {index} is not unitary within tolerance")
        if not np.array_equal(mats[0], np.eye(e, dtype=np.complex128)):
            raise DomainError("the first coding unitary must be exactly the identity")
        self.layout = layout
        self.unitaries = tuple(mats)

    @property
    def k_count(self) -> int:
        return len(self.unitaries)

    def unitary(self, k: int) -> np.ndarray:
        if not 0 <= k < self.k_count:
            raise KeyIndexError(f"key {k} outside 0..{self.k_count - 1}")
        return self.unitaries[k]

    def __repr__(self) -> str:
        l = self.layout
        return (
            f"CodingSet(m={l.m_dim}, t={l.t_dim}, v={l.v_dim}, K={self.k_count})"
        )


@dataclass(frozen=True)
class BlockDecomposition:
    """The four blocks of an operator split along code space / complement."""

    ii: np.ndarray
    io: np.ndarray
    oi: np.ndarray
    oo: np.ndarray

    def assemble(self) -> np.ndarray:
        return np.block([[self.ii, self.io], [self.oi, self.oo]])


def io_decompose(layout: SpaceLayout, a) -> BlockDecomposition:
    """Split an E x E operator into its ii / io / oi / oo blocks."""
    a = as_complex_matrix(a)
    e, c = layout.e_dim, layout.c_dim
    if a.shape != (e, e):
        raise DimensionError(f"operator has shape {a.shape}, expected ({e}, {e})")
    return BlockDecomposition(
        ii=a[:c, :c], io=a[:c, c:], oi=a[c:, :c], oo=a[c:, c:]
    )


def tag_message(layout: SpaceLayout, rho_m, rho_t) -> np.ndarray:
    """Append the tag: returns rho_m (x) rho_t in the canonical ordering.

    The tag state must be supported in the valid-tag subspace; leakage beyond
    the support tolerance raises :class:`InvalidTagError`.
    """
    rho_m = check_density(rho_m, layout.m_dim)
    rho_t = check_density(rho_t, layout.t_dim)
    leak = float(np.real(np.trace(rho_t[layout.v_dim:, layout.v_dim:])))
    if leak > get_tolerances().support:
        raise InvalidTagError(
            f"tag state has weight {leak:.3e} outside the valid-tag subspace"
        )
    product = np.kron(rho_m, rho_t)
    return _to_canonical(layout, product)


def encode(cs: CodingSet, rho, k: int) -> np.ndarray:
    """Conjugate by the k-th coding unitary."""
    u = cs.unitary(k)
    rho = check_density(rho, cs.layout.e_dim)
    return u @ rho @ dagger(u)


def decode(cs: CodingSet, rho, k: int) -> np.ndarray:
    """Conjugate by the adjoint of the k-th coding unitary."""
    u = cs.unitary(k)
    rho = check_density(rho, cs.layout.e_dim)
    return dagger(u) @ rho @ u


def transformed_projector(cs: CodingSet, k: int) -> np.ndarray:
    """Projector onto the image of the code space under the k-th unitary."""
    u = cs.unitary(k)
    b = u[:, : cs.layout.c_dim]
    return b @ dagger(b)


class VerifyResult(NamedTuple):
    accept_prob: float
    accepted_state: np.ndarray | None
    plaintext: np.ndarray | None


def verify(layout: SpaceLayout, rho_decoded) -> VerifyResult:
    """Measure the tag: acceptance probability and post-measurement plaintext.

    The acceptance probability is the weight of the decoded state on the code
    space (snapped to exactly 0 or 1 within the probability slack). On
    acceptance the state is projected, renormalized, and the tag factor is
    traced out to recover the plaintext.
    """
    rho = check_density(rho_decoded, layout.e_dim)
    c = layout.c_dim
    slack = get_tolerances().prob_slack
    p = float(np.real(np.trace(rho[:c, :c])))
    p = min(max(p, 0.0), 1.0)
    if p > 1.0 - slack:
        p = 1.0
    elif p < slack:
        p = 0.0
    if p == 0.0:
        return VerifyResult(0.0, None, None)
    block = rho[:c, :c] / p
    accepted = np.zeros_like(rho)
    accepted[:c, :c] = block
    m, v = layout.m_dim, layout.v_dim
    plaintext = np.einsum("avbv->ab", block.reshape(m, v, m, v))
    return VerifyResult(p, accepted, plaintext)
