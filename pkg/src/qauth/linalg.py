"""Dense complex-matrix primitives on which every other module is built.

Everything works on plain ``numpy`` arrays of ``complex128``. Subspaces are
always handed around as matrices whose columns form an orthonormal basis
(never as projectors alone), so kernel intersections reduce to stacking the
constraint maps and calling :func:`rank_and_kernel` once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import get_tolerances
from .errors import (
    DegenerateBranchError,
    DimensionError,
    DomainError,
    NumericError,
)

__all__ = [
    "SpectralDecomposition",
    "SvdResult",
    "as_complex_matrix",
    "dagger",
    "eigh",
    "haar_unitary",
    "is_unitary",
    "principal_log_and_exp",
    "rank_and_kernel",
    "svd",
    "tensor_product",
]

# Width of the snap window just below the -pi branch cut. Eigenvalues of an
# exactly representable unitary (e.g. a permutation matrix) can land on either
# side of the cut by one rounding error; phases this close are folded onto +pi
# instead of rejected.
_BRANCH_SNAP = 1e-12


def as_complex_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-d complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got an array of rank {m.ndim}")
    if m.size and not np.isfinite(m).all():
        raise DomainError("matrix entries must be finite")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def is_unitary(u: np.ndarray, tol: float | None = None) -> bool:
    """Whether ``||u^dag u - I||_F <= tol * sqrt(dim)`` for square ``u``."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    tol = get_tolerances().unitarity if tol is None else tol
    n = u.shape[0]
    return bool(np.linalg.norm(dagger(u) @ u - np.eye(n)) <= tol * np.sqrt(n))


def tensor_product(a, b, max_dim: int | None = None) -> np.ndarray:
    """Kronecker product with the row convention ``i_a * rows(b) + i_b``.

    Raises :class:`DimensionError` when either output dimension would exceed
    the configured cap (default 4096).
    """
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    max_dim = get_tolerances().max_dim if max_dim is None else max_dim
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > max_dim or cols > max_dim:
        raise DimensionError(
            f"tensor product would be {rows} x {cols}, beyond the cap of {max_dim}"
        )
    return np.kron(a, b)


def _haar_from_rng(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary drawn from an existing generator."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0  # measure-zero guard
    # Multiplying column j by the phase of r[j, j] makes the factorization
    # unique and the distribution Haar.
    q = q * (d / np.abs(d))
    return q


def _normalize_seed(seed: int) -> int:
    """Map a signed 64-bit seed onto the non-negative range numpy accepts."""
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def haar_unitary(dim: int, seed: int) -> np.ndarray:
    """Deterministic Haar-random unitary of size ``dim``.

    QR-factorizes a matrix of independent standard complex Gaussians and fixes
    the phases from the diagonal of R. Bit-identical output for equal
    ``(dim, seed)``.
    """
    if dim < 1:
        raise DimensionError("dimension must be at least 1")
    rng = np.random.default_rng(_normalize_seed(seed))
    return _haar_from_rng(dim, rng)


@dataclass(frozen=True)
class SvdResult:
    """Full singular value decomposition ``a = left @ diag(sv) @ right^dag``."""

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class SpectralDecomposition:
    """Hermitian eigendecomposition with eigenvalues sorted ascending.

    Columns of ``eigenvectors`` are the orthonormal eigenvectors in matching
    order, so ``a = eigenvectors @ diag(eigenvalues) @ eigenvectors^dag``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def svd(a) -> SvdResult:
    """Full SVD with square unitary factors and descending singular values."""
    a = as_complex_matrix(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"SVD did not converge on a {a.shape[0]} x {a.shape[1]} matrix: {exc}"
        ) from exc
    return SvdResult(left=u, singular_values=s, right=dagger(vh))


def eigh(a, hermiticity_tol: float | None = None) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as ``(a + a^dag) / 2`` before decomposing; inputs
    farther than the hermiticity tolerance from their symmetrization are
    rejected with :class:`DomainError`.
    """
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError("eigendecomposition requires a square matrix")
    tol = get_tolerances().hermiticity if hermiticity_tol is None else hermiticity_tol
    scale = max(1.0, np.linalg.norm(a))
    if np.linalg.norm(a - dagger(a)) > tol * scale:
        raise DomainError("matrix is not Hermitian within tolerance")
    sym = (a + dagger(a)) / 2
    w, v = np.linalg.eigh(sym)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def rank_and_kernel(a, rel_tol: float | None = None) -> tuple[int, np.ndarray]:
    """Numerical rank and an orthonormal basis of the right null space.

    Singular values above ``rel_tol`` times the largest one count toward the
    rank; the kernel basis has ``cols - rank`` columns (possibly zero).
    """
    a = as_complex_matrix(a)
    rel_tol = get_tolerances().rank_rel if rel_tol is None else rel_tol
    cols = a.shape[1]
    if a.shape[0] == 0 or cols == 0:
        return 0, np.eye(cols, dtype=np.complex128)
    res = svd(a)
    s = res.singular_values
    if s.size == 0 or s[0] == 0.0:
        return 0, np.eye(cols, dtype=np.complex128)
    rank = int(np.count_nonzero(s > rel_tol * s[0]))
    kernel = res.right[:, rank:]
    return rank, kernel


def principal_log_and_exp(u, s: float) -> np.ndarray:
    """Evaluate ``exp(s * log(u))`` for unitary ``u`` on the principal branch.

    Eigenphases are taken in ``(-pi, pi]``; phases within the guard band just
    above ``-pi`` raise :class:`DegenerateBranchError` (the caller is expected
    to perturb its seed), except for the rounding-width sliver below the cut,
    which is folded onto ``+pi`` so that exactly representable unitaries with
    eigenvalue -1 interpolate cleanly. ``s = 0`` gives the identity and
    ``s = 1`` returns ``u``.
    """
    u = as_complex_matrix(u)
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"interpolation parameter must lie in [0, 1], got {s}")
    tol = get_tolerances()
    if not is_unitary(u, tol.unitarity):
        raise DomainError("matrix is not unitary within tolerance")
    # Complex Schur of a normal matrix: t is diagonal up to the deviation of
    # u from exact normality, and z is unitary to machine precision.
    t, z = scipy.linalg.schur(u, output="complex")
    theta = np.angle(np.diagonal(t))
    below_cut = theta < (-np.pi + _BRANCH_SNAP)
    theta = np.where(below_cut, theta + 2.0 * np.pi, theta)
    bad = theta < (-np.pi + tol.branch_cut)
    if bad.any():
        worst = float(theta[bad].min())
        raise DegenerateBranchError(
            f"eigenphase {worst:.3e} lies within {tol.branch_cut:.1e} of the "
            "-pi branch cut"
        )
    return (z * np.exp(1j * s * theta)) @ dagger(z)
