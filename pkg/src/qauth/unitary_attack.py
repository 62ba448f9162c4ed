"""Eve's in-channel unitary attack and the commutant security criterion.

A unitary F applied in transit passes verification for every key and every
valid message exactly when, after decoding, it never maps the code space into
its complement: the oi block of Q(k) = U(k)^dag F U(k) must vanish for all k.
For block-diagonal F this is equivalent to F commuting with every transformed
code projector, so the set of deterministic attacks is the commutant of the
projector family, computed here as the null space of one stacked linear
system. Commutant dimension 1 (scalars only) means no deterministic attack
exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import get_tolerances
from .errors import (
    DimensionError,
    DomainError,
    InternalConsistencyError,
    KeyIndexError,
)
from .linalg import as_complex_matrix, dagger, eigh, is_unitary, rank_and_kernel, svd
from .protocol import CodingSet, check_density, io_decompose, transformed_projector

__all__ = [
    "CommutantReport",
    "GhOperators",
    "K2Report",
    "block_preserving_attack",
    "deterministic_attack_commutant",
    "extract_nonscalar_unitary",
    "gh_operators",
    "p_unitary",
    "q_operator",
    "k2_structural_analysis",
]


@dataclass(frozen=True)
class GhOperators:
    """Blocks of a transformed code projector for one key.

    ``g_ii = U_ii U_ii^dag`` (C x C), ``g_oi = U_oi U_oi^dag`` (D x D) and
    ``h = U_ii U_oi^dag`` (C x D), where U_ii, U_oi are blocks of the coding
    unitary. Both G operators are Hermitian PSD with spectrum in [0, 1].
    """

    g_ii: np.ndarray
    g_oi: np.ndarray
    h: np.ndarray


def gh_operators(cs: CodingSet, k: int) -> GhOperators:
    """The G/H blocks of the k-th transformed projector, for k >= 1."""
    if not 1 <= k < cs.k_count:
        raise KeyIndexError(f"key {k} outside 1..{cs.k_count - 1}")
    blocks = io_decompose(cs.layout, cs.unitary(k))
    u_ii, u_oi = blocks.ii, blocks.oi
    return GhOperators(
        g_ii=u_ii @ dagger(u_ii),
        g_oi=u_oi @ dagger(u_oi),
        h=u_ii @ dagger(u_oi),
    )


def q_operator(cs: CodingSet, f, k: int) -> np.ndarray:
    """Attack as seen after decoding with key k: ``U(k)^dag F U(k)``."""
    f = as_complex_matrix(f)
    if not is_unitary(f):
        raise DomainError("attack operator is not unitary within tolerance")
    u = cs.unitary(k)
    return dagger(u) @ f @ u


@dataclass
class CommutantReport:
    """Solution space of the deterministic-attack system for one coding set.

    ``basis`` spans all block-diagonal operators commuting with every
    transformed code projector; the identity always belongs, so
    ``dimension >= 1``. ``sv_above`` / ``sv_below`` give the singular values
    of the constraint matrix on either side of the rank threshold, so
    borderline families are visible rather than silently classified.
    """

    coding_set: CodingSet
    dimension: int
    basis: list
    is_secure: bool
    nullspace_threshold: float
    sv_above: float | None
    sv_below: float | None
    extracted_attack: np.ndarray | None = None
    harmful: bool | None = None


def _embed_block_diagonal(layout, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    e, c = layout.e_dim, layout.c_dim
    out = np.zeros((e, e), dtype=np.complex128)
    out[:c, :c] = x
    out[c:, c:] = y
    return out


def deterministic_attack_commutant(cs: CodingSet) -> CommutantReport:
    """Solve for all block-diagonal unitary-attack generators.

    Unknowns are the two diagonal blocks (X, Y) of F; for every key k >= 1 the
    commutator with the transformed projector contributes four block
    equations, stacked into a single homogeneous system over the C^2 + D^2
    complex unknowns. Column-major vectorization throughout, so
    ``vec(A X B) = (B^T kron A) vec(X)``.
    """
    layout = cs.layout
    c, d = layout.c_dim, layout.d_dim
    nx, ny = c * c, d * d
    tol = get_tolerances()

    rows = []
    eye_c = np.eye(c)
    eye_d = np.eye(d)
    for k in range(1, cs.k_count):
        gh = gh_operators(cs, k)
        g, go, h = gh.g_ii, gh.g_oi, gh.h
        # ii block: X G - G X = 0
        block_ii = np.hstack(
            [np.kron(g.T, eye_c) - np.kron(eye_c, g), np.zeros((nx, ny))]
        )
        # io block: X H - H Y = 0
        block_io = np.hstack(
            [np.kron(h.T, eye_c), -np.kron(eye_d, h)]
        )
        # oi block: Y H^dag - H^dag X = 0
        block_oi = np.hstack(
            [-np.kron(eye_c, dagger(h)), np.kron(h.conj(), eye_d)]
        )
        # oo block: Y G_oi - G_oi Y = 0
        block_oo = np.hstack(
            [np.zeros((ny, nx)), np.kron(go.T, eye_d) - np.kron(eye_d, go)]
        )
        rows.extend([block_ii, block_io, block_oi, block_oo])

    if rows:
        constraints = np.vstack(rows)
        res = svd(constraints)
        s = res.singular_values
        s_max = s[0] if s.size else 0.0
        threshold = tol.rank_rel * s_max
        if s_max == 0.0:
            rank = 0
        else:
            rank = int(np.count_nonzero(s > threshold))
        kernel = res.right[:, rank:]
        kept = s[:rank]
        dropped = s[rank:]
        sv_above = float(kept[-1]) if kept.size else None
        sv_below = float(dropped[0]) if dropped.size else None
    else:
        # K = 1: the whole block-diagonal space solves the (empty) system.
        kernel = np.eye(nx + ny, dtype=np.complex128)
        threshold = 0.0
        sv_above = None
        sv_below = None

    basis = []
    for col in kernel.T:
        x = col[:nx].reshape((c, c), order="F")
        y = col[nx:].reshape((d, d), order="F")
        basis.append(_embed_block_diagonal(layout, x, y))
    dimension = len(basis)
    return CommutantReport(
        coding_set=cs,
        dimension=dimension,
        basis=basis,
        is_secure=(dimension == 1),
        nullspace_threshold=float(threshold),
        sv_above=sv_above,
        sv_below=sv_below,
    )


def _scalar_distance(a: np.ndarray) -> float:
    """Frobenius distance of ``a`` from the span of the identity."""
    n = a.shape[0]
    return float(np.linalg.norm(a - (np.trace(a) / n) * np.eye(n)))


def extract_nonscalar_unitary(report: CommutantReport) -> np.ndarray | None:
    """Turn a non-trivial commutant into a concrete unitary attack.

    Returns None when the commutant is scalars-only. Otherwise picks the basis
    element farthest from the identity span, takes its Hermitian (or, if that
    is essentially scalar, anti-Hermitian) part -- the commutant is closed
    under adjoints -- rescales the spectrum to a quarter-turn spread, and
    exponentiates. The result is unitary, commutes with every transformed
    projector, and is certified non-scalar. Also fills in the report's
    ``extracted_attack`` and ``harmful`` fields; the attack is flagged harmful
    when it acts non-scalarly inside some decoded code space, i.e. actually
    alters a plaintext rather than applying an invisible phase.
    """
    if report.dimension == 1:
        return None
    tol = get_tolerances()
    distances = [_scalar_distance(b) for b in report.basis]
    best = int(np.argmax(distances))
    b = report.basis[best]
    if distances[best] <= tol.scalar_dev:
        raise InternalConsistencyError(
            "commutant dimension > 1 but every basis element is scalar"
        )
    herm = (b + dagger(b)) / 2
    if _scalar_distance(herm) <= 1e-10 * max(1.0, float(np.linalg.norm(herm))):
        herm = 1j * (b - dagger(b)) / 2
    dec = eigh(herm)
    spread = float(dec.eigenvalues[-1] - dec.eigenvalues[0])
    if spread <= 0.0:
        raise InternalConsistencyError("non-scalar Hermitian part has flat spectrum")
    phases = dec.eigenvalues * (np.pi / 2) / spread
    f = (dec.eigenvectors * np.exp(1j * phases)) @ dagger(dec.eigenvectors)

    cs = report.coding_set
    c = cs.layout.c_dim
    harmful = False
    for k in range(cs.k_count):
        q_ii = q_operator(cs, f, k)[:c, :c]
        if _scalar_distance(q_ii) > tol.scalar_dev:
            harmful = True
            break
    report.extracted_attack = f
    report.harmful = harmful
    return f


def p_unitary(cs: CodingSet, f, rho_e) -> float:
    """Probability that the attack ``f`` goes unnoticed, averaged over keys.

    The prepared state must be a valid tagged message (supported in the code
    space). For each key the state is encoded, hit by ``f``, and the weight
    remaining in the moved code space is accumulated.
    """
    f = as_complex_matrix(f)
    if not is_unitary(f):
        raise DomainError("attack operator is not unitary within tolerance")
    layout = cs.layout
    rho = check_density(rho_e, layout.e_dim)
    c = layout.c_dim
    embedded = np.zeros_like(rho)
    embedded[:c, :c] = rho[:c, :c]
    if np.linalg.norm(rho - embedded) > get_tolerances().support:
        raise DomainError("prepared state is not supported in the code space")

    total = 0.0
    for k in range(cs.k_count):
        u = cs.unitary(k)
        moved = f @ (u @ rho @ dagger(u)) @ dagger(f)
        p_k = np.real(np.trace(transformed_projector(cs, k) @ moved))
        total += float(p_k)
    value = total / cs.k_count
    return min(max(value, 0.0), 1.0)


def block_preserving_attack(cs: CodingSet, per_block) -> np.ndarray:
    """Attack acting inside each transformed code space separately.

    Requires the transformed projectors to be mutually orthogonal. The l-th
    supplied C x C unitary is embedded into the l-th moved code space; the
    orthogonal complement of their direct sum is left untouched. Such an
    attack is accepted with probability one for every key.
    """
    layout = cs.layout
    c, e = layout.c_dim, layout.e_dim
    k_count = cs.k_count
    per_block = [as_complex_matrix(v) for v in per_block]
    if len(per_block) != k_count:
        raise DimensionError(
            f"need {k_count} per-block unitaries, got {len(per_block)}"
        )
    tol = get_tolerances()
    projectors = [transformed_projector(cs, k) for k in range(k_count)]
    for j in range(k_count):
        for k in range(j + 1, k_count):
            overlap = np.linalg.norm(projectors[j] @ projectors[k])
            if overlap > tol.commutator:
                raise DomainError(
                    f"projectors {j} and {k} overlap ({overlap:.3e}); the "
                    "block attack needs a mutually orthogonal family"
                )
    for index, v in enumerate(per_block):
        if v.shape != (c, c):
            raise DimensionError(f"per-block unitary {index} is not {c} x {c}")
        if not is_unitary(v):
            raise DomainError(f"per-block operator {index} is not unitary")

    f = np.zeros((e, e), dtype=np.complex128)
    covered = np.zeros((e, e), dtype=np.complex128)
    for k in range(k_count):
        b = cs.unitary(k)[:, :c]
        f += b @ per_block[k] @ dagger(b)
        covered += b @ dagger(b)
    f += np.eye(e) - covered
    return f


@dataclass(frozen=True)
class K2Report:
    """Rank classification of the cross block H for a one-bit-key family.

    ``j`` is the pseudo-inverse built from the SVD of H; ``residual`` is the
    Frobenius error of the case's invertibility certificate.
    """

    h_rank: int
    case: str
    j: np.ndarray
    residual: float


def k2_structural_analysis(cs: CodingSet) -> K2Report:
    """Classify H(1) by rank for a two-element coding set.

    Cases: ``square-nonsingular`` (C = D, full rank), ``left-invertible``
    (C < D, H J = I_C), ``right-invertible`` (C > D, J H = I_D), or
    ``deficient`` with certificate H J = V diag(I_N, 0) V^dag from the SVD.
    """
    if cs.k_count != 2:
        raise DomainError(f"analysis requires exactly K = 2, got K = {cs.k_count}")
    layout = cs.layout
    c, d = layout.c_dim, layout.d_dim
    h = gh_operators(cs, 1).h
    res = svd(h)
    s = res.singular_values
    s_max = s[0] if s.size else 0.0
    tol = get_tolerances().rank_rel
    rank = int(np.count_nonzero(s > tol * s_max)) if s_max > 0 else 0

    inv = np.zeros((d, c), dtype=np.complex128)
    for i in range(rank):
        inv += res.right[:, i : i + 1] @ dagger(res.left[:, i : i + 1]) / s[i]

    if rank == c == d:
        case = "square-nonsingular"
        residual = float(np.linalg.norm(h @ inv - np.eye(c)))
    elif c < d and rank == c:
        case = "left-invertible"
        residual = float(np.linalg.norm(h @ inv - np.eye(c)))
    elif c > d and rank == d:
        case = "right-invertible"
        residual = float(np.linalg.norm(inv @ h - np.eye(d)))
    else:
        case = "deficient"
        partial = np.zeros((c, c), dtype=np.complex128)
        v_kept = res.left[:, :rank]
        partial = v_kept @ dagger(v_kept)
        residual = float(np.linalg.norm(h @ inv - partial))
    return K2Report(h_rank=rank, case=case, j=inv, residual=residual)
