"""Density matrices on a bipartite Hilbert space and their entropic quantities.

All entropies are returned in nats (natural logarithm). Callers that want bits
should divide by ``math.log(2)``; the CLI does this behind its ``--bits`` flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
# Eigenvalues of the second argument of the relative entropy below this are
# treated as outside the support; first-argument weight above the weight
# tolerance on such an eigenvector makes the divergence infinite.
SUPPORT_TOL = 1e-12
SUPPORT_WEIGHT_TOL = 1e-10


@dataclass(frozen=True)
class BipartiteDims:
    """Dimensions (d_a, d_b) of the retained/discarded split of a bipartite space."""

    d_a: int
    d_b: int

    def __post_init__(self) -> None:
        if self.d_a < 1 or self.d_b < 1:
            raise ValidationError(f"subsystem dimensions must be positive, got {self}")

    @property
    def total(self) -> int:
        return self.d_a * self.d_b

    def check_dim(self, dim: int) -> None:
        if dim != self.total:
            raise ValidationError(
                f"state dimension {dim} does not equal d_a*d_b = {self.total}"
            )


class HermitianMatrix:
    """Immutable complex square matrix with conjugate symmetry.

    The backing array is copied at construction and marked read-only, so
    instances are safe to share across threads.
    """

    def __init__(self, entries) -> None:
        mat = np.array(entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {mat.shape}")
        if mat.shape[0] < 1:
            raise ValidationError("matrix dimension must be positive")
        asym = np.abs(mat - mat.conj().T).max()
        if asym > HERMITICITY_TOL:
            raise ValidationError(
                f"matrix is not Hermitian: max |M - M^dag| = {asym:.3e} > {HERMITICITY_TOL}"
            )
        mat.setflags(write=False)
        self._mat = mat

    @property
    def matrix(self) -> np.ndarray:
        """Read-only view of the underlying array."""
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"


class DensityMatrix(HermitianMatrix):
    """Hermitian matrix with unit trace and nonnegative spectrum (within tolerance)."""

    def __init__(self, entries) -> None:
        super().__init__(entries)
        tr = self._mat.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace must be 1 within {TRACE_TOL}, got {tr}")
        lo = np.linalg.eigvalsh(self._mat).min()
        if lo < -PSD_TOL:
            raise ValidationError(
                f"matrix is not positive semidefinite: min eigenvalue {lo:.3e}"
            )


class Spectrum:
    """Eigendecomposition of a density matrix: descending probabilities plus eigenvectors.

    ``vectors[alpha]`` is the (row-indexed) eigenvector paired with
    ``probs[alpha]``; the state reassembles as sum_a probs[a] |v_a><v_a|.
    """

    def __init__(self, probs, vectors) -> None:
        p = np.array(probs, dtype=float)
        v = np.array(vectors, dtype=complex)
        if p.ndim != 1 or v.shape != (p.size, p.size):
            raise ValidationError(
                f"expected d probabilities and a d x d vector array, got {p.shape}, {v.shape}"
            )
        if np.any(np.diff(p) > 0):
            raise ValidationError("probabilities must be sorted non-increasing")
        if p.min() < -PSD_TOL or p.max() > 1.0 + PSD_TOL:
            raise ValidationError(f"probabilities outside [0, 1] beyond tolerance: {p}")
        if abs(p.sum() - 1.0) > TRACE_TOL:
            raise ValidationError(f"probabilities must sum to 1, got {p.sum()}")
        gram = v @ v.conj().T
        if np.abs(gram - np.eye(p.size)).max() > ORTHONORMALITY_TOL:
            raise ValidationError("eigenvectors are not orthonormal within tolerance")
        p.setflags(write=False)
        v.setflags(write=False)
        self.probs = p
        self.vectors = v

    @property
    def dim(self) -> int:
        return self.probs.size

    def reconstruct(self) -> np.ndarray:
        """Reassemble sum_a probs[a] |v_a><v_a| as a plain array."""
        return (self.vectors.T * self.probs) @ self.vectors.conj()


def eigendecompose(rho: DensityMatrix) -> Spectrum:
    """Spectral decomposition with eigenvalues sorted descending.

    Ties between equal eigenvalues keep the eigensolver's output order
    (stable sort), which makes downstream arrangements deterministic.
    """
    vals, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(-vals, kind="stable")
    probs = np.clip(vals[order], 0.0, None)
    # eigh guarantees unit trace only up to round-off; Spectrum re-validates.
    return Spectrum(probs, vecs[:, order].T)


def shannon_entropy(probs) -> float:
    """Shannon entropy in nats with the 0*log(0) = 0 convention.

    Entries in [-PSD_TOL, 0) are treated as numerical noise and clamped to 0.
    """
    p = np.asarray(probs, dtype=float).ravel()
    if p.size and p.min() < -PSD_TOL:
        raise ValidationError(f"negative probability beyond tolerance: {p.min():.3e}")
    p = p[p > 0.0]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log(p)).sum())


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) = -Tr(rho log rho), in nats."""
    return shannon_entropy(np.linalg.eigvalsh(rho.matrix))


def partial_trace(rho: DensityMatrix, dims: BipartiteDims, keep: str) -> DensityMatrix:
    """Reduced state of subsystem ``keep`` ("A" or "B") of a bipartite density matrix."""
    dims.check_dim(rho.dim)
    blocks = rho.matrix.reshape(dims.d_a, dims.d_b, dims.d_a, dims.d_b)
    if keep == "A":
        reduced = np.trace(blocks, axis1=1, axis2=3)
    elif keep == "B":
        reduced = np.trace(blocks, axis1=0, axis2=2)
    else:
        raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityMatrix(reduced)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Quantum relative entropy S(rho || sigma) = Tr rho log rho - Tr rho log sigma, in nats.

    Returns ``math.inf`` when rho has weight above SUPPORT_WEIGHT_TOL on an
    eigenvector of sigma whose eigenvalue is below SUPPORT_TOL (support of rho
    not contained in support of sigma). Always >= -1e-9 up to round-off
    (Klein's inequality); exactly 0 when rho equals sigma.
    """
    if rho.dim != sigma.dim:
        raise ValidationError(
            f"dimension mismatch: rho is {rho.dim}, sigma is {sigma.dim}"
        )
    q, v = np.linalg.eigh(sigma.matrix)
    q = np.clip(q, 0.0, None)
    # Weight of rho on each eigenvector of sigma.
    w = np.einsum("ij,jk,ki->i", v.conj().T, rho.matrix, v).real
    outside = q < SUPPORT_TOL
    if np.any(w[outside] > SUPPORT_WEIGHT_TOL):
        return math.inf
    inside = ~outside
    cross = float((w[inside] * np.log(q[inside])).sum())
    return -von_neumann_entropy(rho) - cross


def mutual_information(rho: DensityMatrix, dims: BipartiteDims) -> float:
    """Quantum mutual information S(A) + S(B) - S(AB) of a bipartite state, in nats.

    Can be a tiny negative number (order -1e-15) from round-off; callers that
    report values should clamp, the raw return never does.
    """
    dims.check_dim(rho.dim)
    s_a = von_neumann_entropy(partial_trace(rho, dims, "A"))
    s_b = von_neumann_entropy(partial_trace(rho, dims, "B"))
    return s_a + s_b - von_neumann_entropy(rho)


def is_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() <= tol)


def apply_unitary(rho: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    """Conjugate a state: rho -> U rho U^dag. Trace and spectrum are preserved."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (rho.dim, rho.dim):
        raise ValidationError(
            f"unitary shape {u.shape} does not match state dimension {rho.dim}"
        )
    if not is_unitary(u):
        raise ValidationError("matrix is not unitary within tolerance")
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def nats_to_bits(x: float) -> float:
    """Convert an entropy-like value from nats to bits (infinity passes through)."""
    if math.isinf(x):
        return x
    return x / math.log(2.0)
