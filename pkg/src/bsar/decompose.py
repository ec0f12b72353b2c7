"""Leading singular triplets of the complex raw-data matrix.

Only the few dominant triplets are ever consumed downstream, so the
decomposition is computed by block power iteration with Rayleigh-Ritz
extraction on whichever Gram operator has the smaller dimension.  Start
vectors are seeded, so runs are reproducible.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import as_complex_matrix, as_complex_vector
from .errors import ConvergenceError, ParameterError

DEGENERACY_RATIO = 1.0 + 1e-6
OVERSAMPLE = 5


@dataclass
class TruncatedSVD:
    """Leading k singular triplets of an M x N complex matrix.

    singular_values are non-negative and non-increasing; the columns of
    left_vectors (M x k) and right_vectors (N x k) are orthonormal and satisfy
    X @ v_i = sigma_i * u_i.  residual_energy is ||X||_F^2 minus the rank-k
    reconstruction energy.  degenerate_pairs lists indices i where
    sigma_i / sigma_{i+1} is too close to 1 for the pair to be resolved;
    rank_deficient marks trailing zero singular values whose vectors are an
    arbitrary orthonormal completion.
    """

    k: int
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    residual_energy: float
    degenerate_pairs: tuple = field(default_factory=tuple)
    rank_deficient: bool = False

    @property
    def dominance_ratio(self):
        if self.k < 2:
            raise ParameterError("dominance ratio undefined for k < 2")
        s1, s2 = self.singular_values[0], self.singular_values[1]
        return float(s1 / s2) if s2 > 0 else float("inf")


def _orthonormal_completion(block, count, rng):
    """Append `count` orthonormal columns orthogonal to the given block."""
    dim = block.shape[0]
    extra = rng.standard_normal((dim, count)) + 1j * rng.standard_normal((dim, count))
    extra -= block @ (block.conj().T @ extra)
    q, _ = np.linalg.qr(extra)
    return q


def leading_triplets(X, k, tol=1e-9, max_iter=5000, seed=0):
    """Compute the k dominant singular triplets of X.

    Block power iteration (with guard vectors) on the smaller Gram operator;
    convergence is declared when all k leading singular-value estimates change
    by less than `tol` relatively between sweeps.  Raises ConvergenceError
    carrying the last iterate when max_iter is exhausted.
    """
    X = as_complex_matrix(X)
    M, N = X.shape
    k = int(k)
    if not (1 <= k <= min(M, N)):
        raise ParameterError(f"k={k} outside [1, min(M, N)={min(M, N)}]")
    if not (tol > 0):
        raise ParameterError("tol must be positive")

    right_side = N <= M  # iterate on the side with the smaller Gram operator
    dim = N if right_side else M
    block = min(k + OVERSAMPLE, dim)

    rng = np.random.default_rng(seed)
    Q = rng.standard_normal((dim, block)) + 1j * rng.standard_normal((dim, block))
    Q, _ = np.linalg.qr(Q)

    def apply_gram(B):
        if right_side:
            return X.conj().T @ (X @ B)
        return X @ (X.conj().T @ B)

    prev = None
    converged = False
    for _ in range(int(max_iter)):
        Y = apply_gram(Q)
        H = Q.conj().T @ Y
        H = 0.5 * (H + H.conj().T)
        evals, evecs = np.linalg.eigh(H)
        order = np.argsort(evals)[::-1]
        ritz = np.sqrt(np.clip(evals[order][:k], 0.0, None))
        if prev is not None:
            scale = max(float(ritz[0]), np.finfo(float).tiny)
            if np.all(np.abs(ritz - prev) <= tol * scale):
                Q = Q @ evecs[:, order]
                converged = True
                break
        prev = ritz
        Q, _ = np.linalg.qr(Y)

    # final Rayleigh-Ritz extraction on the converged (or last) subspace
    Y = apply_gram(Q)
    H = Q.conj().T @ Y
    H = 0.5 * (H + H.conj().T)
    evals, evecs = np.linalg.eigh(H)
    order = np.argsort(evals)[::-1][:k]
    sigma = np.sqrt(np.clip(evals[order], 0.0, None))
    basis = Q @ evecs[:, order]

    scale = float(sigma[0]) if sigma[0] > 0 else 1.0
    nonzero = sigma > 1e-12 * scale
    rank_deficient = not bool(np.all(nonzero))
    sigma = np.where(nonzero, sigma, 0.0)

    if right_side:
        V = basis
        U = np.zeros((M, k), dtype=np.complex128)
        if np.any(nonzero):
            U[:, nonzero] = (X @ V[:, nonzero]) / sigma[nonzero]
        if rank_deficient:
            U[:, ~nonzero] = _orthonormal_completion(U[:, nonzero], int(np.sum(~nonzero)), rng)
    else:
        U = basis
        V = np.zeros((N, k), dtype=np.complex128)
        if np.any(nonzero):
            V[:, nonzero] = (X.conj().T @ U[:, nonzero]) / sigma[nonzero]
        if rank_deficient:
            V[:, ~nonzero] = _orthonormal_completion(V[:, nonzero], int(np.sum(~nonzero)), rng)

    degenerate = tuple(
        i for i in range(k - 1)
        if sigma[i + 1] > 0 and sigma[i] / sigma[i + 1] < DEGENERACY_RATIO
    )
    total = float(np.sum(np.abs(X) ** 2))
    residual = max(total - float(np.sum(sigma**2)), 0.0)

    result = TruncatedSVD(
        k=k,
        singular_values=sigma,
        left_vectors=U,
        right_vectors=V,
        residual_energy=residual,
        degenerate_pairs=degenerate,
        rank_deficient=rank_deficient,
    )
    if not converged:
        raise ConvergenceError(
            f"singular values did not stabilize to {tol} within {max_iter} iterations",
            last_iterate=result,
        )
    return result


def singular_spectrum(svd):
    """Singular values plus the sigma1/sigma2 dominance ratio."""
    values = np.asarray(svd.singular_values, dtype=np.float64)
    return values, svd.dominance_ratio


@dataclass(frozen=True)
class GibbsRotation:
    """2-column SVD rotation entries and diagnostics (|c|^2 + |s|^2 = 1)."""

    c: complex
    s: complex
    orthogonality_residual: float
    column_norms: tuple


def gibbs_rotation_check(x1, x2):
    """Rotation that orthogonalizes a 2-column matrix, with residual checks.

    Returns the rotation entries (c, s), the magnitude of the inner product of
    the two rotated columns, and the rotated column norms (the two singular
    values of [x1, x2]).
    """
    a = as_complex_vector(x1)
    b = as_complex_vector(x2)
    if a.size != b.size:
        raise ParameterError("columns must have equal length")
    if np.linalg.norm(a) == 0.0 or np.linalg.norm(b) == 0.0:
        raise ParameterError("degenerate input: zero-norm column")
    A = np.column_stack([a, b])
    H = A.conj().T @ A
    H = 0.5 * (H + H.conj().T)
    evals, evecs = np.linalg.eigh(H)
    order = np.argsort(evals)[::-1]
    rot = evecs[:, order]
    E = A @ rot
    residual = float(abs(np.vdot(E[:, 0], E[:, 1])))
    norms = (float(np.linalg.norm(E[:, 0])), float(np.linalg.norm(E[:, 1])))
    return GibbsRotation(
        c=complex(rot[0, 0]),
        s=complex(np.conj(rot[1, 0])),
        orthogonality_residual=residual,
        column_norms=norms,
    )
