"""Dense linear-algebra kernels used by every other module.

Thin, contract-checked wrappers around LAPACK (via numpy.linalg) plus a
seeded power iteration.  All functions are pure; randomized ones take an
explicit seed.  Matrices are plain float64 ndarrays with finite entries.
"""

import numpy as np

from .errors import ContractViolation
from .rng import rng_from_seed

# Single rank-decision tolerance for the whole package, so subspace
# computations are reproducible bit-for-bit across runs.
DEFAULT_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ContractViolation("expected a 2-d matrix, got ndim=%d" % m.ndim)
    if m.size and not np.all(np.isfinite(m)):
        raise ContractViolation("matrix entries must be finite")
    return m


def as_vector(a) -> np.ndarray:
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        v = v.reshape(-1)
    if v.size and not np.all(np.isfinite(v)):
        raise ContractViolation("vector entries must be finite")
    return v


def sym_eig_extremes(m, tol: float = DEFAULT_TOL):
    """Smallest and largest eigenvalue of a symmetric matrix.

    Raises ContractViolation if the matrix is not square or deviates from
    symmetry by more than `tol` (relative to the largest entry).
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ContractViolation("sym_eig_extremes needs a square matrix, got %s" % (m.shape,))
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    if m.size and float(np.abs(m - m.T).max()) > tol * scale:
        raise ContractViolation("matrix is not symmetric within tol=%g" % tol)
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    return float(w[0]), float(w[-1])


def orthonormal_range_basis(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning range(m).

    Columns whose singular value is <= tol * sigma_max are dropped; an
    all-zero input yields a matrix with zero columns rather than an error.
    """
    m = as_matrix(m)
    if min(m.shape) == 0:
        return np.zeros((m.shape[0], 0))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s[0] <= 0.0:
        return np.zeros((m.shape[0], 0))
    rank = int(np.count_nonzero(s > tol * s[0]))
    return u[:, :rank].copy()


def least_squares_min_norm(m, b, tol: float = DEFAULT_TOL):
    """Minimum-norm least-squares solution of m @ x = b.

    Returns (x, residual_norm) where x has minimal Euclidean norm among all
    minimizers of ||m @ x - b||_2.
    """
    m = as_matrix(m)
    b = as_vector(b)
    if b.shape[0] != m.shape[0]:
        raise ContractViolation(
            "rhs length %d does not match %d rows" % (b.shape[0], m.shape[0])
        )
    x, _, _, _ = np.linalg.lstsq(m, b, rcond=tol)
    residual = float(np.linalg.norm(m @ x - b))
    return x, residual


def operator_norm(m, iters: int = 200, seed: int = 0) -> float:
    """Largest singular value estimated by power iteration on m* m.

    Deterministic given the seed.  The estimate never exceeds the true value
    by more than a 1e-6 relative factor (it converges from below up to
    round-off); `iters` trades accuracy for time.
    """
    m = as_matrix(m)
    if iters < 1:
        raise ContractViolation("iters must be >= 1")
    if m.size == 0:
        return 0.0
    rng = rng_from_seed(seed)
    v = rng.standard_normal(m.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0.0
    v /= nv
    sigma = 0.0
    for _ in range(iters):
        u = m @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v = m.T @ u
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return float(nu)
        v /= nv
        sigma = np.linalg.norm(m @ v)
    return float(sigma)
