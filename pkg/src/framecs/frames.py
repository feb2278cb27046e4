"""Tight frames: construction, validation, transforms, and best s-term
approximation.

A tight frame is an n x d matrix D (columns are the frame vectors) with
D D* = I_n, so analysis followed by synthesis reconstructs exactly:
f = sum_k <f, D_k> D_k.  Everything here is real-valued and dense.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .linalg import as_matrix, as_vector, sym_eig_extremes
from .rng import rng_from_seed
from .serialize import format_real

# Constructions achieve ~1e-10; the looser acceptance tolerance guards
# against accumulated round-off in user-supplied frames.
TIGHT_TOL = 1e-8


@dataclass(frozen=True)
class TightFrame:
    """An n x d tight frame; immutable after construction."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        n, d = m.shape
        if n < 1 or d < n:
            raise ContractViolation("frame must be n x d with d >= n >= 1, got %s" % (m.shape,))
        col_norms = np.linalg.norm(m, axis=0)
        if np.any(col_norms == 0.0):
            raise ContractViolation("frame columns must be nonzero")
        defect = tightness_defect(m)
        if defect > TIGHT_TOL:
            raise ContractViolation(
                "matrix is not a tight frame: ||DD* - I|| = %g > %g" % (defect, TIGHT_TOL)
            )

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    @property
    def redundancy(self) -> float:
        return self.d / self.n


@dataclass(frozen=True)
class SparseApprox:
    """Best s-term approximation of a coefficient vector and its tails."""

    s: int
    x_best: np.ndarray
    tail_l1: float
    q: float
    tail_lq: float


def tightness_defect(m) -> float:
    """Spectral-norm distance ||MM* - I|| of a matrix from tightness."""
    m = as_matrix(m)
    gram = m @ m.T - np.eye(m.shape[0])
    lo, hi = sym_eig_extremes(gram, tol=1.0)  # gram is symmetric by construction
    return max(abs(lo), abs(hi))


def make_identity_frame(n: int) -> TightFrame:
    if n < 1:
        raise ContractViolation("n must be >= 1")
    return TightFrame(np.eye(n))


def make_dct_frame(n: int) -> TightFrame:
    """Orthonormal DCT-II basis as frame columns.

    Column k has entries a_k * cos(pi * (2j + 1) * k / (2n)) with a_0 =
    sqrt(1/n) and a_k = sqrt(2/n) otherwise.
    """
    if n < 1:
        raise ContractViolation("n must be >= 1")
    j = np.arange(n).reshape(-1, 1)
    k = np.arange(n).reshape(1, -1)
    basis = np.cos(np.pi * (2 * j + 1) * k / (2 * n))
    basis[:, 0] *= math.sqrt(1.0 / n)
    basis[:, 1:] *= math.sqrt(2.0 / n)
    return TightFrame(basis)


def make_union_frame(b1, b2) -> TightFrame:
    """Union of two orthonormal bases, rescaled by 1/sqrt(2) to stay tight."""
    b1 = as_matrix(b1)
    b2 = as_matrix(b2)
    for name, b in (("b1", b1), ("b2", b2)):
        if b.shape[0] != b.shape[1]:
            raise ContractViolation("%s must be square" % name)
        if float(np.abs(b.T @ b - np.eye(b.shape[0])).max()) > TIGHT_TOL:
            raise ContractViolation("%s is not orthonormal within %g" % (name, TIGHT_TOL))
    if b1.shape != b2.shape:
        raise ContractViolation("bases must have matching shapes")
    return TightFrame(np.hstack([b1, b2]) / math.sqrt(2.0))


def make_random_tight_frame(n: int, d: int, seed: int) -> TightFrame:
    """Generic coherent tight frame: first n rows of an orthonormalized
    seeded Gaussian d x d matrix.  Deterministic given the seed."""
    if d < n:
        raise ContractViolation("need d >= n, got n=%d d=%d" % (n, d))
    rng = rng_from_seed(seed)
    g = rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    # fix the sign convention so the result does not depend on LAPACK's choice
    q = q * np.sign(np.where(np.diag(r) == 0.0, 1.0, np.diag(r)))
    return TightFrame(q[:n, :])


def verify_tight(frame: TightFrame) -> float:
    """Spectral-norm defect ||DD* - I|| of the frame's matrix."""
    return tightness_defect(frame.matrix)


def column_coherence(m) -> float:
    """Largest normalized inner product between distinct columns."""
    m = as_matrix(m)
    if m.shape[1] < 2:
        raise ContractViolation("coherence needs at least two columns")
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0.0):
        raise ContractViolation("coherence is undefined with a zero column")
    normalized = m / norms
    gram = np.abs(normalized.T @ normalized)
    np.fill_diagonal(gram, 0.0)
    return min(1.0, float(gram.max()))


def coherence(frame: TightFrame) -> float:
    return column_coherence(frame.matrix)


def analysis(frame: TightFrame, f) -> np.ndarray:
    """Analysis coefficients D* f."""
    f = as_vector(f)
    if f.shape[0] != frame.n:
        raise ContractViolation("signal length %d != n=%d" % (f.shape[0], frame.n))
    return frame.matrix.T @ f


def synthesize(frame: TightFrame, v) -> np.ndarray:
    """Synthesis D v of a coefficient vector."""
    v = as_vector(v)
    if v.shape[0] != frame.d:
        raise ContractViolation("coefficient length %d != d=%d" % (v.shape[0], frame.d))
    return frame.matrix @ v


def best_s_term(x, s: int, q: float = 1.0) -> SparseApprox:
    """Keep the s largest-magnitude entries of x (ties: lowest index wins).

    tail_l1 is the l1 norm of what was dropped; tail_lq the lq quasi-norm
    (sum |t_i|^q)^(1/q) for the requested q in (0, 1].
    """
    x = as_vector(x)
    if not 0 <= s <= x.shape[0]:
        raise ContractViolation("s must be in [0, len(x)]")
    if not 0.0 < q <= 1.0:
        raise ContractViolation("q must be in (0, 1]")
    order = np.argsort(-np.abs(x), kind="stable")
    keep = order[:s]
    x_best = np.zeros_like(x)
    x_best[keep] = x[keep]
    tail = x - x_best
    tail_l1 = float(np.abs(tail).sum())
    if q == 1.0:
        tail_lq = tail_l1
    else:
        tail_lq = float(np.sum(np.abs(tail) ** q) ** (1.0 / q))
    return SparseApprox(s=int(s), x_best=x_best, tail_l1=tail_l1, q=float(q), tail_lq=tail_lq)


def save_matrix(path, m) -> None:
    """Write a matrix as text: "rows cols" header then one row per line,
    17 significant digits (round-trips bit-exactly)."""
    m = as_matrix(m)
    lines = ["%d %d" % m.shape]
    for row in m:
        lines.append(" ".join(format_real(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ContractViolation("bad matrix header in %s" % path)
        rows, cols = int(header[0]), int(header[1])
        out = np.empty((rows, cols))
        for i in range(rows):
            parts = fh.readline().split()
            if len(parts) != cols:
                raise ContractViolation("row %d of %s has %d entries, expected %d"
                                        % (i, path, len(parts), cols))
            out[i] = [float(p) for p in parts]
    return out


def save_frame(path, frame: TightFrame) -> None:
    save_matrix(path, frame.matrix)


def load_frame(path) -> TightFrame:
    return TightFrame(load_matrix(path))
