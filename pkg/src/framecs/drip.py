"""Restricted isometry constants adapted to a tight frame.

The constant of order s is the smallest delta with

    (1 - delta) ||Dv||^2 <= ||ADv||^2 <= (1 + delta) ||Dv||^2

over all s-sparse coefficient vectors v.  At desk scale it is computed
exactly by enumerating supports: on each support T the quadratic form is
restricted to an orthonormal basis of range(D_T), which handles linearly
dependent frame columns without generalized eigensolvers, and directions
with Dv = 0 impose no constraint.  Enumerating only |T| = s suffices since
range(D_T') is contained in range(D_T) for T' inside T.
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Tuple

import numpy as np

from .errors import ContractViolation, EnumerationLimitError
from .frames import TightFrame
from .linalg import DEFAULT_TOL, as_matrix, orthonormal_range_basis
from .rng import rng_from_seed
from .serialize import json_dumps

# Keeps exact computation under minutes at desk scale; past this only the
# randomized lower bound is offered -- never a silently approximate "exact".
ENUMERATION_LIMIT = 10**7

METHOD_EXACT = "exact"
METHOD_LOWER = "random_lower_bound"


@dataclass(frozen=True)
class RipReport:
    s: int
    delta: float
    witness_support: Tuple[int, ...]
    method: str
    supports_examined: int

    def to_json_dict(self):
        return {
            "s": self.s,
            "delta": self.delta,
            "method": self.method,
            "witness_support": list(self.witness_support),
            "supports_examined": self.supports_examined,
        }

    def to_json(self) -> str:
        return json_dumps(self.to_json_dict())


def _check_shapes(a: np.ndarray, frame: TightFrame):
    if a.shape[1] != frame.n:
        raise ContractViolation(
            "measurement matrix has %d columns but the frame is %d-dimensional"
            % (a.shape[1], frame.n)
        )


def _support_eig_range(a: np.ndarray, d: np.ndarray, support) -> Tuple[float, float]:
    """Eigenvalue range of the measurement quadratic form on range(D_T).

    Returns (1.0, 1.0) for rank-zero supports: such directions contribute
    no constraint, i.e. a zero deviation.
    """
    basis = orthonormal_range_basis(d[:, list(support)], DEFAULT_TOL)
    if basis.shape[1] == 0:
        return 1.0, 1.0
    image = a @ basis
    w = np.linalg.eigvalsh(image.T @ image)
    return float(w[0]), float(w[-1])


def _extreme(lo: float, hi: float) -> float:
    return max(hi - 1.0, 1.0 - lo)


def exact_drip(a, frame: TightFrame, s: int) -> RipReport:
    """Exact frame-adapted restricted isometry constant by enumeration."""
    a = as_matrix(a)
    _check_shapes(a, frame)
    d = frame.d
    if not 1 <= s <= d:
        raise ContractViolation("s must satisfy 1 <= s <= d")
    count = math.comb(d, s)
    if count > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            "C(%d, %d) = %d supports exceeds the exact budget %d; "
            "use random_lower_bound instead" % (d, s, count, ENUMERATION_LIMIT)
        )
    delta = -1.0
    witness: Tuple[int, ...] = ()
    mat = frame.matrix
    for support in combinations(range(d), s):
        lo, hi = _support_eig_range(a, mat, support)
        dev = _extreme(lo, hi)
        if dev > delta:
            delta = dev
            witness = support
    return RipReport(s=int(s), delta=float(delta), witness_support=witness,
                     method=METHOD_EXACT, supports_examined=count)


def support_spectrum_range(a, frame: TightFrame, s: int) -> Tuple[float, float]:
    """Global (lambda_min, lambda_max) of the per-support quadratic forms at
    order s.  Useful for rescaling a measurement matrix to a target constant:
    scaling A by c maps the range to (c^2 lambda_min, c^2 lambda_max)."""
    a = as_matrix(a)
    _check_shapes(a, frame)
    d = frame.d
    if not 1 <= s <= d:
        raise ContractViolation("s must satisfy 1 <= s <= d")
    count = math.comb(d, s)
    if count > ENUMERATION_LIMIT:
        raise EnumerationLimitError("support budget exceeded")
    lo_all, hi_all = np.inf, -np.inf
    mat = frame.matrix
    for support in combinations(range(d), s):
        lo, hi = _support_eig_range(a, mat, support)
        lo_all = min(lo_all, lo)
        hi_all = max(hi_all, hi)
    return float(lo_all), float(hi_all)


def exact_rip(a, s: int) -> RipReport:
    """Classical restricted isometry constant (identity dictionary)."""
    a = as_matrix(a)
    n = a.shape[1]
    if not 1 <= s <= n:
        raise ContractViolation("s must satisfy 1 <= s <= n")
    count = math.comb(n, s)
    if count > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            "C(%d, %d) = %d supports exceeds the exact budget %d"
            % (n, s, count, ENUMERATION_LIMIT)
        )
    gram = a.T @ a
    delta = -1.0
    witness: Tuple[int, ...] = ()
    for support in combinations(range(n), s):
        idx = list(support)
        w = np.linalg.eigvalsh(gram[np.ix_(idx, idx)])
        dev = _extreme(float(w[0]), float(w[-1]))
        if dev > delta:
            delta = dev
            witness = support
    return RipReport(s=int(s), delta=float(delta), witness_support=witness,
                     method=METHOD_EXACT, supports_examined=count)


def random_lower_bound(a, frame: TightFrame, s: int, trials: int, seed: int) -> RipReport:
    """Lower bound on the exact constant from seeded random supports."""
    a = as_matrix(a)
    _check_shapes(a, frame)
    d = frame.d
    if not 1 <= s <= d:
        raise ContractViolation("s must satisfy 1 <= s <= d")
    if trials < 1:
        raise ContractViolation("trials must be >= 1")
    rng = rng_from_seed(seed)
    delta = -1.0
    witness: Tuple[int, ...] = ()
    mat = frame.matrix
    for _ in range(trials):
        support = tuple(sorted(rng.choice(d, size=s, replace=False).tolist()))
        lo, hi = _support_eig_range(a, mat, support)
        dev = _extreme(lo, hi)
        if dev > delta:
            delta = dev
            witness = support
    return RipReport(s=int(s), delta=float(delta), witness_support=witness,
                     method=METHOD_LOWER, supports_examined=trials)


def support_deviation(a, frame: TightFrame, support) -> float:
    """Re-evaluate the deviation on one support (witness validation)."""
    a = as_matrix(a)
    _check_shapes(a, frame)
    lo, hi = _support_eig_range(a, frame.matrix, tuple(support))
    return _extreme(lo, hi)
