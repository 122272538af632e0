"""Induced operator norms of matrices acting on uniformly weighted grid spaces.

With the same quadrature weight on every node the weights cancel in
``||T f||_p / ||f||_p``, so the weighted induced norms reduce to the usual
matrix norms: maximum absolute column sum (p = 1), maximum absolute row sum
(p = inf) and the largest singular value (p = 2).
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

# dense SVD below this size, Lanczos above
_DENSE_SVD_LIMIT = 700


def parse_p(p) -> float:
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("inf", "infty", "infinity", "oo"):
            return math.inf
        p = float(key)
    p = float(p)
    if p not in (1.0, 2.0, math.inf):
        raise ValueError(f"induced norms are available for p in {{1, 2, inf}}, got {p}")
    return p


def p_label(p: float) -> str:
    return "inf" if math.isinf(p) else str(int(p))


def induced_norm(T, p) -> float:
    """``||T||_{p -> p}`` for p in {1, 2, inf}; ``T`` dense or scipy sparse."""
    p = parse_p(p)
    if sp.issparse(T):
        a = abs(T)
        if p == 1:
            return float(a.sum(axis=0).max())
        if math.isinf(p):
            return float(a.sum(axis=1).max())
        return spectral_norm(T)
    T = np.asarray(T)
    if p == 1:
        return float(np.abs(T).sum(axis=0).max())
    if math.isinf(p):
        return float(np.abs(T).sum(axis=1).max())
    return spectral_norm(T)


def spectral_norm(T) -> float:
    """Largest singular value.  Deterministic: Lanczos runs from a fixed start vector."""
    m, n = T.shape
    if min(m, n) <= _DENSE_SVD_LIMIT:
        dense = T.toarray() if sp.issparse(T) else np.asarray(T)
        return float(scipy.linalg.svdvals(dense, check_finite=False)[0])
    v0 = np.ones(n, dtype=T.dtype) / math.sqrt(n)
    s = spla.svds(T, k=1, v0=v0, tol=1e-12, return_singular_vectors=False,
                  solver="arpack", maxiter=20 * n)
    return float(s[0])


def brute_force_norm(T: np.ndarray, p) -> float:
    """Exhaustive-extreme-point oracle for small matrices.

    p = 1 scans the unit coordinate vectors (extreme points of the l1 ball);
    p = inf scans every sign vector (extreme points of the cube), so it is
    only usable for a handful of columns.
    """
    p = parse_p(p)
    T = np.asarray(T)
    n = T.shape[1]
    if p == 1:
        return max(np.abs(T[:, j]).sum() for j in range(n))
    if math.isinf(p):
        if n > 16:
            raise ValueError("sign-vector enumeration limited to 16 columns")
        best = 0.0
        for bits in range(2**n):
            v = np.array([1.0 if (bits >> k) & 1 else -1.0 for k in range(n)])
            best = max(best, float(np.abs(T @ v).max()))
        return best
    raise ValueError("brute force oracle covers p = 1 and p = inf only")
