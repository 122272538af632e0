"""Iterated commutators with a position operator and the resolvent identities.

``ad(L, X, k)`` is ``Ad^k(L)`` with ``Ad^1(L) = X L - L X`` and ``X`` the
(diagonal) multiplication by ``x_j - t^{1/2} n_j``.  The checks here are pure
matrix algebra and hold for arbitrary symmetric ``A``, not only Laplacians.
"""

from __future__ import annotations

import functools
import math

import numpy as np
import scipy.linalg

from .derivatives import first_derivative, neighbor_average
from .grid import Grid


def _as_diag(X) -> np.ndarray | None:
    X = np.asarray(X)
    if X.ndim == 1:
        return X
    if X.ndim == 2 and X.shape[0] == X.shape[1] and not np.any(X - np.diag(np.diag(X))):
        return np.diag(X).copy()
    return None


def ad(L, X, k: int) -> np.ndarray:
    """``Ad^k(L)`` for square ``L``; ``X`` is a diagonal matrix or its diagonal."""
    if k < 0:
        raise ValueError("commutator level must be >= 0")
    L = np.asarray(L)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("L must be square")
    x = _as_diag(X)
    n = L.shape[0]
    if x is not None:
        if x.shape != (n,):
            raise ValueError("dimension mismatch between L and X")
        for _ in range(k):
            L = x[:, None] * L - L * x[None, :]
        return L
    X = np.asarray(X)
    if X.shape != L.shape:
        raise ValueError("dimension mismatch between L and X")
    for _ in range(k):
        L = X @ L - L @ X
    return L


def position_operator(grid: Grid, axis: int, center: float = 0.0) -> np.ndarray:
    """Diagonal of ``x_axis - center`` on the grid nodes."""
    return grid.nodes[:, axis] - center


def _shifted(A: np.ndarray, t: float) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    if np.abs(A - A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
        raise ValueError("A must be symmetric")
    B = np.eye(A.shape[0]) + t * A
    ev = np.linalg.eigvalsh(B)
    if np.abs(ev).min() <= 1e-10:
        raise ValueError("1 + tA is singular")
    return B


def _resolvent_powers(A, t, M):
    B = _shifted(A, t)
    R1 = np.linalg.inv(B)
    R1 = 0.5 * (R1 + R1.T)
    powers = [np.eye(A.shape[0]), R1]
    for _ in range(2, M + 1):
        powers.append(powers[-1] @ R1)
    return powers


def resolvent_commutator_expansion(A, X, M: int, ell: int, t: float, method: str = "direct") -> np.ndarray:
    """Commutator expansion of ``Ad^ell((1 + tA)^-M)``.

    Returns ``-sum_{k<ell} sum_{m1+m2=M+1} C(ell,k) Ad^k(R_m1) Ad^(ell-k)(tA) R_m2``.
    The leading minus sign comes from ``[X, B^-1] = -B^-1 [X, B] B^-1``.
    ``method="recursive"`` expands the inner ``Ad^k(R_m1)`` by the same
    identity instead of computing the commutators directly.
    """
    if method not in ("direct", "recursive"):
        raise ValueError("method must be 'direct' or 'recursive'")
    if M < 1 or ell < 1:
        raise ValueError("need M >= 1 and ell >= 1")
    R = _resolvent_powers(A, t, M)
    tA = t * np.asarray(A, dtype=float)
    ad_tA = [ad(tA, X, k) for k in range(ell + 1)]

    @functools.lru_cache(maxsize=None)
    def ad_R(m: int, k: int) -> np.ndarray:
        if k == 0 or method == "direct":
            return ad(R[m], X, k)
        return expand(m, k)

    def expand(m: int, level: int) -> np.ndarray:
        out = np.zeros_like(tA)
        for k in range(level):
            c = math.comb(level, k)
            for m1 in range(1, m + 1):
                out -= c * ad_R(m1, k) @ ad_tA[level - k] @ R[m + 1 - m1]
        return out

    return expand(M, ell)


def check_resolvent_commutator(A, X, M: int, ell: int, t: float, method: str = "direct") -> float:
    """Relative Frobenius residual of the resolvent commutator expansion."""
    if t <= 0:
        raise ValueError("t must be positive")
    R = _resolvent_powers(A, t, M)
    lhs = ad(R[M], X, ell)
    rhs = resolvent_commutator_expansion(A, X, M, ell, t, method)
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(lhs)))


def _resolvent_eig(A, t, M):
    A = np.asarray(A, dtype=float)
    _shifted(A, t)
    mu, V = scipy.linalg.eigh(A)
    r = (1.0 + t * mu) ** (-M)
    return r, V


def _expm_i(r, V, s):
    return (V * np.exp(-1j * s * r)) @ V.T


def simpson_weights(n_quad: int, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Simpson nodes and weights on ``[0, tau]`` (``n_quad`` even intervals)."""
    if n_quad < 2 or n_quad % 2:
        raise ValueError("n_quad must be a positive even integer")
    s = np.linspace(0.0, tau, n_quad + 1)
    w = np.ones(n_quad + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return s, w * (tau / n_quad) / 3.0


def _multinomial3(k):
    for k1 in range(k + 1):
        for k2 in range(k + 1 - k1):
            k3 = k - k1 - k2
            yield k1, k2, k3, math.factorial(k) // (math.factorial(k1) * math.factorial(k2) * math.factorial(k3))


def unitary_commutator_sides(A, X, M: int, t: float, tau: float, k: int, n_quad: int):
    """Both sides of the Duhamel expansion of ``Ad^(k+1)(exp(-i tau R_{M,t}))``.

    The left side is the nested commutator of the exact matrix exponential;
    the right side is ``-i int_0^tau sum k!/(k1!k2!k3!) Ad^k1(e^{-isR})
    Ad^(k2+1)(R) Ad^k3(e^{-i(tau-s)R}) ds`` by composite Simpson.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    r, V = _resolvent_eig(A, t, M)
    R = (V * r) @ V.T
    lhs = ad(_expm_i(r, V, tau), X, k + 1)
    if tau == 0:
        return lhs, np.zeros_like(lhs)
    ad_R = [ad(R, X, j + 1) for j in range(k + 1)]
    nodes, weights = simpson_weights(n_quad, tau)
    rhs = np.zeros_like(lhs)
    for s, w in zip(nodes, weights):
        left = _expm_i(r, V, s)
        right = _expm_i(r, V, tau - s)
        ad_left = [ad(left, X, j) for j in range(k + 1)]
        ad_right = [ad(right, X, j) for j in range(k + 1)]
        for k1, k2, k3, c in _multinomial3(k):
            rhs += (w * c) * (ad_left[k1] @ ad_R[k2] @ ad_right[k3])
    return lhs, -1j * rhs


def check_unitary_commutator(A, X, M: int, t: float, tau: float, k: int, n_quad: int) -> float:
    """Relative Frobenius residual ``||lhs - rhs|| / max(1, ||lhs||)``."""
    if n_quad < 16:
        raise ValueError("n_quad must be >= 16")
    lhs, rhs = unitary_commutator_sides(A, X, M, t, tau, k, n_quad)
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(lhs)))


def ad1_exponential_identity(A, X, M: int, t: float, tau: float, n_quad: int) -> float:
    return check_unitary_commutator(A, X, M, t, tau, 0, n_quad)


def quadrature_order_study(A, X, M, t, tau, k, n_quads=(4, 8, 16, 32)) -> dict:
    """Residuals under successive doubling of ``n_quad`` and the observed ratios.

    Ratios are only reported while the finer residual stays above ``floor``
    (round-off level), where the Simpson error model no longer applies.
    """
    floor = 1e-12
    res = []
    for nq in n_quads:
        lhs, rhs = unitary_commutator_sides(A, X, M, t, tau, k, nq)
        res.append(float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(lhs))))
    ratios = [a / b for a, b in zip(res, res[1:]) if b > floor]
    converging = all(b < a for a, b in zip(res, res[1:]) if a > floor)
    return {"n_quad": list(n_quads), "residuals": res, "ratios": ratios, "converging": converging}


def discrete_ad_table(grid: Grid, t: float, axis: int = 0, center: float = 0.0) -> dict:
    """Defects of ``Ad^k(t A_h)`` against their exact discrete closed forms.

    ``Ad^1 = 2t D`` (zero-extension centered difference) and
    ``Ad^2 = -2t Avg`` (neighbor average) hold exactly; ``Ad^3 = 2t h^2 D``.
    """
    from .laplacian import assemble_laplacian

    tA = t * assemble_laplacian(grid)
    x = position_operator(grid, axis, center)
    D = first_derivative(grid, axis, "zero").toarray()
    avg = neighbor_average(grid, axis).toarray()
    a1, a2, a3 = ad(tA, x, 1), ad(tA, x, 2), ad(tA, x, 3)

    def rel(a, b):
        return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))

    return {
        "ad1_defect": rel(a1, 2 * t * D),
        "ad2_defect": rel(a2, -2 * t * avg),
        "ad3_closed_form_defect": rel(a3, 2 * t * grid.h**2 * D),
        "ad3": a3,
    }


def ad3_defect_norm(grid: Grid, t: float, axis: int = 0) -> float:
    """``||Ad^3(t A_h)||`` measured from the discrete H^1 norm into L^2.

    That is ``||Ad^3 (1 + A_h)^{-1/2}||_{2->2}``, the consistency defect on
    smooth data; the plain 2 -> 2 norm only decays like ``h`` because
    ``Ad^3 = 2 t h^2 D`` and ``||D|| ~ 1/h``.
    """
    from .laplacian import assemble_laplacian

    A = assemble_laplacian(grid)
    mu, V = scipy.linalg.eigh(A)
    half_inv = (V * (1.0 + mu) ** -0.5) @ V.T
    a3 = ad(t * A, position_operator(grid, axis), 3)
    return float(scipy.linalg.svdvals(a3 @ half_inv)[0])
