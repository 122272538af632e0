"""Spectral multipliers ``m(A)`` realised as ``Q m(Lambda) Q^T W``.

Covers the heat and fractional semigroups, resolvent powers
``(1 + tA)^{-M}``, the unitary group ``exp(i tau R)``, dyadic
Littlewood-Paley blocks and the auxiliary cut-offs used to rewrite a
Schwartz multiplier as a function of the resolvent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import GridFunction
from .laplacian import SpectralDecomposition


class MultiplierError(ValueError):
    """A multiplier is undefined, NaN or overflows on the spectrum."""


@dataclass(frozen=True)
class SpectralMultiplier:
    """Scalar rule ``lambda -> m(lambda)`` with a name and parameter record."""

    name: str
    rule: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    params: dict = field(default_factory=dict)

    def __call__(self, lam) -> np.ndarray:
        return self.rule(np.asarray(lam, dtype=float))

    def __mul__(self, other: "SpectralMultiplier") -> "SpectralMultiplier":
        return SpectralMultiplier(f"{self.name}*{other.name}",
                                  lambda lam: self.rule(lam) * other.rule(lam),
                                  {**self.params, **{f"{other.name}.{k}": v for k, v in other.params.items()}})


def _check_t(t):
    if not t >= 0:
        raise ValueError(f"t must be non-negative, got {t}")


def identity() -> SpectralMultiplier:
    return SpectralMultiplier("identity", lambda lam: np.ones_like(lam))


def heat(t: float) -> SpectralMultiplier:
    """``exp(-t lambda)``."""
    _check_t(t)
    return SpectralMultiplier("heat", lambda lam: np.exp(-t * lam), {"t": t})


def fractional(t: float, alpha: float) -> SpectralMultiplier:
    """``exp(-t lambda^(alpha/2))``; ``alpha = 2`` is bit-identical to :func:`heat`."""
    _check_t(t)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    half = alpha / 2
    return SpectralMultiplier("frac", lambda lam: np.exp(-t * lam**half), {"t": t, "alpha": alpha})


def resolvent(t: float, M: int) -> SpectralMultiplier:
    """``(1 + t lambda)^(-M)``."""
    _check_t(t)
    if int(M) != M or M < 0:
        raise ValueError(f"M must be a non-negative integer, got {M}")
    M = int(M)
    return SpectralMultiplier("resolvent", lambda lam: (1.0 + t * lam) ** (-M), {"t": t, "M": M})


def unitary(tau: float, t: float, M: int) -> SpectralMultiplier:
    """``exp(i tau (1 + t lambda)^(-M))``."""
    r = resolvent(t, M)
    return SpectralMultiplier("unitary", lambda lam: np.exp(1j * tau * r.rule(lam)),
                              {"tau": tau, "t": t, "M": int(M)})


def smooth_ramp(x) -> np.ndarray:
    """C^inf ramp: 0 for ``x <= 0``, 1 for ``x >= 1``, built from ``exp(-1/x)``."""
    x = np.asarray(x, dtype=float)

    def g(y):
        out = np.zeros_like(y)
        pos = y > 0
        out[pos] = np.exp(-1.0 / y[pos])
        return out

    a, b = g(x), g(1.0 - x)
    return a / (a + b)


def cutoff(xi) -> np.ndarray:
    """Smooth ``chi``: 1 on ``(-inf, 1]``, 0 on ``[2, inf)``, non-increasing."""
    return smooth_ramp(2.0 - np.asarray(xi, dtype=float))


def phi0(xi) -> np.ndarray:
    """Dyadic profile ``chi(xi) - chi(2 xi)``, supported in ``[1/2, 2]``."""
    xi = np.asarray(xi, dtype=float)
    return cutoff(xi) - cutoff(2.0 * xi)


@dataclass(frozen=True)
class DyadicPartition:
    """Finite Littlewood-Paley family ``phi_j(xi) = phi0(2^-j xi)``, ``j_min <= j <= j_max``.

    The end blocks are clamped cumulative tails
    (``sum_{j <= j_min} phi_j = chi(2^-j_min xi)`` and
    ``sum_{j >= j_max} phi_j = 1 - chi(2^(1-j_max) xi)``) so that the blocks
    sum to one for every ``xi > 0``.  The variable ``xi`` is ``sqrt(lambda)``.
    """

    j_min: int
    j_max: int

    @property
    def indices(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def block(self, j: int, xi) -> np.ndarray:
        if not self.j_min <= j <= self.j_max:
            raise ValueError(f"block {j} outside [{self.j_min}, {self.j_max}]")
        xi = np.asarray(xi, dtype=float)
        if self.j_min == self.j_max:
            return np.ones_like(xi)
        if j == self.j_min:
            return cutoff(2.0**-j * xi)
        if j == self.j_max:
            return 1.0 - cutoff(2.0 ** (1 - j) * xi)
        return cutoff(2.0**-j * xi) - cutoff(2.0 ** (1 - j) * xi)

    def support(self, j: int) -> tuple[float, float]:
        """Support interval in ``xi`` of an unclamped block."""
        return 2.0 ** (j - 1), 2.0 ** (j + 1)

    def multiplier(self, j: int) -> SpectralMultiplier:
        """``phi_j(sqrt(lambda))`` as a spectral multiplier."""
        return SpectralMultiplier("dyadic", lambda lam: self.block(j, np.sqrt(np.maximum(lam, 0.0))),
                                  {"j": j})

    def total(self, xi) -> np.ndarray:
        return sum(self.block(j, xi) for j in self.indices)


def dyadic_partition(lambda_min: float, lambda_max: float) -> DyadicPartition:
    """Smallest dyadic range whose unclamped blocks already sum to one on ``[sqrt(lambda_min), sqrt(lambda_max)]``."""
    if not lambda_min > 0:
        raise ValueError("lambda_min must be positive")
    if lambda_max < lambda_min:
        raise ValueError("lambda_max must be >= lambda_min")
    j_min = math.floor(math.log2(math.sqrt(lambda_min)))
    j_max = math.ceil(math.log2(math.sqrt(lambda_max)))
    return DyadicPartition(j_min, max(j_max, j_min))


def bump_rho(mu) -> np.ndarray:
    """Smooth ``rho``: 1 on ``[0, 2]``, 0 outside ``(-1, 3)``."""
    mu = np.asarray(mu, dtype=float)
    return smooth_ramp(mu + 1.0) * smooth_ramp(3.0 - mu)


def weighted_schwartz(phi: Callable, beta: int) -> Callable:
    """``phi_tilde(lambda) = (1 + lambda)^beta phi(lambda)``."""
    return lambda lam: (1.0 + np.asarray(lam, dtype=float)) ** beta * phi(lam)


def resolvent_profile(phi_tilde: Callable, M: int) -> Callable:
    """``psi(mu) = rho(mu) mu^-1 phi_tilde(mu^(-1/M) - 1)`` (zero for ``mu <= 0``)."""
    def psi(mu):
        mu = np.asarray(mu, dtype=float)
        out = np.zeros_like(mu)
        pos = mu > 0
        m = mu[pos]
        out[pos] = bump_rho(m) / m * phi_tilde(m ** (-1.0 / M) - 1.0)
        return out
    return psi


def resolvent_rewrite_defect(phi_tilde: Callable, M: int, t: float, eigenvalues) -> float:
    """``max |phi_tilde(t lambda) - R psi(R)|`` with ``R = (1 + t lambda)^-M``."""
    lam = np.asarray(eigenvalues, dtype=float)
    R = (1.0 + t * lam) ** (-M)
    psi = resolvent_profile(phi_tilde, M)
    return float(np.abs(phi_tilde(t * lam) - R * psi(R)).max())


def _values_on_spectrum(S: SpectralDecomposition, m: SpectralMultiplier) -> np.ndarray:
    with np.errstate(over="raise", invalid="raise"):
        try:
            vals = np.asarray(m(S.eigenvalues))
        except FloatingPointError as exc:
            raise MultiplierError(f"multiplier {m.name} overflows on the spectrum") from exc
    if not np.all(np.isfinite(vals)):
        raise MultiplierError(f"multiplier {m.name} is not finite on the spectrum")
    return vals


def apply_multiplier(S: SpectralDecomposition, m: SpectralMultiplier, u: GridFunction) -> GridFunction:
    """``m(A) u = Q m(Lambda) Q^T W u``."""
    vals = _values_on_spectrum(S, m)
    coeff = S.Q.T @ u.values * S.weight
    return GridFunction(u.grid, S.Q @ (vals * coeff))


def multiplier_matrix(S: SpectralDecomposition, m: SpectralMultiplier) -> np.ndarray:
    """Dense matrix of ``m(A)``; real symmetric whenever ``m`` is real."""
    vals = _values_on_spectrum(S, m)
    if np.iscomplexobj(vals):
        # two real products are cheaper than one complex one
        re = (S.Q * vals.real) @ S.Q.T
        im = (S.Q * vals.imag) @ S.Q.T
        return (re + 1j * im) * S.weight
    return (S.Q * vals) @ S.Q.T * S.weight


def heat_semigroup(S: SpectralDecomposition, t: float) -> np.ndarray:
    return multiplier_matrix(S, heat(t))


def fractional_semigroup(S: SpectralDecomposition, t: float, alpha: float) -> np.ndarray:
    return multiplier_matrix(S, fractional(t, alpha))


def resolvent_power(S: SpectralDecomposition, t: float, M: int) -> np.ndarray:
    return multiplier_matrix(S, resolvent(t, M))


def unitary_group(S: SpectralDecomposition, tau: float, t: float, M: int) -> np.ndarray:
    """Complex ``exp(i tau R_{M,t})``, unitary in the weighted inner product."""
    return multiplier_matrix(S, unitary(tau, t, M))


_FACTORIES = {
    "identity": (identity, ()),
    "heat": (heat, ("t",)),
    "frac": (fractional, ("t", "alpha")),
    "resolvent": (resolvent, ("t", "M")),
    "unitary": (unitary, ("tau", "t", "M")),
}


def multiplier_from_config(kind: str, **params) -> SpectralMultiplier:
    """Build a multiplier by name, e.g. ``multiplier_from_config("frac", t=0.1, alpha=1.5)``."""
    if kind not in _FACTORIES:
        raise ValueError(f"unknown multiplier kind {kind!r}; expected one of {sorted(_FACTORIES)}")
    factory, names = _FACTORIES[kind]
    missing = [k for k in names if k not in params]
    extra = sorted(set(params) - set(names))
    if missing or extra:
        raise ValueError(f"{kind}: missing {missing}, unexpected {extra}")
    args = [params[k] for k in names]
    if "M" in names:
        args[names.index("M")] = int(params["M"])
    return factory(*args)
