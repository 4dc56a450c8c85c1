"""Entropies and divergences of density operators, in base-``k`` units.

Values that diverge (relative entropy or Renyi divergence with a support
violation) are returned as ``math.inf``; callers branch on ``math.isinf``.
"""

from __future__ import annotations

import math

import numpy as np

from qlossless.errors import AlphaIsOne, AlphaOutOfRange, DimensionMismatch
from qlossless.linalg import DensityOperator, mat_fn, power_fn, validate_density

SUPPORT_TOL = 1e-12

INF = math.inf


def _check_k(k: int) -> None:
    if int(k) != k or k < 2:
        raise ValueError(f"alphabet size k must be an integer >= 2, got {k!r}")


def _support(p: np.ndarray, tol: float) -> np.ndarray:
    return p[p > tol]


def von_neumann(rho, k: int = 2, tol: float = SUPPORT_TOL) -> float:
    """``S(rho) = -sum_i rho_i log_k rho_i`` with ``0 log 0 = 0``."""
    _check_k(k)
    p = _support(validate_density(rho).eigenvalues, tol)
    return max(0.0, float(-np.sum(p * np.log(p)) / math.log(k)))


def renyi(rho, alpha: float, k: int = 2, tol: float = SUPPORT_TOL) -> float:
    """Quantum Renyi entropy ``log_k(Tr rho^alpha) / (1 - alpha)``.

    ``alpha = 0`` gives ``log_k rank(rho)`` and ``alpha = inf`` the
    min-entropy. ``alpha = 1`` is rejected; use :func:`von_neumann`.
    """
    _check_k(k)
    if alpha < 0:
        raise AlphaOutOfRange(f"Renyi order must be >= 0, got {alpha}")
    if alpha == 1:
        raise AlphaIsOne("order 1 is the von Neumann entropy")
    p = _support(validate_density(rho).eigenvalues, tol)
    if alpha == 0:
        return math.log(p.size) / math.log(k)
    if math.isinf(alpha):
        return -math.log(p.max()) / math.log(k)
    # log-sum-exp of alpha*log p for accuracy when alpha is large
    x = alpha * np.log(p)
    m = x.max()
    log_tr = m + math.log(float(np.sum(np.exp(x - m))))
    return max(0.0, log_tr / ((1.0 - alpha) * math.log(k)))


def entropy_of_order(rho, alpha: float, k: int = 2) -> float:
    """Renyi entropy of any order, with ``alpha = 1`` meaning von Neumann."""
    if alpha == 1:
        return von_neumann(rho, k)
    return renyi(rho, alpha, k)


def _pair(rho, tau) -> tuple[DensityOperator, DensityOperator]:
    rho, tau = validate_density(rho), validate_density(tau)
    if rho.dim != tau.dim:
        raise DimensionMismatch(f"dimensions differ: {rho.dim} vs {tau.dim}")
    return rho, tau


def _weights_in_basis(rho: DensityOperator, basis: np.ndarray) -> np.ndarray:
    # <b_j| rho |b_j> for each basis column b_j
    return np.real(np.einsum("ij,ik,kj->j", basis.conj(), rho.matrix, basis))


def relative_entropy(rho, tau, k: int = 2, tol: float = SUPPORT_TOL) -> float:
    """``S(rho||tau) = Tr[rho (log_k rho - log_k tau)]``; ``inf`` if supp(rho) is not in supp(tau)."""
    _check_k(k)
    rho, tau = _pair(rho, tau)
    t_vals = tau.eigenvalues
    w = _weights_in_basis(rho, tau.eigenvectors)
    outside = t_vals <= tol
    if np.any(w[outside] > tol):
        return INF
    inside = ~outside
    cross = float(-np.sum(w[inside] * np.log(t_vals[inside])) / math.log(k))
    value = cross - von_neumann(rho, k, tol)
    return max(value, 0.0) if value > -1e-9 else value


def renyi_divergence(rho, sigma, alpha: float, k: int = 2, tol: float = SUPPORT_TOL) -> float:
    """Petz Renyi divergence ``log_k(Tr rho^alpha sigma^(1-alpha)) / (alpha - 1)`` for ``alpha > 1``.

    Works for non-commuting pairs. Returns ``inf`` when supp(rho) is not
    contained in supp(sigma).
    """
    _check_k(k)
    if not alpha > 1 or math.isinf(alpha):
        raise AlphaOutOfRange(f"divergence order must be a finite alpha > 1, got {alpha}")
    rho, sigma = _pair(rho, sigma)
    w = _weights_in_basis(rho, sigma.eigenvectors)
    if np.any(w[sigma.eigenvalues <= tol] > tol):
        return INF
    a = mat_fn(rho, power_fn(alpha, tol))
    b = mat_fn(sigma, power_fn(1.0 - alpha, tol))
    tr = float(np.real(np.einsum("ij,ji->", a, b)))
    value = math.log(tr) / ((alpha - 1.0) * math.log(k))
    return max(value, 0.0) if value > -1e-9 else value


def escort(rho, t: float, tol: float = SUPPORT_TOL) -> DensityOperator:
    """Escort operator ``rho^(1/(1+t)) / Tr rho^(1/(1+t))``.

    ``t = 0`` returns ``rho`` itself; ``t = inf`` gives the normalized
    projector onto the support.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    rho = validate_density(rho)
    if t == 0:
        return rho
    spec = rho.spectrum
    p = spec.eigenvalues
    q = np.zeros_like(p)
    pos = p > tol
    if math.isinf(t):
        q[pos] = 1.0
    else:
        q[pos] = np.exp(np.log(p[pos]) / (1.0 + t))
    q /= q.sum()
    v = spec.eigenvectors
    m = (v * q) @ v.conj().T
    return validate_density(0.5 * (m + m.conj().T), method=rho.method)


def escort_probs(p, t: float, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Classical escort distribution ``p^(1/(1+t)) / sum p^(1/(1+t))``."""
    p = np.asarray(p, dtype=float)
    q = np.zeros_like(p)
    pos = p > tol
    if math.isinf(t):
        q[pos] = 1.0
    elif t == 0:
        q[pos] = p[pos]
    else:
        q[pos] = np.exp(np.log(p[pos]) / (1.0 + t))
    return q / q.sum()


def classical_renyi(p, alpha: float, k: int = 2, tol: float = SUPPORT_TOL) -> float:
    """Renyi entropy of a probability vector (Shannon entropy at ``alpha = 1``)."""
    p = _support(np.asarray(p, dtype=float), tol)
    lk = math.log(k)
    if alpha == 1:
        return max(0.0, float(-np.sum(p * np.log(p)) / lk))
    if alpha == 0:
        return math.log(p.size) / lk
    if math.isinf(alpha):
        return -math.log(p.max()) / lk
    x = alpha * np.log(p)
    m = x.max()
    return max(0.0, (m + math.log(float(np.sum(np.exp(x - m))))) / ((1.0 - alpha) * lk))
