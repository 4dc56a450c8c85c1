"""Dense Hermitian linear algebra for small density operators.

Everything here works on ``d x d`` complex numpy arrays with ``d`` at most a
few dozen. Two eigensolvers are available: LAPACK (through numpy) and a
cyclic complex Jacobi sweep, which is mostly useful as an independent check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from qlossless.errors import (
    DomainError,
    NegativeEigenvalue,
    NoConvergence,
    NotHermitian,
    NotUnitTrace,
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEGATIVE_EIG_TOL = 1e-10
DEGENERACY_TOL = 1e-12
JACOBI_MAX_SWEEPS = 50


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted in descending order and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated density matrix.

    Instances are built through :func:`validate_density`, which guarantees
    Hermiticity, unit trace and a non-negative spectrum. The spectral
    decomposition is computed lazily and cached.
    """

    matrix: np.ndarray
    method: str = field(default="lapack", repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return _decompose(self.matrix, method=self.method)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    def rank(self, tol: float = DEGENERACY_TOL) -> int:
        return int(np.count_nonzero(self.eigenvalues > tol))

    @classmethod
    def diagonal(cls, probs) -> "DensityOperator":
        return validate_density(np.diag(np.asarray(probs, dtype=float)))


def as_matrix(entries) -> np.ndarray:
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def validate_density(
    matrix,
    hermitian_tol: float = HERMITIAN_TOL,
    trace_tol: float = TRACE_TOL,
    negative_tol: float = NEGATIVE_EIG_TOL,
    method: str = "lapack",
) -> DensityOperator:
    """Check that ``matrix`` is a density operator and return a cleaned copy.

    Small violations within tolerance are repaired: the matrix is symmetrized,
    eigenvalues in ``(-negative_tol, 0)`` are clamped to zero, and the trace
    is renormalized to one.

    Raises:
        NotHermitian: if ``max |A - A^dagger|`` exceeds ``hermitian_tol``.
        NotUnitTrace: if ``|Tr A - 1|`` exceeds ``trace_tol``.
        NegativeEigenvalue: if some eigenvalue is below ``-negative_tol``.
    """
    if isinstance(matrix, DensityOperator):
        return matrix
    a = as_matrix(matrix)
    herm_err = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if herm_err > hermitian_tol:
        raise NotHermitian(f"max |A - A^dagger| = {herm_err:.3e} exceeds {hermitian_tol:.1e}")
    a = 0.5 * (a + a.conj().T)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > trace_tol:
        raise NotUnitTrace(f"trace = {tr!r} deviates from 1 by {abs(tr - 1.0):.3e}")
    spec = _decompose(a, method=method)
    lam = spec.eigenvalues
    if lam[-1] < -negative_tol:
        raise NegativeEigenvalue(f"eigenvalue {lam[-1]:.3e} is below -{negative_tol:.1e}")
    if lam[-1] < 0.0 or lam[0] > 1.0:
        lam = np.clip(lam, 0.0, 1.0)
        a = (spec.eigenvectors * lam) @ spec.eigenvectors.conj().T
        a = 0.5 * (a + a.conj().T)
    a = a / np.trace(a).real
    a.setflags(write=False)
    return DensityOperator(a, method=method)


def eigh(rho, method: str | None = None) -> SpectralDecomposition:
    """Spectral decomposition with eigenvalues sorted in descending order.

    Each eigenvector is rotated so its largest-magnitude component is real and
    positive (first such index on near ties). For degenerate eigenvalues any
    orthonormal basis of the eigenspace may come back.
    """
    if isinstance(rho, DensityOperator):
        if method is None or method == rho.method:
            return rho.spectrum
        return _decompose(rho.matrix, method=method)
    return _decompose(as_matrix(rho), method=method or "lapack")


def mat_fn(rho, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian operator through its spectrum.

    ``f`` receives the whole eigenvalue vector and must return values of the
    same shape. A non-finite result raises :class:`DomainError`.
    """
    spec = eigh(rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(f(spec.eigenvalues))
    if vals.shape != spec.eigenvalues.shape:
        raise ValueError("f must map the eigenvalue vector elementwise")
    if not np.all(np.isfinite(vals)):
        bad = spec.eigenvalues[~np.isfinite(vals)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad}")
    v = spec.eigenvectors
    return (v * vals) @ v.conj().T


def power_fn(a: float, tol: float = DEGENERACY_TOL) -> Callable[[np.ndarray], np.ndarray]:
    """``x -> x**a`` restricted to the support: eigenvalues ``<= tol`` map to 0.

    For ``a > 0`` this is the usual convention ``0**a = 0``; for ``a <= 0``
    it is the generalized (support-restricted) inverse power.
    """

    def f(x: np.ndarray) -> np.ndarray:
        out = np.zeros_like(x, dtype=float)
        pos = x > tol
        out[pos] = x[pos] ** a
        return out

    return f


def _decompose(a: np.ndarray, method: str = "lapack") -> SpectralDecomposition:
    if method == "lapack":
        w, v = np.linalg.eigh(a)
    elif method == "jacobi":
        w, v = jacobi_eigh(a)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-w, kind="stable")
    w = np.real(w[order]).astype(float)
    v = _fix_phases(np.asarray(v, dtype=complex)[:, order])
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def _fix_phases(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        mag = np.abs(col)
        idx = int(np.flatnonzero(mag >= mag.max() - 1e-9)[0])
        v[:, j] = col * (np.conj(col[idx]) / mag[idx])
    return v


def jacobi_eigh(a, max_sweeps: int = JACOBI_MAX_SWEEPS, tol: float = 1e-15):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` in no particular order.

    Raises:
        NoConvergence: if the off-diagonal norm is still above
            ``tol * ||A||_F`` after ``max_sweeps`` full sweeps.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                mod = abs(b)
                if mod <= 1e-300:
                    continue
                # Phase-rotate column q so the pivot is real, then apply a real rotation.
                phase = b / mod
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mod)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


# -- JSON matrix format ------------------------------------------------------


def _parse_entry(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(y, (int, float)) and not isinstance(y, bool) for y in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise ValueError(f"malformed matrix entry {x!r}")


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"dim": d, "entries": [[[re, im], ...], ...]}`` (row-major)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        dim = int(obj["dim"])
        rows = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix JSON needs 'dim' and 'entries'") from exc
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValueError(f"entries must be {dim}x{dim}")
    return np.array([[_parse_entry(x) for x in r] for r in rows], dtype=complex)


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }
