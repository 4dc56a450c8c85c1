"""Quantum variable-length encoding into the Fock space of k-ary strings.

A :class:`QuantumEncoder` pairs an orthonormal basis ``{e_i}`` of the source
space with classical codewords ``c(i)`` and realizes the isometry
``U = sum_i |c(i)><e_i|``. Codewords live in a :class:`FockVector`, a sparse
map from strings to amplitudes; only finitely many strings are ever occupied.

Length measures are evaluated without materializing ``U rho U^dagger``:
every trace against a function of the length observable reduces to the
diagonal weights ``<e_i|rho|e_i>``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from qlossless.codes import ClassicalCode, classical_avg_length, kraft_sum
from qlossless.errors import (
    DimensionMismatch,
    DuplicateCodeword,
    NonOrthonormalBasis,
    UnparsableString,
)
from qlossless.linalg import DensityOperator, validate_density

PRUNE_TOL = 1e-12
ORTHO_TOL = 1e-9
NORM_TOL = 1e-9


@dataclass(frozen=True)
class FockVector:
    """Sparse superposition of k-ary strings. ``""`` is the empty word."""

    k: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        pruned = {s: complex(a) for s, a in self.terms.items() if abs(a) > PRUNE_TOL}
        object.__setattr__(self, "terms", pruned)

    def norm(self) -> float:
        return math.sqrt(math.fsum(abs(a) ** 2 for a in self.terms.values()))

    def inner(self, other: "FockVector") -> complex:
        """``<self|other>``."""
        return sum(np.conj(a) * other.terms.get(s, 0.0) for s, a in self.terms.items())

    def length_distribution(self) -> dict[int, float]:
        """``l -> <w|Pi_l|w>``: probability of finding a word of length ``l``."""
        out: dict[int, float] = {}
        for s, a in self.terms.items():
            out[len(s)] = out.get(len(s), 0.0) + abs(a) ** 2
        return dict(sorted(out.items()))

    def is_length_eigenstate(self) -> bool:
        return len(self.length_distribution()) == 1

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "terms": {s: [float(a.real), float(a.imag)] for s, a in sorted(self.terms.items(), key=lambda x: (len(x[0]), x[0]))},
        }

    @classmethod
    def from_json(cls, obj) -> "FockVector":
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = {}
        for s, v in obj["terms"].items():
            terms[s] = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        return cls(int(obj["k"]), terms)


@dataclass(frozen=True, eq=False)
class QuantumEncoder:
    """Lossless encoder ``U = sum_i |c(i)><e_i|``; ``basis[:, i]`` is ``e_i``."""

    basis: np.ndarray
    code: ClassicalCode

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @property
    def words(self) -> tuple[str, ...]:
        return self.code.words

    @property
    def lengths(self) -> np.ndarray:
        return self.code.lengths

    def coefficients(self, s) -> np.ndarray:
        """``<e_i|s>`` for every basis vector."""
        s = np.asarray(s, dtype=complex).ravel()
        if s.size != self.d:
            raise DimensionMismatch(f"state has dimension {s.size}, encoder expects {self.d}")
        return self.basis.conj().T @ s

    def diagonal_weights(self, rho) -> np.ndarray:
        """``<e_i|rho|e_i>`` for every basis vector."""
        m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
        if m.shape != (self.d, self.d):
            raise DimensionMismatch(f"operator is {m.shape}, encoder expects {self.d}x{self.d}")
        b = self.basis
        return np.real(np.einsum("ij,ik,kj->j", b.conj(), m, b))


@dataclass(frozen=True, eq=False)
class SourceEnsemble:
    """Quantum source ``{p_n, |s_n>}``."""

    probs: np.ndarray
    states: np.ndarray  # shape (N, d)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        states = np.atleast_2d(np.asarray(self.states, dtype=complex))
        if probs.size != states.shape[0]:
            raise DimensionMismatch(f"{probs.size} probabilities for {states.shape[0]} states")
        if abs(probs.sum() - 1.0) > 1e-10 or np.any(probs < 0):
            raise ValueError("ensemble probabilities must be non-negative and sum to 1")
        norms = np.linalg.norm(states, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_TOL):
            raise ValueError("ensemble states must be normalized")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", states)

    @property
    def d(self) -> int:
        return self.states.shape[1]

    def density(self) -> DensityOperator:
        m = np.einsum("n,ni,nj->ij", self.probs, self.states, self.states.conj())
        return validate_density(m)


def build_encoder(basis, code: ClassicalCode, tol: float = ORTHO_TOL) -> QuantumEncoder:
    """Pair an orthonormal basis (as matrix columns) with a classical code.

    Raises:
        DimensionMismatch: basis size and word count differ.
        NonOrthonormalBasis: Gram matrix deviates from identity beyond ``tol``.
        DuplicateCodeword: two symbols share a word, so ``U`` is not an isometry.
    """
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionMismatch(f"basis must be a square matrix of column vectors, got {b.shape}")
    if b.shape[1] != code.d:
        raise DimensionMismatch(f"{b.shape[1]} basis vectors for {code.d} codewords")
    gram_err = float(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))))
    if gram_err > tol:
        raise NonOrthonormalBasis(f"max |B^dagger B - I| = {gram_err:.3e}")
    if len(set(code.words)) != code.d:
        raise DuplicateCodeword("codewords must be pairwise distinct")
    b = b.copy()
    b.setflags(write=False)
    return QuantumEncoder(b, code)


def encode(enc: QuantumEncoder, s) -> FockVector:
    """``U|s> = sum_i <e_i|s> |c(i)>``."""
    amps = enc.coefficients(s)
    return FockVector(enc.k, dict(zip(enc.words, amps)))


def encode_block(enc: QuantumEncoder, states: Sequence) -> FockVector:
    """Encode a product ``|s_1>...|s_M>`` into concatenated codewords."""
    if len(states) < 1:
        raise ValueError("block size M must be >= 1")
    terms = {"": 1.0 + 0j}
    for s in states:
        amps = enc.coefficients(s)
        nxt = {}
        for prefix, a in terms.items():
            for w, b in zip(enc.words, amps):
                if abs(b) > PRUNE_TOL:
                    nxt[prefix + w] = a * b
        terms = nxt
    return FockVector(enc.k, terms)


def _parses(words: Sequence[str], s: str, m: int) -> list[tuple[int, ...]]:
    """All ways to split ``s`` into exactly ``m`` codewords."""
    out = []

    def walk(pos, acc):
        if len(acc) == m:
            if pos == len(s):
                out.append(tuple(acc))
            return
        for i, w in enumerate(words):
            if s.startswith(w, pos):
                acc.append(i)
                walk(pos + len(w), acc)
                acc.pop()
                if len(out) > 1:
                    return

    walk(0, [])
    return out


def decode(enc: QuantumEncoder, w: FockVector, m: int = 1) -> np.ndarray:
    """Invert ``U^M``: recover the source-space tensor of shape ``(d,) * m``.

    The result is expressed in the standard coordinates of the source space,
    so ``decode(enc, encode_block(enc, [s1, s2]), 2)`` equals ``s1 (x) s2``.

    Raises:
        UnparsableString: a term is not a concatenation of ``m`` codewords, or
            admits more than one split.
    """
    if m < 1:
        raise ValueError("block size M must be >= 1")
    if w.k != enc.k:
        raise DimensionMismatch(f"vector is {w.k}-ary, code is {enc.k}-ary")
    d = enc.d
    coeffs = np.zeros((d,) * m, dtype=complex)
    for s, a in w.terms.items():
        found = _parses(enc.words, s, m)
        if len(found) != 1:
            what = "no" if not found else "ambiguous"
            raise UnparsableString(f"{what} parse of {s!r} into {m} codeword(s)")
        coeffs[found[0]] += a
    out = coeffs
    for axis in range(m):
        out = np.moveaxis(np.tensordot(enc.basis, out, axes=([1], [axis])), 0, axis)
    return out


def t_codeword_length(w: FockVector, t: float = 0.0) -> float:
    """Exponential length ``(1/t) log_k <w|k^(t Lambda)|w>`` of a codeword.

    ``t = 0`` gives the expected length and ``t = inf`` the base length,
    the longest word carrying non-negligible amplitude.
    """
    dist = w.length_distribution()
    lengths = np.fromiter(dist.keys(), dtype=float)
    weights = np.fromiter(dist.values(), dtype=float)
    return classical_avg_length(weights / weights.sum(), lengths, t, w.k)


def base_length(w: FockVector) -> int:
    return int(t_codeword_length(w, math.inf))


def source_t_avg_length(enc: QuantumEncoder, rho, t: float = 0.0, tol: float = PRUNE_TOL**2) -> float:
    """``(1/t) log_k Tr(U rho U^dagger k^(t Lambda))`` via ``sum_i <e_i|rho|e_i> k^(t l_i)``."""
    rho = validate_density(rho)
    w = np.clip(enc.diagonal_weights(rho), 0.0, None)
    return classical_avg_length(w, enc.lengths, t, enc.k, zero_tol=tol)


def ensemble_t_avg_length(enc: QuantumEncoder, ensemble: SourceEnsemble, t: float = 0.0) -> float:
    """Same quantity evaluated state by state: ``sum_n p_n sum_i |<e_i|s_n>|^2 k^(t l_i)``."""
    w = np.zeros(enc.d)
    for p, s in zip(ensemble.probs, ensemble.states):
        w += p * np.abs(enc.coefficients(s)) ** 2
    return classical_avg_length(w / w.sum(), enc.lengths, t, enc.k, zero_tol=PRUNE_TOL**2)


def source_base_length(enc: QuantumEncoder, ensemble: SourceEnsemble | Iterable) -> int:
    """Largest base length over the ensemble members."""
    states = ensemble.states if isinstance(ensemble, SourceEnsemble) else ensemble
    return max(base_length(encode(enc, s)) for s in states)


def quantum_kraft_sum(enc: QuantumEncoder) -> float:
    """``Tr(U^dagger k^(-Lambda) U)``, which equals ``sum_i k^(-l_i)``."""
    return kraft_sum(enc.lengths, enc.k)


def code_induced_state(enc: QuantumEncoder) -> tuple[DensityOperator, float]:
    """``sigma = U^dagger k^(-Lambda) U / beta`` and ``beta = Tr(U^dagger k^(-Lambda) U)``."""
    beta = quantum_kraft_sum(enc)
    weights = np.array([float(enc.k) ** -int(l) for l in enc.lengths]) / beta
    b = enc.basis
    sigma = (b * weights) @ b.conj().T
    return validate_density(0.5 * (sigma + sigma.conj().T)), beta


def ensemble_from_json(obj) -> SourceEnsemble:
    """Parse ``{"probs": [...], "states": [[[re, im], ...], ...]}``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    probs = obj["probs"]
    states = [[complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in s] for s in obj["states"]]
    return SourceEnsemble(np.array(probs, dtype=float), np.array(states, dtype=complex))
