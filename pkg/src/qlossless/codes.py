"""Classical k-ary prefix codes.

Contains Huffman and exponential-cost Huffman construction, Shannon code
lengths, canonical codeword assignment from a length vector, Kraft sums,
and a brute-force search for optimal length vectors used to certify the
tree builders.

Symbols are the indices ``0..d-1`` of a probability vector; every builder
returns words in that index order.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from qlossless.errors import (
    DimensionMismatch,
    DuplicateCodeword,
    InstanceTooLarge,
    KraftViolated,
    ZeroProbabilitySymbol,
)

PROB_TOL = 1e-10
KRAFT_TOL = 1e-12
ZERO_PROB_TOL = 1e-12
CEIL_TOL = 1e-12
LOG_DOMAIN_T = 32.0
ORACLE_MAX_D = 8

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def as_distribution(p, tol: float = PROB_TOL) -> np.ndarray:
    """Validate a probability vector and return it as a float array."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty distribution")
    if np.any(p < -tol) or np.any(p > 1 + tol):
        raise ValueError("probabilities must lie in [0, 1]")
    s = float(p.sum())
    if abs(s - 1.0) > tol:
        raise ValueError(f"probabilities sum to {s!r}, not 1")
    return np.clip(p, 0.0, 1.0)


def _check_k(k: int) -> int:
    if int(k) != k or k < 2 or k > len(DIGITS):
        raise ValueError(f"alphabet size must be an integer in [2, {len(DIGITS)}], got {k!r}")
    return int(k)


@dataclass(frozen=True)
class ClassicalCode:
    """A k-ary code: ``words[i]`` is the codeword of symbol ``i``."""

    k: int
    words: tuple[str, ...]

    def __post_init__(self):
        _check_k(self.k)
        object.__setattr__(self, "words", tuple(self.words))
        alphabet = set(DIGITS[: self.k])
        for w in self.words:
            if not set(w) <= alphabet:
                raise ValueError(f"word {w!r} uses letters outside the {self.k}-ary alphabet")

    @property
    def d(self) -> int:
        return len(self.words)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(w) for w in self.words], dtype=int)

    def is_prefix_free(self) -> bool:
        if len(set(self.words)) != len(self.words):
            return False
        ordered = sorted(self.words)
        # in sorted order a prefix always sits immediately before some word it prefixes
        return not any(b.startswith(a) for a, b in zip(ordered, ordered[1:]))

    def to_json(self) -> dict:
        return {"k": self.k, "words": list(self.words)}

    @classmethod
    def from_json(cls, obj) -> "ClassicalCode":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            k, words = int(obj["k"]), obj["words"]
        except (KeyError, TypeError) as exc:
            raise ValueError("codebook JSON needs 'k' and 'words'") from exc
        if not all(isinstance(w, str) for w in words):
            raise ValueError("codewords must be strings")
        if len(set(words)) != len(words):
            raise DuplicateCodeword("codebook contains repeated words")
        return cls(k, tuple(words))


def kraft_sum(lengths, k: int = 2) -> float:
    """``sum_i k**(-l_i)``, summed exactly and rounded once."""
    _check_k(k)
    total = sum(Fraction(1, k ** int(l)) for l in np.asarray(lengths, dtype=int).ravel())
    return float(total)


def assign_codewords(lengths, k: int = 2, tol: float = KRAFT_TOL) -> ClassicalCode:
    """Canonical prefix code for the given lengths.

    Symbols are visited by increasing length (ties by index) and each gets
    the lexicographically smallest word not yet blocked by a shorter one.
    """
    k = _check_k(k)
    lengths = [int(l) for l in np.asarray(lengths, dtype=int).ravel()]
    if any(l < 0 for l in lengths):
        raise ValueError("lengths must be non-negative")
    ks = kraft_sum(lengths, k)
    if ks > 1 + tol:
        raise KraftViolated(f"Kraft sum {ks!r} exceeds 1")
    words = [""] * len(lengths)
    code = 0
    prev = None
    for i in sorted(range(len(lengths)), key=lambda j: (lengths[j], j)):
        l = lengths[i]
        if prev is not None:
            code = (code + 1) * k ** (l - prev)
        words[i] = _to_base(code, k, l)
        prev = l
    return ClassicalCode(k, tuple(words))


def _to_base(n: int, k: int, width: int) -> str:
    digits = []
    for _ in range(width):
        n, r = divmod(n, k)
        digits.append(DIGITS[r])
    return "".join(reversed(digits))


def shannon_lengths(p, k: int = 2, zero_tol: float = ZERO_PROB_TOL, ceil_tol: float = CEIL_TOL) -> np.ndarray:
    """Shannon code lengths ``ceil(-log_k p_i)``.

    Values of ``-log_k p_i`` within ``ceil_tol`` above an integer are rounded
    down, so exact powers of ``k`` survive floating-point log error.
    """
    k = _check_k(k)
    p = np.asarray(p, dtype=float).ravel()
    if np.any(p <= zero_tol):
        raise ZeroProbabilitySymbol("Shannon lengths need strictly positive probabilities")
    x = -np.log(p) / math.log(k)
    return np.maximum(np.ceil(x - ceil_tol), 0).astype(int)


def shannon_code(p, k: int = 2) -> ClassicalCode:
    return assign_codewords(shannon_lengths(p, k), k)


def _logsumexp(xs) -> float:
    xs = [x for x in xs if x != -math.inf]
    if not xs:
        return -math.inf
    m = max(xs)
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def huffman_lengths(p, k: int = 2, t: float = 0.0) -> np.ndarray:
    """Codeword lengths of the (exponential) Huffman tree.

    Each merge takes the ``k`` lightest nodes and creates a parent of weight
    ``k**t`` times their total. Zero-weight dummy leaves pad the alphabet so
    that every merge is full. ``t = inf`` degenerates to merging by subtree
    height, which minimizes the longest word of positive probability.
    Ties go to the node containing the lowest symbol index.
    """
    k = _check_k(k)
    p = as_distribution(p)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    d = p.size
    if d == 1:
        return np.zeros(1, dtype=int)
    n = d
    while (n - 1) % (k - 1):
        n += 1

    if math.isinf(t):
        keys = [0.0 if i < d and p[i] > 0 else -math.inf for i in range(n)]

        def merge(ks):
            return 1.0 + max(ks)

    elif t > LOG_DOMAIN_T:
        shift = t * math.log(k)
        keys = [math.log(p[i]) if i < d and p[i] > 0 else -math.inf for i in range(n)]

        def merge(ks):
            s = _logsumexp(ks)
            return s + shift if s != -math.inf else s

    else:
        factor = float(k) ** t
        keys = [float(p[i]) if i < d else 0.0 for i in range(n)]

        def merge(ks):
            return factor * math.fsum(ks)

    parent = list(range(n))
    heap = [(keys[i], i, i) for i in range(n)]  # (weight, lowest symbol index, node id)
    heapq.heapify(heap)
    next_id = n
    while len(heap) > 1:
        group = [heapq.heappop(heap) for _ in range(k)]
        node = next_id
        next_id += 1
        parent.append(node)
        for _, _, child in group:
            parent[child] = node
        heapq.heappush(heap, (merge([g[0] for g in group]), min(g[1] for g in group), node))

    root = heap[0][2]
    lengths = np.zeros(d, dtype=int)
    for i in range(d):
        depth, node = 0, i
        while node != root:
            node = parent[node]
            depth += 1
        lengths[i] = depth
    return lengths


def huffman(p, k: int = 2) -> ClassicalCode:
    """Huffman code minimizing ``sum_i p_i l_i``."""
    return assign_codewords(huffman_lengths(p, k, 0.0), k)


def exp_huffman(p, k: int = 2, t: float = 0.0) -> ClassicalCode:
    """Prefix code minimizing ``(1/t) log_k sum_i p_i k**(t l_i)``; ``t = 0`` is plain Huffman."""
    return assign_codewords(huffman_lengths(p, k, t), k)


def classical_avg_length(p, lengths, t: float = 0.0, k: int = 2, zero_tol: float = 0.0) -> float:
    """Exponential average length ``L_t = (1/t) log_k sum_i p_i k**(t l_i)``.

    ``t = 0`` is the linear average ``sum_i p_i l_i`` and ``t = inf`` the
    longest length carrying probability above ``zero_tol``.
    """
    p = np.asarray(p, dtype=float).ravel()
    l = np.asarray(lengths, dtype=float).ravel()
    if p.shape != l.shape:
        raise DimensionMismatch(f"{p.size} probabilities vs {l.size} lengths")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    pos = p > zero_tol
    p, l = p[pos], l[pos]
    if t == 0:
        return float(np.dot(p, l))
    if math.isinf(t):
        return float(l.max())
    p = p / p.sum()
    x = t * math.log(k) * l
    if x.max() < 1.0:
        # small exponents: log1p/expm1 keeps the t -> 0 limit accurate
        return math.log1p(float(np.dot(p, np.expm1(x)))) / (t * math.log(k))
    m = x.max()
    return (m + math.log(float(np.dot(p, np.exp(x - m))))) / (t * math.log(k))


# -- brute-force oracle ------------------------------------------------------


@lru_cache(maxsize=64)
def _candidates(d: int, k: int, l_max: int) -> np.ndarray:
    lo = 0 if d == 1 else 1
    axis = np.arange(lo, l_max + 1, dtype=np.int64)
    # exact Kraft test in integers: sum_i k**(l_max - l_i) <= k**l_max
    units = k ** (l_max - axis)
    cap = k**l_max
    chunks = []
    for head in itertools.product(range(axis.size), repeat=min(d, 2)):
        rest = d - len(head)
        if rest:
            tail = np.indices((axis.size,) * rest).reshape(rest, -1).T
        else:
            tail = np.zeros((1, 0), dtype=np.int64)
        block = np.concatenate([np.broadcast_to(np.array(head), (tail.shape[0], len(head))), tail], axis=1)
        ok = units[block].sum(axis=1) <= cap
        chunks.append(axis[block[ok]])
    out = np.concatenate(chunks)
    out.setflags(write=False)
    return out


def default_oracle_l_max(d: int, k: int) -> int:
    """A search cap that always contains an optimal length vector."""
    if d == 1:
        return 0
    return max(d - 1, math.ceil(math.log(d, k) - CEIL_TOL))


def oracle_optimal_lengths(p, k: int = 2, t: float = 0.0, l_max: int | None = None) -> np.ndarray:
    """Exhaustively search length vectors for the minimum exponential cost.

    Every integer vector with entries in ``[1, l_max]`` (``[0, 0]`` when
    ``d = 1``) satisfying Kraft is scored by ``sum_i p_i k**(t l_i)``
    (``sum_i p_i l_i`` at ``t = 0``, longest positive-probability word at
    ``t = inf``). Ties go to the lexicographically smallest sorted vector,
    then to the lexicographically smallest vector.
    """
    k = _check_k(k)
    p = as_distribution(p)
    d = p.size
    if d > ORACLE_MAX_D:
        raise InstanceTooLarge(f"oracle supports d <= {ORACLE_MAX_D}, got {d}")
    if l_max is None:
        l_max = default_oracle_l_max(d, k)
    need = 0 if d == 1 else math.ceil(math.log(d, k) - CEIL_TOL)
    if l_max < need:
        raise ValueError(f"l_max={l_max} cannot hold {d} words")
    cand = _candidates(d, k, int(l_max))
    if math.isinf(t):
        pos = p > 0
        score = cand[:, pos].max(axis=1).astype(float)
    elif t == 0:
        score = cand @ p
    else:
        pos = p > 0
        x = t * math.log(k) * cand[:, pos] + np.log(p[pos])
        m = x.max(axis=1, keepdims=True)
        score = (m + np.log(np.exp(x - m).sum(axis=1, keepdims=True))).ravel()
    best = score.min()
    tie = np.flatnonzero(score <= best + 1e-12 * max(1.0, abs(best)))
    rows = [tuple(cand[i]) for i in tie]
    return np.array(min(rows, key=lambda r: (tuple(sorted(r)), r)), dtype=int)
