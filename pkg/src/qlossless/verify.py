"""Numerical checks of the entropy bounds and length identities.

Each ``check_*`` function builds the relevant encoder, evaluates the length
it achieves, and returns a :class:`BoundReport` with the entropic lower and
upper bounds. :func:`run_suite` sweeps random sources over a grid of
dimensions, alphabet sizes and penalization parameters.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

import numpy as np

from qlossless import entropy
from qlossless.codes import assign_codewords, classical_avg_length, exp_huffman, huffman_lengths, shannon_lengths
from qlossless.entropy import entropy_of_order, escort, relative_entropy, renyi_divergence
from qlossless.errors import InfiniteBound, InstanceTooLarge, ZeroEigenvalue
from qlossless.linalg import DensityOperator, validate_density
from qlossless.qcode import (
    QuantumEncoder,
    build_encoder,
    code_induced_state,
    quantum_kraft_sum,
    source_t_avg_length,
)

BOUND_TOL = 1e-9
IDENTITY_TOL = 1e-8
KRAFT_TOL = 1e-12
SUPPORT_TOL = 1e-12
BLOCK_MAX_SYMBOLS = 10**6

DEFAULT_DIMS = (2, 3, 4, 5, 6, 7, 8)
DEFAULT_KS = (2, 3)
DEFAULT_TS = (0.0, 0.5, 1.0, 2.0, 8.0)
DEFAULT_TRIALS = 20


@dataclass
class BoundReport:
    """Outcome of one bound check: ``lower <= achieved < upper`` up to ``tol``."""

    theorem_id: str
    lower: float
    achieved: float
    upper: float
    params: dict = field(default_factory=dict)
    tol: float = BOUND_TOL
    lower_ok: bool = field(init=False)
    upper_ok: bool = field(init=False)
    gap_lower: float = field(init=False)
    gap_upper: float = field(init=False)

    def __post_init__(self):
        self.lower_ok = bool(self.achieved >= self.lower - self.tol)
        self.upper_ok = bool(self.achieved < self.upper + self.tol)
        self.gap_lower = self.achieved - self.lower
        self.gap_upper = self.upper - self.achieved

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok

    def sort_key(self):
        p = self.params
        return (self.theorem_id, p.get("d", 0), p.get("k", 0), p.get("t", 0.0), p.get("seed", 0))


@dataclass
class TrialConfig:
    master_seed: int = 0
    dims: Sequence[int] = DEFAULT_DIMS
    ks: Sequence[int] = DEFAULT_KS
    ts: Sequence[float] = DEFAULT_TS
    trials_per_cell: int = DEFAULT_TRIALS

    def __post_init__(self):
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if any(t < 0 for t in self.ts):
            raise ValueError("penalization parameters must be >= 0")

    def t_grid(self) -> list[float]:
        """The t values actually swept: 0 always, then the configured ones."""
        grid = [0.0]
        for t in self.ts:
            if float(t) not in grid:
                grid.append(float(t))
        return grid


# -- random sources ----------------------------------------------------------


def random_density(d: int, seed: int) -> DensityOperator:
    """Ginibre density operator ``G G^dagger / Tr(G G^dagger)``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return validate_density(m / np.trace(m).real)


def random_full_rank_density(d: int, seed: int, tol: float = SUPPORT_TOL) -> DensityOperator:
    """Ginibre sample, redrawn from a derived seed until every eigenvalue exceeds ``tol``."""
    for attempt in range(100):
        rho = random_density(d, derive_seed(seed, attempt) if attempt else seed)
        if rho.eigenvalues[-1] > tol:
            return rho
    raise RuntimeError("could not draw a full-rank density operator")


def random_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def derive_seed(*parts) -> int:
    """Deterministic 63-bit seed from integer parts (numpy SeedSequence hashing)."""
    ss = np.random.SeedSequence([int(p) for p in parts])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


# -- encoders ----------------------------------------------------------------


def optimal_encoder(rho, k: int = 2, t: float = 0.0) -> QuantumEncoder:
    """t-optimal code: eigenbasis of ``rho`` with the exponential Huffman code of its spectrum."""
    rho = validate_density(rho)
    p = np.clip(rho.eigenvalues, 0.0, None)
    return build_encoder(rho.eigenvectors, exp_huffman(p / p.sum(), k, t))


def shannon_encoder(tau, k: int = 2, t: float = 0.0) -> QuantumEncoder:
    """Shannon code designed for the escort of ``tau``, on the eigenbasis of ``tau``.

    Raises:
        ZeroEigenvalue: ``tau`` is rank deficient, so some length is undefined.
    """
    tau = validate_density(tau)
    if tau.eigenvalues[-1] <= SUPPORT_TOL:
        raise ZeroEigenvalue(f"smallest eigenvalue {tau.eigenvalues[-1]:.3e}; Shannon lengths need full rank")
    q = entropy.escort_probs(tau.eigenvalues, t)
    return build_encoder(tau.eigenvectors, assign_codewords(shannon_lengths(q, k), k))


def _alpha(t: float) -> float:
    return 0.0 if math.isinf(t) else 1.0 / (1.0 + t)


def _params(rho, k, t, seed=None, **extra) -> dict:
    out = {"d": int(validate_density(rho).dim), "k": int(k), "t": float(t)}
    if seed is not None:
        out["seed"] = int(seed)
    out.update(extra)
    return out


# -- checks ------------------------------------------------------------------


def check_kraft(enc: QuantumEncoder, params: dict | None = None) -> BoundReport:
    return BoundReport("T1", 0.0, quantum_kraft_sum(enc), 1.0, dict(params or {}), tol=KRAFT_TOL)


def check_optimal_bounds(rho, k: int = 2, t: float = 0.0, seed: int | None = None) -> BoundReport:
    """Renyi bounds ``S_a(rho) <= l_t(C_opt) < S_a(rho) + 1`` with ``a = 1/(1+t)``."""
    rho = validate_density(rho)
    enc = optimal_encoder(rho, k, t)
    lower = entropy_of_order(rho, _alpha(t), k)
    achieved = source_t_avg_length(enc, rho, t)
    return BoundReport("T3" if t == 0 else "T6", lower, achieved, lower + 1.0, _params(rho, k, t, seed))


def wrong_code_divergence(rho, tau, k: int = 2, t: float = 0.0) -> float:
    """Excess-length term: ``S(rho||tau)`` at ``t = 0``, else ``S_{1+t}(rho_t||tau_t)``."""
    if t == 0:
        return relative_entropy(rho, tau, k)
    return renyi_divergence(escort(rho, t), escort(tau, t), 1.0 + t, k)


def check_wrong_code(rho, tau, k: int = 2, t: float = 0.0, seed: int | None = None) -> BoundReport:
    """Bounds for the escort-Shannon code of a mismatched operator ``tau`` applied to ``rho``.

    Raises:
        InfiniteBound: supp(rho) is not contained in supp(tau).
    """
    rho, tau = validate_density(rho), validate_density(tau)
    if math.isinf(t):
        raise ValueError("wrong-code bounds need finite t")
    div = wrong_code_divergence(rho, tau, k, t)
    if math.isinf(div):
        raise InfiniteBound("supp(rho) is not contained in supp(tau)")
    enc = shannon_encoder(tau, k, t)
    lower = entropy_of_order(rho, _alpha(t), k) + div
    achieved = source_t_avg_length(enc, rho, t)
    return BoundReport("T4" if t == 0 else "T7", lower, achieved, lower + 1.0, _params(rho, k, t, seed, divergence=div))


def length_decomposition(enc: QuantumEncoder, rho, t: float = 0.0) -> tuple[float, float]:
    """Both sides of ``l_t(C(rho)) = S_a(rho) + D - log_k beta``.

    ``D`` is the relative entropy ``S(rho||sigma)`` at ``t = 0`` and the Renyi
    divergence ``S_{1+t}(rho_t||sigma)`` otherwise.
    """
    rho = validate_density(rho)
    k = enc.k
    sigma, beta = code_induced_state(enc)
    if t == 0:
        div = relative_entropy(rho, sigma, k)
    else:
        div = renyi_divergence(escort(rho, t), sigma, 1.0 + t, k)
    if math.isinf(div):
        raise InfiniteBound("supp(rho) is not contained in supp(sigma)")
    lhs = source_t_avg_length(enc, rho, t)
    rhs = entropy_of_order(rho, _alpha(t), k) + div - math.log(beta) / math.log(k)
    return lhs, rhs


def check_length_identity(enc: QuantumEncoder, rho, t: float = 0.0) -> float:
    """Residual ``|lhs - rhs|`` of the exact length decomposition."""
    if math.isinf(t):
        raise ValueError("the length decomposition needs finite t")
    lhs, rhs = length_decomposition(enc, rho, t)
    return abs(lhs - rhs)


def check_tradeoff(rho, k: int = 2, t: float = 0.0, seed: int | None = None) -> BoundReport:
    """Standard average of the escort-Shannon code against ``S/(1+t) + t S_a/(1+t)``.

    The report's ``params`` also carries the code's base length and lengths,
    for tradeoff tables.

    Raises:
        ZeroEigenvalue: ``rho`` is not full rank.
    """
    rho = validate_density(rho)
    enc = shannon_encoder(rho, k, t)
    s = entropy.von_neumann(rho, k)
    s_a = entropy_of_order(rho, _alpha(t), k)
    lower = s_a if math.isinf(t) else (s + t * s_a) / (1.0 + t)
    achieved = source_t_avg_length(enc, rho, 0.0)
    base = int(source_t_avg_length(enc, rho, math.inf))
    params = _params(rho, k, t, seed, base_length=base, lengths=[int(l) for l in enc.lengths])
    return BoundReport("T8", lower, achieved, lower + 1.0, params)


def product_spectrum(p, K: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(K):
        out = np.kron(out, p)
    return out


def block_limit_sweep(rho, k: int = 2, t: float = 0.0, K_max: int = 3) -> list[tuple[int, float]]:
    """Per-source t-average of the optimal code on ``rho^(x)K`` for ``K = 1..K_max``.

    ``rho^(x)K`` is diagonal in the product eigenbasis, so the code is built
    on the product spectrum directly.
    """
    rho = validate_density(rho)
    p = np.clip(rho.eigenvalues, 0.0, None)
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    if p.size**K_max > BLOCK_MAX_SYMBOLS:
        raise InstanceTooLarge(f"d^K_max = {p.size}^{K_max} exceeds {BLOCK_MAX_SYMBOLS}")
    out = []
    for K in range(1, K_max + 1):
        q = product_spectrum(p, K)
        q = q / q.sum()
        lengths = huffman_lengths(q, k, t)
        out.append((K, classical_avg_length(q, lengths, t, k) / K))
    return out


def block_limit_reports(rho, k: int = 2, t: float = 0.0, K_max: int = 3) -> list[BoundReport]:
    s_a = entropy_of_order(rho, _alpha(t), k)
    return [
        BoundReport("block", s_a, val, s_a + 1.0 / K, _params(rho, k, t, K=K))
        for K, val in block_limit_sweep(rho, k, t, K_max)
    ]


# -- sweep -------------------------------------------------------------------


def _cells(config: TrialConfig) -> Iterator[tuple[int, int, int, float, int, int]]:
    for d in config.dims:
        for k in config.ks:
            for ti, t in enumerate(config.t_grid()):
                for trial in range(config.trials_per_cell):
                    yield d, k, ti, t, trial, derive_seed(config.master_seed, d, k, ti, trial)


def _trial_encoders(d: int, k: int, t: float, seed: int) -> dict:
    """Sources and encoders for one sweep trial, each drawn from its own derived seed."""
    rho = random_density(d, derive_seed(seed, 0))
    tau = random_full_rank_density(d, derive_seed(seed, 1))
    rng = np.random.default_rng(derive_seed(seed, 2))
    # identity checks use an arbitrary code: random basis, Shannon lengths of an unrelated distribution
    q = rng.dirichlet(np.ones(d))
    ident = build_encoder(random_unitary(d, derive_seed(seed, 3)), assign_codewords(shannon_lengths(q, k), k))
    encs = {
        "rho": rho,
        "tau": tau,
        "optimal": optimal_encoder(rho, k, t),
        "wrong": shannon_encoder(tau, k, t),
        "identity": ident,
    }
    if rho.eigenvalues[-1] > SUPPORT_TOL:
        encs["tradeoff"] = shannon_encoder(rho, k, t)
    return encs


def sweep_encoders(config: TrialConfig) -> Iterator[tuple[dict, QuantumEncoder]]:
    """Every encoder the sweep constructs, with its trial parameters."""
    for d, k, ti, t, trial, seed in _cells(config):
        encs = _trial_encoders(d, k, t, seed)
        for name in ("optimal", "wrong", "identity", "tradeoff"):
            if name in encs:
                yield {"d": d, "k": k, "t": t, "seed": seed, "encoder": name}, encs[name]


def run_trial(d: int, k: int, t: float, seed: int) -> list[BoundReport]:
    encs = _trial_encoders(d, k, t, seed)
    rho, tau = encs["rho"], encs["tau"]
    params = {"d": d, "k": k, "t": t, "seed": seed}
    reports = [check_kraft(encs[name], {**params, "encoder": name}) for name in ("optimal", "wrong", "identity", "tradeoff") if name in encs]
    reports.append(check_optimal_bounds(rho, k, t, seed))
    if rho.eigenvalues[-1] > SUPPORT_TOL:
        reports.append(check_wrong_code(rho, tau, k, t, seed))
        reports.append(check_tradeoff(rho, k, t, seed))
    residual = check_length_identity(encs["identity"], rho, t)
    reports.append(BoundReport("ID0" if t == 0 else "IDt", 0.0, residual, IDENTITY_TOL, dict(params), tol=0.0))
    return reports


def run_suite(config: TrialConfig | None = None) -> list[BoundReport]:
    """Run every check on every trial; the result is sorted and fully deterministic."""
    config = config or TrialConfig()
    reports = []
    for d, k, ti, t, trial, seed in _cells(config):
        reports.extend(run_trial(d, k, t, seed))
    reports.sort(key=BoundReport.sort_key)
    return reports


# -- serialization -------------------------------------------------------------

CSV_COLUMNS = ("theorem_id", "d", "k", "t", "seed", "lower", "achieved", "upper", "gap_lower", "gap_upper", "pass")


def report_to_dict(r: BoundReport) -> dict:
    out = asdict(r)
    out["pass"] = r.passed
    return out


def reports_to_json(reports: Sequence[BoundReport]) -> str:
    return json.dumps([report_to_dict(r) for r in reports], indent=1)


def reports_to_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        p = r.params
        writer.writerow([
            r.theorem_id, p.get("d", ""), p.get("k", ""), repr(p.get("t", "")), p.get("seed", ""),
            repr(r.lower), repr(r.achieved), repr(r.upper), repr(r.gap_lower), repr(r.gap_upper), int(r.passed),
        ])
    return buf.getvalue()
