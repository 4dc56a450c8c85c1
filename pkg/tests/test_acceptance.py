"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from conftest import record, rotated
from qlossless.codes import ClassicalCode, classical_avg_length, exp_huffman, oracle_optimal_lengths
from qlossless.entropy import renyi, von_neumann
from qlossless.qcode import FockVector, base_length, build_encoder, decode, encode, encode_block, quantum_kraft_sum, t_codeword_length
from qlossless.verify import (
    TrialConfig,
    block_limit_sweep,
    check_length_identity,
    check_optimal_bounds,
    check_tradeoff,
    check_wrong_code,
    derive_seed,
    random_density,
    random_full_rank_density,
    random_state,
    random_unitary,
    run_suite,
    sweep_encoders,
)

MASTER_SEED = 20240601
T_GRID = (0.0, 0.5, 1.0, 2.0, 8.0)


@pytest.fixture(scope="module")
def sweep_reports():
    return run_suite(TrialConfig(master_seed=MASTER_SEED))


def test_criterion_1_kraft():
    start = time.perf_counter()
    n, worst = 0, 0.0
    for _, enc in sweep_encoders(TrialConfig(master_seed=MASTER_SEED)):
        worst = max(worst, quantum_kraft_sum(enc))
        n += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1 + 1e-12 and elapsed < 10.0
    record("1 quantum Kraft", ok, f"{n} encoders, max sum {worst:.15f}, {elapsed:.2f}s")
    assert ok


def test_criterion_2_oracle():
    start = time.perf_counter()
    worst, n = 0.0, 0
    for i in range(200):
        rng = np.random.default_rng(derive_seed(MASTER_SEED, 2, i))
        d = int(rng.integers(1, 7))
        p = rng.dirichlet(np.ones(d) * rng.choice([0.2, 1.0, 5.0]))
        k = int(rng.choice([2, 3]))
        for t in T_GRID + (math.inf,):
            ours = classical_avg_length(p, exp_huffman(p, k, t).lengths, t, k)
            best = classical_avg_length(p, oracle_optimal_lengths(p, k, t), t, k)
            worst = max(worst, abs(ours - best))
            n += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 60.0
    record("2 oracle equivalence", ok, f"{n} cases, max |diff| {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_3_entropy_bounds(sweep_reports):
    bounds = [r for r in sweep_reports if r.theorem_id in ("T3", "T6")]
    failed = [r for r in bounds if not r.passed]
    # dyadic escort: rho proportional to q^(1+t) with q dyadic makes the escort equal q
    tight = []
    for t in T_GRID:
        for q in ([0.5, 0.25, 0.25], [0.5, 0.25, 0.125, 0.125], [0.25] * 4):
            for k, qq in ((2, q), (3, [1 / 3, 1 / 3, 1 / 9, 1 / 9, 1 / 9])):
                w = np.asarray(qq) ** (1 + t)
                rho = rotated(w / w.sum(), derive_seed(MASTER_SEED, 3, len(tight)))
                tight.append(check_optimal_bounds(rho, k, t).gap_lower)
    ok = not failed and bool(bounds) and max(tight) <= 1e-9 and min(tight) >= -1e-9
    record("3 entropy bounds", ok, f"{len(bounds)} reports, {len(failed)} failed, dyadic max gap_lower {max(tight):.1e}")
    assert ok


def test_criterion_4_identities():
    worst = 0.0
    for i in range(100):
        seed = derive_seed(MASTER_SEED, 4, i)
        rng = np.random.default_rng(seed)
        d, k = int(rng.integers(1, 9)), int(rng.choice([2, 3]))
        t = float(rng.choice([0.0, 0.0, 0.25, 0.5, 1.0, 2.0, 8.0]))
        rho = random_density(d, seed)
        code = exp_huffman(rng.dirichlet(np.ones(d)), k, float(rng.choice([0.0, 1.0])))
        enc = build_encoder(random_unitary(d, derive_seed(seed, 1)), code)
        worst = max(worst, check_length_identity(enc, rho, t))
    ok = worst <= 1e-8
    record("4 decomposition identities", ok, f"100 triples, max residual {worst:.2e}")
    assert ok


def test_criterion_5_wrong_code():
    failed, self_div = 0, 0.0
    for i in range(100):
        seed = derive_seed(MASTER_SEED, 5, i)
        d = 2 + i % 7
        t = T_GRID[i % len(T_GRID)]
        rho = random_full_rank_density(d, seed)
        tau = random_full_rank_density(d, derive_seed(seed, 1))
        failed += not check_wrong_code(rho, tau, 2 + i % 2, t, seed).passed
        same = check_wrong_code(rho, rho, 2 + i % 2, t, seed)
        failed += not same.passed
        self_div = max(self_div, abs(same.params["divergence"]))
    ok = failed == 0 and self_div <= 1e-9
    record("5 wrong-code penalty", ok, f"200 reports, {failed} failed, max self-divergence {self_div:.1e}")
    assert ok


def test_criterion_6_tradeoff(sweep_reports):
    trade = [r for r in sweep_reports if r.theorem_id == "T8"]
    bounds_ok = bool(trade) and all(r.passed for r in trade)
    ts = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, math.inf)
    base_ok = avg_ok = True
    detail = []
    for spec in ([0.97, 0.01, 0.01, 0.01], [0.9, 0.05, 0.03, 0.02], [0.8, 0.1, 0.05, 0.03, 0.02]):
        rho = rotated(spec, derive_seed(MASTER_SEED, 6, len(spec)))
        reports = [check_tradeoff(rho, 2, t) for t in ts]
        bounds_ok &= all(r.passed for r in reports)
        avg = [r.achieved for r in reports]
        base = [r.params["base_length"] for r in reports]
        floor = math.ceil(math.log2(len(spec)) - 1e-12)
        base_ok &= all(b <= a for a, b in zip(base, base[1:])) and base[-1] == floor and min(base) >= floor
        mono = all(b >= a - 1e-9 for a, b in zip(avg, avg[1:]))
        avg_ok &= mono
        if not mono:
            detail.append(f"{spec[0]}: avg {[round(a, 3) for a in avg]}")
    ok = bounds_ok and base_ok and avg_ok
    record(
        "6 tradeoff",
        ok,
        f"bounds {'ok' if bounds_ok else 'FAIL'}, base length {'ok' if base_ok else 'FAIL'}, "
        f"average monotone {'ok' if avg_ok else 'FAIL'} {'; '.join(detail)}",
    )
    assert ok


def test_criterion_7_block_convergence():
    start = time.perf_counter()
    ok, detail = True, []
    for t in (0.0, 1.0):
        s = renyi(np.diag([0.9, 0.1]), 1 / (1 + t), 2) if t else von_neumann(np.diag([0.9, 0.1]), 2)
        sweep = block_limit_sweep(np.diag([0.9, 0.1]), 2, t, 3)
        gaps = [s + 1 / K - val for K, val in sweep]
        ok &= all(s <= val < s + 1 / K for K, val in sweep)
        ok &= all(b < a for a, b in zip(gaps, gaps[1:]))
        detail.append(f"t={t:g}: " + ", ".join(f"{v:.4f}" for _, v in sweep))
    elapsed = time.perf_counter() - start
    ok &= elapsed < 5.0
    record("7 block coding", ok, f"{'; '.join(detail)}; {elapsed:.2f}s")
    assert ok


def test_criterion_8_round_trip():
    worst, n = 0.0, 0
    for i in range(60):
        seed = derive_seed(MASTER_SEED, 8, i)
        rng = np.random.default_rng(seed)
        d, m = 2 + i % 3, 1 + (i // 3) % 3
        # squaring skews the source so most codes mix word lengths
        p = np.sort(rng.dirichlet(np.ones(d)))[::-1] ** 2
        enc = build_encoder(random_unitary(d, seed), exp_huffman(p / p.sum(), 2, 0.0))
        states = [random_state(d, rng) for _ in range(m)]
        got = decode(enc, encode_block(enc, states), m)
        want = states[0]
        for s in states[1:]:
            want = np.multiply.outer(want, s)
        fid = abs(np.vdot(want.ravel(), got.ravel())) ** 2
        worst = max(worst, 1 - fid)
        n += len(set(enc.lengths)) > 1
    ok = worst <= 1e-9 and n > 0
    record("8 lossless round trip", ok, f"60 inputs ({n} with mixed word lengths), max infidelity {worst:.1e}")
    assert ok


def test_criterion_9_limits():
    worst_small, worst_large, over = 0.0, 0.0, 0
    for i in range(50):
        seed = derive_seed(MASTER_SEED, 9, i)
        rng = np.random.default_rng(seed)
        d, k = int(rng.integers(2, 7)), int(rng.choice([2, 3]))
        enc = build_encoder(random_unitary(d, seed), exp_huffman(rng.dirichlet(np.ones(d)), k, 0.0))
        w = encode(enc, random_state(d, rng))
        worst_small = max(worst_small, abs(t_codeword_length(w, 1e-6) - t_codeword_length(w, 0.0)))
        gap = abs(t_codeword_length(w, 64.0) - base_length(w))
        worst_large = max(worst_large, gap)
        over += gap > 1e-3
    ok = worst_small <= 1e-4 and worst_large <= 1e-3
    record("9 limit consistency", ok, f"max |l(1e-6) - l(0)| {worst_small:.1e}, max |l(64) - base| {worst_large:.1e} ({over}/50 above 1e-3)")
    assert ok
