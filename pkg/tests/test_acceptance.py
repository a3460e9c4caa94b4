"""Acceptance suite: one test per release criterion, each printing a
single PASS/FAIL line (run with ``pytest -s`` to see them on success).

Exclusions, by design: Gaussian limit densities are validated only through
their moment content (identity and Monte Carlo suites); infinite-horizon
strict-leader probabilities have no closed form and are covered by the
finite-horizon estimates plus the documented lower bound; those items have
no test of their own.
"""

import math
import time
from fractions import Fraction as F

import pytest

from rrhsim import oracle, special_numbers as sn
from rrhsim.enumeration import exact_statistic_distribution, summarize
from rrhsim.ensemble import (
    TolerancePolicy,
    compare,
    fit_rank2_exponent,
    leader_persistence,
    run_ensemble,
)
from rrhsim.growth import ModelConfig

SEED = 20250809
POLICY = TolerancePolicy(z_max=4.0, alpha=0.01, min_expected=5.0)
R_GRID = (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))


def report(cid, desc, results, extra=""):
    ok = all(flag for _, flag in results)
    bad = [name for name, flag in results if not flag]
    line = f"ACCEPTANCE {cid} [{desc}]: {'PASS' if ok else 'FAIL'}"
    if extra:
        line += f"  ({extra})"
    if bad:
        line += f"  failed: {bad}"
    print("\n" + line)
    assert ok, line
    return ok


# ---------------------------------------------------------------------------

def test_criterion_1_exact_match_suite():
    t0 = time.perf_counter()
    results = []
    for n in range(2, 9):
        s = summarize("rrh", n)
        results.append((f"p1_dist_n{n}",
                        s.n1_dist.probs == oracle.p1_distribution(n).probs))
        results.append((f"rank2_dist_n{n}",
                        s.r2_dist.probs == oracle.rank2_distribution(n).probs))
        results.append((f"nk_mean_n{n}", all(
            s.mean_degree_counts[k - 1] == oracle.nk_mean(k, n)
            for k in range(1, n + 1))))
        results.append((f"vertex_degree_n{n}", all(
            s.vertex_degree[m] == {d: p for d, p in
                                   oracle.vertex_degree_distribution(m, n).items()
                                   if p != 0}
            for m in range(2, n + 1))))
        ld = oracle.leaves_distribution(n)
        results.append((f"leaves_dist_n{n}", all(
            s.leaves_dist.prob(x) == ld.prob(x) for x in range(0, n))))
    joint = exact_statistic_distribution("rrh", 4, "joint_n123")
    results.append(("joint_n123_at_4", joint == {
        (3, 0, 0): F(1, 6), (2, 1, 0): F(1, 2),
        (2, 0, 1): F(1, 6), (1, 1, 1): F(1, 6)}))
    results.append(("n1n2_mean_at_4", summarize("rrh", 4).mean_n1n2 == F(7, 6)))
    for r in R_GRID:
        for n in range(2, 9):
            s = summarize("redirect", n, r)
            results.append((f"redirect_n1_mean_r{r}_n{n}",
                            s.n1_dist.mean() == oracle.redirect_n1_mean(n, r)))
            results.append((f"redirect_r2_mean_r{r}_n{n}",
                            s.r2_dist.mean() == oracle.redirect_rank2_mean(n, r)))
    elapsed = time.perf_counter() - t0
    results.append(("runtime_under_60s", elapsed < 60))
    report(1, "exact-match suite, enumerator vs closed forms, N<=8",
           results, f"{elapsed:.1f}s")


def test_criterion_2_identity_suite():
    t0 = time.perf_counter()
    results = []
    ok_rows = all(sum(sn.eulerian_row(n)) == math.factorial(n) for n in range(41))
    ok_mirror = all(sn.eulerian(n, m) == sn.eulerian(n, n - 1 - m)
                    for n in range(1, 41) for m in range(n))
    ok_stirling = all(sum(sn.stirling1_row(n)) == math.factorial(n)
                      for n in range(41))
    results += [("eulerian_row_sums", ok_rows), ("mirror_symmetry", ok_mirror),
                ("stirling_row_sums", ok_stirling)]
    id1 = all(
        sum((-1) ** m * sn.eulerian(n, m) for m in range(max(n, 1)))
        == F(2 ** (n + 1) * (2 ** (n + 1) - 1)) * sn.bernoulli(n + 1) / (n + 1)
        for n in range(41)
    )
    id2 = all(
        sum(F((-1) ** m * sn.eulerian(n, m), sn.binomial(n, m))
            for m in range(max(n, 1))) == (n + 1) * sn.bernoulli(n)
        for n in range(41)
    )
    results += [("eulerian_bernoulli_identity_1", id1),
                ("eulerian_bernoulli_identity_2", id2)]
    ok_cum = True
    for N in range(2, 31):
        d = oracle.p1_distribution(N)
        for p in range(1, N):
            if d.cumulant(p) != sn.bernoulli(p) * N / p:
                ok_cum = False
    results.append(("cumulants_bernoulli_window", ok_cum))
    tabulated = {2: F(1, 12), 3: F(0), 4: F(-1, 120), 6: F(1, 252),
                 8: F(-1, 240), 10: F(1, 132), 12: F(-691, 32760)}
    ok_tab = all(oracle.n1_cumulant(p, 30) == rate * 30
                 for p, rate in tabulated.items())
    results.append(("tabulated_cumulant_values", ok_tab))
    report(2, "identity suite", results, f"{time.perf_counter()-t0:.1f}s")


# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def rrh_1k():
    return run_ensemble(ModelConfig("rrh", target_n=1000, seed=SEED),
                        replicas=100_000)


@pytest.fixture(scope="module")
def rrh_10k():
    return run_ensemble(ModelConfig("rrh", target_n=10_000, seed=SEED + 1),
                        replicas=30_000)


def test_criterion_3_monte_carlo_plain(rrh_1k, rrh_10k):
    results = []
    main = compare(rrh_1k, POLICY, statistics={
        "mean_n1", "var_n1", "degree_hist", "mean_r2", "var_r2",
        "vm_degree_hist"})
    results += [(c.name, c.passed) for c in main.checks]
    leaves = compare(rrh_10k, POLICY, statistics={"mean_leaves", "leaves_hist"})
    results += [(f"{c.name}_n1e4", c.passed) for c in leaves.checks]
    wall = rrh_1k.wall_time + rrh_10k.wall_time
    results.append(("runtime_under_150s", wall < 150))
    report(3, "Monte Carlo, plain growth, N=1e3 x 1e5 replicas",
           results, f"sim {wall:.0f}s")


@pytest.fixture(scope="module")
def redirect_reports():
    cfgs = [
        (ModelConfig("redirect", target_n=100, seed=SEED + 2, r=F(1, 2)), 100_000),
        (ModelConfig("redirect", target_n=1000, seed=SEED + 3, r=F(1, 2)), 100_000),
        (ModelConfig("redirect", target_n=10_000, seed=SEED + 4, r=F(1, 2)), 20_000),
    ]
    return [run_ensemble(cfg, replicas=reps) for cfg, reps in cfgs]


def test_criterion_4_monte_carlo_redirect(redirect_reports):
    rep100, rep1000, rep10000 = redirect_reports
    results = []
    checks = compare(rep1000, POLICY,
                     statistics={"mean_n1", "degree_hist", "mean_r2"})
    results += [(c.name, c.passed) for c in checks.checks]
    slope = fit_rank2_exponent(redirect_reports)
    results.append(("rank2_growth_exponent", abs(slope - 0.5) <= 0.05))
    wall = sum(rep.wall_time for rep in redirect_reports)
    report(4, "Monte Carlo, redirection r=1/2", results,
           f"exponent {slope:.3f} vs 0.5, sim {wall:.0f}s")


def test_criterion_5_leader_persistence():
    lead2 = leader_persistence(2, 10_000, 100_000, seed=SEED + 5)
    lead3 = leader_persistence(3, 10_000, 100_000, seed=SEED + 6)
    results = [
        ("d2_estimate_within_0.01", abs(lead2.estimate - 0.25) <= 0.01),
        ("d3_estimate_within_0.005", abs(lead3.estimate - 1 / 64) <= 0.005),
        # the finite-horizon event shrinks toward the target as the horizon
        # grows; the checkpoint estimates expose (and bound) that bias
        ("d2_bias_monotone", lead2.monotone),
        ("d3_bias_monotone", lead3.monotone),
    ]
    extra = (f"D2 {lead2.estimate:.4f} vs 0.25; D3 {lead3.estimate:.5f} vs "
             f"{1/64:.5f}; D2 by horizon "
             + " ".join(f"{c}:{e:.4f}" for c, e in
                        zip(lead2.checkpoints, lead2.estimates)))
    report(5, "leader persistence, finite horizon 1e4 x 1e5 trajectories",
           results, extra)


def test_criterion_6_rank_asymptotics():
    results = []
    for k in (3, 4):  # rank means with logarithm powers 2 and 3
        exact = oracle.rank_mean_float(k, 10**6)
        approx = oracle.rank_mean_asymptotic(k, 10**6)
        results.append((f"three_term_rank{k}_at_1e6",
                        abs(approx - exact) / exact < 0.01))
    r2 = oracle.rank_mean_float(2, 10**4)
    r3 = oracle.rank_mean_float(3, 10**4)
    results.append(("refined_rank2_at_1e4",
                    abs(oracle.rank2_asymptotic_refined(10**4) - r2) / r2 < 1e-4))
    results.append(("refined_rank3_at_1e4",
                    abs(oracle.rank3_asymptotic_refined(10**4) - r3) / r3 < 1e-4))
    report(6, "rank asymptotics", results)
