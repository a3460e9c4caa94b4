import math
from fractions import Fraction as F

import pytest

from rrhsim import oracle as O
from rrhsim.enumeration import (
    ENUM_CAP,
    enumerate_histories,
    exact_statistic_distribution,
    summarize,
)

R_GRID = (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))


def test_rrh_history_counts_and_weights():
    hs = list(enumerate_histories("rrh", 3))
    assert len(hs) == 2 and all(h.weight == F(1, 2) for h in hs)
    hs = list(enumerate_histories("rrh", 4))
    assert len(hs) == 6 and all(h.weight == F(1, 6) for h in hs)
    hs = list(enumerate_histories("rrh", 7))
    assert len(hs) == math.factorial(6)


def test_redirect_step_weights_n3():
    for r in R_GRID:
        ws = {h.parents: h.weight for h in enumerate_histories("redirect", 3, r=r)}
        assert ws[(1, 1)] == F(1, 2) + r / 2
        assert ws.get((1, 2), F(0)) == (1 - r) / 2


def test_redirect_r1_reaches_only_the_star():
    hs = list(enumerate_histories("redirect", 5, r=F(1)))
    assert len(hs) == 1
    assert hs[0].parents == (1, 1, 1, 1) and hs[0].weight == 1


def test_total_weight_is_one_for_every_model():
    for n in range(1, 8):
        assert sum(h.weight for h in enumerate_histories("rrh", n)) == 1
        assert sum(h.weight for h in enumerate_histories("choice-smaller", n)) == 1
        for r in R_GRID:
            assert sum(h.weight
                       for h in enumerate_histories("redirect", n, r=r)) == 1
        for mu in (F(0), F(1, 3), F(1)):
            assert sum(h.weight
                       for h in enumerate_histories("duplicate", n, mu=mu)) == 1


def test_cap_and_float_params_rejected():
    with pytest.raises(ValueError):
        list(enumerate_histories("rrh", ENUM_CAP + 1))
    with pytest.raises(TypeError):
        list(enumerate_histories("redirect", 4, r=0.5))
    with pytest.raises(ValueError):
        list(enumerate_histories("mystery", 4))


def test_joint_n123_table():
    j = exact_statistic_distribution("rrh", 4, "joint_n123")
    assert j == {(3, 0, 0): F(1, 6), (2, 1, 0): F(1, 2),
                 (2, 0, 1): F(1, 6), (1, 1, 1): F(1, 6)}


def test_rank2_matches_stirling():
    d = exact_statistic_distribution("rrh", 4, "rank_count", k=2)
    assert d.prob(1) == F(1, 3) and d.prob(2) == F(1, 2) and d.prob(3) == F(1, 6)


def test_vertex_degree_uniform_for_second_vertex():
    d = exact_statistic_distribution("rrh", 5, "vertex_degree", m=2)
    assert d.probs == (F(1, 4),) * 4


def test_leader_distribution_sums_to_one():
    ld = exact_statistic_distribution("rrh", 5, "leader")
    assert sum(ld.values()) == 1
    assert all(2 <= vid <= 5 for vid, _ in ld)
    # on the 3-vertex star, the leader is tied
    ld3 = exact_statistic_distribution("rrh", 3, "leader")
    assert ld3 == {(2, True): F(1, 2), (2, False): F(1, 2)}


def test_duplicate_statistics():
    d = exact_statistic_distribution("duplicate", 5, "n_vertices", mu=F(1, 3))
    assert d.mean() == 1 + 4 * F(2, 3)
    dd = exact_statistic_distribution("duplicate", 4, "degree_count",
                                      k=1, mu=F(1, 2))
    assert sum(dd.probs) == 1
    with pytest.raises(ValueError):
        exact_statistic_distribution("duplicate", 4, "leaves", mu=F(1, 2))


def test_statistic_argument_validation():
    with pytest.raises(ValueError):
        exact_statistic_distribution("rrh", 4, "degree_count")
    with pytest.raises(ValueError):
        exact_statistic_distribution("rrh", 4, "vertex_degree")
    with pytest.raises(ValueError):
        exact_statistic_distribution("rrh", 4, "unknown")


def test_summary_consistency():
    s = summarize("rrh", 6)
    assert s.total_weight == 1
    assert sum(s.mean_degree_counts) == 6
    assert sum(s.mean_rank_counts) == 6
    assert s.n1_dist.mean() == 3
    assert sum(s.joint_n123.values()) == 1
    assert summarize("rrh", 6) is s  # cached


def test_summary_redirect_r0_equals_rrh():
    a = summarize("rrh", 6)
    b = summarize("redirect", 6, F(0))
    assert a.n1_dist.probs == b.n1_dist.probs
    assert a.r2_dist.probs == b.r2_dist.probs
    assert a.leaves_dist.probs == b.leaves_dist.probs
    assert a.mean_degree_counts == b.mean_degree_counts


def test_choice_summary_small():
    s = summarize("choice-smaller", 3)
    assert s.r2_dist.prob(2) == F(3, 4)  # the star, from the pair rule
    assert s.leaves_dist.prob(2) == F(3, 4)


def test_leaves_match_balance_recurrence():
    for n in range(3, 9):
        d = exact_statistic_distribution("rrh", n, "leaves")
        ref = O.leaves_distribution(n)
        for x in range(0, n):
            assert d.prob(x) == ref.prob(x), (n, x)
