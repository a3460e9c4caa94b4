import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import full_parent_array, parent_lists
from rrhsim.backend import available_backends, get_kernels
from rrhsim.benchmark import run_benchmark
from rrhsim.rng import RngStream, bounded, draw, stream_base, uniform53

HAVE_EXT = "ext" in available_backends()
needs_ext = pytest.mark.skipif(not HAVE_EXT, reason="compiled kernels not built")

PY = get_kernels("python")


def test_rng_matches_public_splitmix64_vector():
    # the draw sequence from state s is exactly SplitMix64 started at s;
    # reference outputs for state 1234567 are widely published
    assert [draw(1234567, t) for t in range(3)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
    ]


def test_rng_scheme_consistency():
    assert stream_base(7, 3) == draw(draw(7, 0), 3) == 0x9AAF21D8296E1E3D
    u = draw(12345, 0)
    assert 0 <= u < 2**64
    assert bounded(u, 10) == (u * 10) >> 64
    assert 0.0 <= uniform53(u) < 1.0
    s = RngStream(7, replica=3)
    assert s.draw(5) == draw(stream_base(7, 3), 5)
    assert RngStream(7, 3).base != RngStream(7, 4).base


def test_python_kernel_self_consistency():
    p = PY.grow_parents(0, 64, 0.0, RngStream(5).base)
    sizes = PY.subtree_sizes(p)
    depths = PY.depths(p)
    assert sizes[1] == 64
    assert depths[1] == 0 and (depths[2:] >= 1).all()
    assert sizes[2:].sum() + 64 == sizes.sum()


@needs_ext
@pytest.mark.parametrize("kind,param", [(0, 0.0), (1, 0.25), (1, 1.0), (2, 0.0)])
def test_grow_parents_parity(kind, param):
    ext = get_kernels("ext")
    base = RngStream(2024, 5).base
    for n in (1, 2, 3, 17, 301):
        assert (ext.grow_parents(kind, n, param, base)
                == PY.grow_parents(kind, n, param, base)).all()


@needs_ext
def test_duplicate_parity():
    ext = get_kernels("ext")
    base = RngStream(8, 1).base
    for mu in (0.0, 0.4, 1.0):
        se, ge = ext.grow_duplicate_arrays(90, mu, base)
        sp_, gp = PY.grow_duplicate_arrays(90, mu, base)
        assert (se == sp_).all() and (ge == gp).all()


@needs_ext
@settings(max_examples=40, deadline=None)
@given(parent_lists(max_n=10))
def test_sizes_depths_parity(ps):
    ext = get_kernels("ext")
    arr = full_parent_array(ps)
    assert (ext.subtree_sizes(arr) == PY.subtree_sizes(arr)).all()
    assert (ext.depths(arr) == PY.depths(arr)).all()


@needs_ext
@pytest.mark.parametrize("kind,param", [(0, 0.0), (1, 0.5), (2, 0.0)])
def test_ensemble_stats_parity(kind, param):
    ext = get_kernels("ext")
    a = ext.ensemble_stats(kind, 80, param, 999, 13, 700, 3)
    b = PY.ensemble_stats(kind, 80, param, 999, 13, 700, 3)
    assert a["violations"] == b["violations"] == 0
    for key in a:
        if key != "violations":
            assert (a[key] == b[key]).all(), key


@needs_ext
def test_ensemble_stats_parity_tiny_sizes():
    ext = get_kernels("ext")
    for n in (1, 2, 3):
        a = ext.ensemble_stats(0, n, 0.0, 4, 0, 50, min(2, n) if n >= 2 else 2)
        b = PY.ensemble_stats(0, n, 0.0, 4, 0, 50, min(2, n) if n >= 2 else 2)
        for key in a:
            if key != "violations":
                assert (a[key] == b[key]).all(), (n, key)


@needs_ext
def test_leader_parity():
    ext = get_kernels("ext")
    for m in (2, 3):
        a, fa = ext.leader_persistence_counts(m, 500, 3, 10, 8000, [2 * m - 1, 100, 500])
        b, fb = PY.leader_persistence_counts(m, 500, 3, 10, 8000, [2 * m - 1, 100, 500])
        assert (a == b).all() and fa == fb


def test_replica_batching_invariance():
    # splitting a replica range must not change any statistic
    whole = PY.ensemble_stats(0, 40, 0.0, 77, 0, 600, 2)
    lo = PY.ensemble_stats(0, 40, 0.0, 77, 0, 250, 2)
    hi = PY.ensemble_stats(0, 40, 0.0, 77, 250, 350, 2)
    assert (np.concatenate([lo["n1"], hi["n1"]]) == whole["n1"]).all()
    assert ((lo["deg_hist"] + hi["deg_hist"]) == whole["deg_hist"]).all()


def test_kernel_argument_validation():
    with pytest.raises(ValueError):
        PY.ensemble_stats(0, 10, 0.0, 1, 0, 5, 11)
    with pytest.raises(ValueError):
        PY.grow_parents(9, 10, 0.0, 1)
    with pytest.raises(ValueError):
        PY.leader_persistence_counts(1, 100, 1, 0, 10, [100])
    with pytest.raises(ValueError):
        PY.leader_persistence_counts(2, 100, 1, 0, 10, [5, 5])


def test_env_override_selects_python_backend():
    env = dict(os.environ, RRHSIM_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import rrhsim; print(rrhsim.BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    assert out.stdout.strip() == "python"


def test_env_override_rejects_unknown():
    env = dict(os.environ, RRHSIM_BACKEND="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import rrhsim"],
        capture_output=True, text=True, env=env,
    )
    assert out.returncode != 0


def test_benchmark_runs_and_agrees():
    bench = run_benchmark(n=60, replicas=200, seed=5)
    assert set(bench["results"]) == set(available_backends())
    if HAVE_EXT:
        assert bench["identical"] is True
        assert bench["speedup"] > 0
