import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from klbridge.errors import SizeError
from klbridge.sampler import (PathSample, covariance_stderr, empirical_covariance, path_matrix, sample_paths,
                              spectrum_tag, standard_normals, truncation_bound)

T5 = np.linspace(0.2, 1.0, 5)


@given(st.integers(0, 2**32 - 1), st.integers(0, 10**6))
def test_normals_are_pure(seed, idx):
    a = standard_normals(seed, idx, 16)
    assert np.array_equal(a, standard_normals(seed, idx, 16))
    assert np.all(np.isfinite(a))
    assert not np.array_equal(a, standard_normals(seed, idx + 1, 16))


def test_normals_moments():
    x = np.concatenate([standard_normals(7, i, 1000) for i in range(50)])
    assert abs(x.mean()) < 0.02 and abs(x.std() - 1.0) < 0.02


def test_unit_coefficients(brownian_spectrum):
    M = 50
    t = np.linspace(0, 1, 11)
    paths = sample_paths(brownian_spectrum, t, M, 2, 0, xi=np.ones((2, M)))
    expected = np.sqrt(brownian_spectrum.values[:M]) @ brownian_spectrum.evaluate(t, M)
    assert np.allclose(paths[0].values, expected, atol=1e-13)
    assert np.array_equal(paths[0].values, paths[1].values)


def test_reproducible_and_subset_consistent(fbm_spectrum):
    sp = fbm_spectrum(0.75)
    a = path_matrix(sample_paths(sp, T5, 100, 30, 11))
    b = path_matrix(sample_paths(sp, T5, 100, 30, 11))
    assert np.array_equal(a, b)
    c = path_matrix(sample_paths(sp, T5, 100, 10, 11))
    assert np.array_equal(a[:10], c)
    assert not np.array_equal(a, path_matrix(sample_paths(sp, T5, 100, 30, 12)))


def test_metadata(fbm_spectrum):
    p = sample_paths(fbm_spectrum(0.75), T5, 20, 3, 5)[2]
    assert p.seed == 5 and p.truncation == 20 and p.path_index == 2
    assert p.source_spectrum_tag == spectrum_tag(fbm_spectrum(0.75))
    assert "H=0.75" in p.source_spectrum_tag


def test_zero_paths_have_zero_covariance(brownian_spectrum):
    paths = sample_paths(brownian_spectrum, T5, 10, 5, 0, xi=np.zeros((5, 10)))
    assert empirical_covariance(paths, 0, 3) == 0.0
    assert covariance_stderr(paths, 0, 3) == 0.0


@pytest.mark.parametrize("h,s,t", [(0.5, 0.5, 0.5), (0.75, 0.25, 0.75)])
def test_covariance(fbm_spectrum, h, s, t):
    sp = fbm_spectrum(h)
    grid = np.array([s, t])
    paths = sample_paths(sp, grid, 200, 4000, 2024)
    cov = empirical_covariance(paths, 0, 1)
    exact = 0.5 * (s ** (2 * h) + t ** (2 * h) - abs(t - s) ** (2 * h))
    tol = max(4 * covariance_stderr(paths, 0, 1), truncation_bound(sp, 200))
    assert abs(cov - exact) <= tol


def test_bridge_pinned_at_one(bridge_spectrum):
    paths = sample_paths(bridge_spectrum(0.75), np.array([0.5, 1.0]), 100, 50, 3)
    assert np.max(np.abs(path_matrix(paths)[:, 1])) <= 1e-8


def test_truncation_bound_shrinks(fbm_spectrum):
    sp = fbm_spectrum(0.5)
    assert truncation_bound(sp, 200) < truncation_bound(sp, 20)
    assert 0.0 < truncation_bound(sp, 200) < 0.01


def test_size_errors(brownian_spectrum):
    with pytest.raises(SizeError):
        sample_paths(brownian_spectrum, T5, 0, 1, 0)
    with pytest.raises(SizeError):
        sample_paths(brownian_spectrum, T5, 10, 0, 0)
    with pytest.raises(SizeError):
        sample_paths(brownian_spectrum, T5, 10, 2, 0, xi=np.ones((3, 10)))
    with pytest.raises(SizeError):
        PathSample(T5, np.zeros(4), 0, 1, "x")
    with pytest.raises(ValueError):
        standard_normals(-1, 0, 3)
