import json
import math

import numpy as np
import pytest

from permlab.matrices import (GaussianMatrix, NoiseParameter, apply_noise, correlated_pair,
                              sample_batch, sample_gaussian)
from permlab.rng import substream


def within(values, target, k=3.0):
    values = np.asarray(values, float)
    se = values.std(ddof=1) / math.sqrt(values.size)
    return abs(values.mean() - target) <= k * se


def test_same_seed_reproduces_bitwise():
    a = sample_gaussian(1, 1, "complex", 42)
    b = sample_gaussian(1, 1, "complex", 42)
    assert np.array_equal(a.entries, b.entries)
    assert a == b
    assert not np.array_equal(a.entries, sample_gaussian(1, 1, "complex", 43).entries)


def test_batch_independent_of_threads(monkeypatch):
    monkeypatch.setenv("PERMLAB_THREADS", "1")
    one = sample_batch(10_000, 2, 3, "complex", 5)
    monkeypatch.setenv("PERMLAB_THREADS", "4")
    four = sample_batch(10_000, 2, 3, "complex", 5)
    assert np.array_equal(one, four)


def test_zero_dimension_rejected():
    with pytest.raises(ValueError):
        sample_gaussian(0, 3)
    with pytest.raises(ValueError):
        sample_gaussian(2, 0)


def test_complex_second_moment():
    z = sample_batch(100_000, 1, 1, "complex", 1).ravel()
    assert within(np.abs(z) ** 2, 1.0)
    # real and imaginary parts each carry half the variance
    assert within(z.real**2, 0.5)


def test_real_fourth_moment():
    x = sample_batch(100_000, 1, 1, "real", 2).ravel()
    assert np.all(x.imag == 0)
    assert within(x.real**4, 3.0)


def test_complex_fourth_moment_is_two():
    z = sample_batch(100_000, 1, 1, "complex", 3).ravel()
    assert within(np.abs(z) ** 4, 2.0)


def test_noise_parameter_invariants():
    p = NoiseParameter.from_epsilon(0.36)
    assert p.rho == pytest.approx(0.8)
    assert abs(p.rho**2 + p.epsilon - 1) <= 1e-12
    assert NoiseParameter.from_rho(0.8).epsilon == pytest.approx(0.36)
    assert NoiseParameter.from_c(2, 10).epsilon == pytest.approx(0.2)
    with pytest.raises(ValueError):
        NoiseParameter(0.5, 0.5)
    with pytest.raises(ValueError):
        NoiseParameter.from_epsilon(1.5)
    with pytest.raises(ValueError):
        NoiseParameter.from_c(-1, 3)


def test_zero_noise_is_identity():
    X = sample_gaussian(3, 4, "complex", 9)
    Y = apply_noise(X, 0.0, seed=1)
    assert np.array_equal(X.entries, Y.entries)


def test_noise_keeps_kind():
    X = sample_gaussian(3, 3, "real", 9)
    Y = apply_noise(X, 0.4, seed=1)
    assert Y.kind == "real"
    assert np.all(Y.entries.imag == 0)


def test_full_noise_decorrelates():
    xs, ys = [], []
    for t in range(10_000):
        X, Y = correlated_pair(1, 1, "real", 1.0, seed=t)
        xs.append(X.entries[0, 0].real)
        ys.append(Y.entries[0, 0].real)
    assert within(np.array(xs) * np.array(ys), 0.0)


def test_noise_preserves_variance():
    X = sample_batch(100_000, 1, 1, "complex", 11).ravel()
    U = sample_batch(100_000, 1, 1, "complex", 12).ravel()
    p = NoiseParameter.from_epsilon(0.5)
    Y = p.rho * X + math.sqrt(p.epsilon) * U
    assert within(np.abs(Y) ** 2, 1.0)
    assert within(Y.real, 0.0)


def test_correlated_pair_rho_one_identical():
    X, Y = correlated_pair(2, 3, "complex", 0.0, seed=4)
    assert X == Y


def test_correlated_pair_covariance():
    # 10^5 scalar pairs at rho = 0.8 via one 1 x 10^5 matrix pair
    X, Y = correlated_pair(1, 100_000, "complex", NoiseParameter.from_rho(0.8), seed=8)
    prod = (X.entries * np.conj(Y.entries)).ravel().real
    assert within(prod, 0.8)
    X0, Y0 = correlated_pair(1, 100_000, "complex", NoiseParameter.from_rho(0.0), seed=8)
    assert within((X0.entries * np.conj(Y0.entries)).ravel().real, 0.0)


def test_pair_matches_separate_calls():
    X, Y = correlated_pair(3, 3, "complex", 0.3, seed=21)
    assert X == sample_gaussian(3, 3, "complex", 21)
    assert Y == apply_noise(X, 0.3, seed=21)


def test_json_roundtrip():
    X = sample_gaussian(2, 3, "complex", 7)
    data = json.loads(X.to_json())
    assert set(data) >= {"rows", "cols", "kind", "entries"}
    assert data["entries"][1] == [X.entries[0, 1].real, X.entries[0, 1].imag]
    assert GaussianMatrix.from_json(X.to_json()) == X


def test_matrix_validation():
    with pytest.raises(ValueError):
        GaussianMatrix(np.array([[1.0, np.nan]]))
    with pytest.raises(ValueError):
        GaussianMatrix(np.array([[1j]]), kind="real")
    M = GaussianMatrix(np.eye(2))
    with pytest.raises(ValueError):
        M.entries[0, 0] = 3


def test_substreams_differ():
    a = substream(1, 0).standard_normal(4)
    b = substream(1, 1).standard_normal(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, substream(1, 0).standard_normal(4))
