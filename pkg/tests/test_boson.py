import csv
import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from permlab.boson import (compare, count_outcomes, enumerate_outcomes, ideal_distribution,
                           noisy_distribution, noisy_distribution_mc, noisy_gram_exact, pearson,
                           total_variation)
from permlab.errors import CapacityError, DegenerateInputError
from permlab.permanent import gram_permanent

from conftest import cgauss


def test_enumeration_small():
    assert [S.parts for S in enumerate_outcomes(1, 3)] == [(1,), (2,), (3,)]
    two = enumerate_outcomes(2, 2)
    assert [S.parts for S in two] == [(1, 1), (1, 2), (2, 2)]
    assert [S.mu for S in two] == [Fraction(1, 2), 1, Fraction(1, 2)]
    assert len(enumerate_outcomes(3, 4)) == count_outcomes(3, 4) == 20
    with pytest.raises(ValueError):
        enumerate_outcomes(0, 3)
    with pytest.raises(CapacityError):
        enumerate_outcomes(10, 40)


def test_ideal_n1_is_normalized_squares():
    a = np.array([[1.0, 2j, -2.0]])
    rep = ideal_distribution(a)
    assert np.allclose(rep.ideal_probs, [1 / 9, 4 / 9, 4 / 9])


def test_ideal_identity_columns():
    A = np.eye(2, 3)
    rep = ideal_distribution(A)
    probs = dict(zip((S.parts for S in rep.outcomes), rep.ideal_probs))
    assert probs[(1, 2)] == pytest.approx(1.0)
    assert sum(probs.values()) == pytest.approx(1.0)


@pytest.mark.parametrize("n,m", [(2, 4), (3, 5), (3, 6), (4, 6)])
def test_ideal_sums_to_one(rng, n, m):
    rep = ideal_distribution(cgauss(rng, n, m))
    assert abs(rep.ideal_probs.sum() - 1) <= 1e-10
    assert np.all(rep.ideal_probs >= 0)


def test_ideal_degenerate():
    with pytest.raises(DegenerateInputError):
        ideal_distribution(np.zeros((2, 3)))


def test_ideal_scale_invariance(rng):
    A = cgauss(rng, 3, 5)
    assert np.allclose(ideal_distribution(A).ideal_probs, ideal_distribution((2 - 1j) * A).ideal_probs,
                       atol=1e-13)


def test_ideal_column_permutation_equivariance(rng):
    A = cgauss(rng, 2, 4)
    perm = np.array([2, 0, 3, 1])  # new column k is old column perm[k]
    base = ideal_distribution(A)
    moved = ideal_distribution(A[:, perm])
    lookup = {S.parts: p for S, p in zip(base.outcomes, base.ideal_probs)}
    for S, p in zip(moved.outcomes, moved.ideal_probs):
        old = tuple(sorted(perm[c - 1] + 1 for c in S.parts))
        assert p == pytest.approx(lookup[old], abs=1e-13)


def test_noisy_zero_matches_ideal(rng):
    rep = noisy_distribution(cgauss(rng, 3, 6), 0.0)
    assert np.max(np.abs(rep.noisy_probs - rep.ideal_probs)) <= 1e-12
    assert rep.metrics["tv"] <= 1e-12


def test_noisy_full_is_uniform(rng):
    rep = noisy_distribution(cgauss(rng, 3, 5), 1.0)
    assert np.allclose(rep.noisy_probs, 1 / count_outcomes(3, 5), atol=1e-14)


def test_noisy_full_uniform_by_sampling():
    # at full noise each Gaussian draw is independent of A; average Pr over draws
    A = np.ones((2, 5))
    mean, se = noisy_distribution_mc(A, 1.0, samples=20_000, seed=3)
    assert np.all(np.abs(mean - 1 / 15) <= 4 * se)


def test_noisy_normalizer_is_noisy_gram(rng):
    from permlab.boson import _mus
    from permlab.expansion import noisy_minor_coeffs
    A = cgauss(rng, 3, 5)
    outcomes = enumerate_outcomes(3, 5)
    for eps in (0.1, 0.5, 0.9):
        Z = float(np.sum(_mus(outcomes) * noisy_minor_coeffs(A, outcomes, eps)))
        assert Z == pytest.approx(noisy_gram_exact(A, eps), rel=1e-10)


def test_noisy_gram_extremes(rng):
    A = cgauss(rng, 3, 4)
    assert noisy_gram_exact(A, 0.0) == pytest.approx(gram_permanent(A), rel=1e-12)
    # at full noise each M_r is the identity on C^m: sum over sigma of m^cycles
    m = 4
    assert noisy_gram_exact(A, 1.0) == pytest.approx(m * (m + 1) * (m + 2), rel=1e-12)


def test_noisy_gram_n1():
    a = np.array([[1.0, 1j, 2.0]])
    eps = 0.3
    assert noisy_gram_exact(a, eps) == pytest.approx(0.7 * 6 + 3 * eps)


def test_compare_edge_cases():
    from permlab.boson import DistributionReport
    p = np.array([0.5, 0.25, 0.25])
    rep = DistributionReport(1, 3, enumerate_outcomes(1, 3), p, p.copy())
    m = compare(rep)
    assert m["tv"] == 0 and m["pearson"] == pytest.approx(1.0)
    assert total_variation([1, 0], [0, 1]) == 1.0
    assert pearson([1 / 3] * 3, p) is None
    with pytest.raises(ValueError):
        compare(DistributionReport(1, 3, enumerate_outcomes(1, 3), p))


def test_full_noise_correlation_undefined(rng):
    rep = noisy_distribution(cgauss(rng, 3, 5), 1.0)
    assert rep.metrics["pearson"] is None


def test_tv_grows_with_noise(rng):
    grid = np.round(np.arange(0.0, 1.01, 0.1), 2)
    for shape in ((2, 4), (3, 6)):
        A = cgauss(rng, *shape)
        tvs = [noisy_distribution(A, e).metrics["tv"] for e in grid]
        assert all(b >= a - 1e-12 for a, b in zip(tvs, tvs[1:]))


def test_report_serialization(rng):
    rep = noisy_distribution(cgauss(rng, 2, 3), 0.25)
    data = json.loads(rep.to_json())
    assert data["epsilon"] == 0.25
    assert data["outcomes"][0]["parts"] == [1, 1]
    assert data["outcomes"][0]["mu"] == "1/2"
    assert set(data["metrics"]) == {"pearson", "tv", "l1"}
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["outcome", "mu", "p_ideal", "p_noisy"]
    assert len(rows) == 1 + count_outcomes(2, 3)
    assert rows[2][0] == "1 2"
    assert float(rows[1][3]) == pytest.approx(rep.noisy_probs[0], rel=1e-11)


def test_mc_ratio_estimator_near_exact_at_small_noise(rng):
    A = cgauss(rng, 2, 4)
    mean, se = noisy_distribution_mc(A, 0.05, samples=4000, seed=1)
    exact = noisy_distribution(A, 0.05).noisy_probs
    assert abs(mean.sum() - 1) <= 1e-12
    # averaging normalized probabilities differs from normalizing averages at O(eps)
    assert np.max(np.abs(mean - exact)) < 0.05
    again, _ = noisy_distribution_mc(A, 0.05, samples=4000, seed=1)
    assert np.array_equal(mean, again)
