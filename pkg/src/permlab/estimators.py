"""Seeded Monte Carlo estimators with standard errors.

All estimators draw matrices through :func:`permlab.matrices.sample_batch`,
so a (seed, samples) pair fixes the result regardless of thread count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DegenerateInputError
from .expansion import MAX_EXACT_G, degree_component, degree_components, noisy_square_perm_exact
from .matrices import NOISE_STREAM, _draw, as_noise, check_kind, noisy_copy, sample_batch
from .permanent import permanent
from .rng import chunk_sizes, map_chunks, substream

BOOTSTRAP_STREAM = 7
BOOTSTRAP_RESAMPLES = 200
MAX_FOURTH_MOMENT_N = 10


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.stderr


def _mean_estimate(values: np.ndarray, seed: int) -> Estimate:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("need at least two samples")
    return Estimate(float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(values.size)),
                    int(values.size), seed)


def _batched(fn, X: np.ndarray) -> np.ndarray:
    sizes = chunk_sizes(len(X))
    starts = np.cumsum([0] + sizes)
    parts = map_chunks(lambda k: fn(X[starts[k]:starts[k + 1]]), range(len(sizes)))
    return np.concatenate(parts) if parts else np.zeros(0)


def _check_samples(samples: int):
    if samples < 100:
        raise ValueError("need at least 100 samples")


def sample_f(n: int, kind: str, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Sampled matrices and their values |perm(X)|^2."""
    X = sample_batch(samples, n, n, kind, seed)
    f = _batched(lambda b: np.abs(permanent(b)) ** 2, X)
    return X, f


def estimate_moment(n: int, power: int, kind: str = "complex", samples: int = 100_000,
                    seed: int = 0) -> Estimate:
    """Monte Carlo E|perm(X)|^power for power 2 or 4."""
    check_kind(kind)
    _check_samples(samples)
    if power not in (2, 4):
        raise ValueError("power must be 2 or 4")
    if power == 4 and n > MAX_FOURTH_MOMENT_N:
        raise CapacityError(f"fourth moment estimation is capped at n <= {MAX_FOURTH_MOMENT_N}")
    _, f = sample_f(n, kind, samples, seed)
    return _mean_estimate(f if power == 2 else f * f, seed)


def bootstrap_corr(f: np.ndarray, g: np.ndarray, seed: int,
                   resamples: int = BOOTSTRAP_RESAMPLES) -> tuple[float, float]:
    """Pearson correlation and its bootstrap standard error."""
    f, g = np.asarray(f, float), np.asarray(g, float)
    corr = float(np.corrcoef(f, g)[0, 1])
    rng = substream(seed, BOOTSTRAP_STREAM)
    boots = np.empty(resamples)
    for b in range(resamples):
        idx = rng.integers(0, f.size, f.size)
        boots[b] = np.corrcoef(f[idx], g[idx])[0, 1]
    return corr, float(np.std(boots, ddof=1))


def estimate_corr(n: int, noise, kind: str = "complex", samples: int = 10_000,
                  seed: int = 0) -> Estimate:
    """Sample correlation of f = |perm(X)|^2 and g = exact noisy |perm|^2."""
    check_kind(kind)
    _check_samples(samples)
    noise = as_noise(noise)
    if n > MAX_EXACT_G:
        raise CapacityError(f"estimate_corr evaluates g exactly and is limited to n <= {MAX_EXACT_G}")
    if noise.epsilon == 0.0:
        return Estimate(1.0, 0.0, samples, seed)
    if noise.epsilon == 1.0:
        raise DegenerateInputError("g is the constant n! at full noise; the correlation is undefined")
    X, f = sample_f(n, kind, samples, seed)
    g = _batched(lambda b: noisy_square_perm_exact(b, noise, kind), X)
    corr, se = bootstrap_corr(f, g, seed)
    return Estimate(corr, se, samples, seed)


def project_degree_weight(n: int, j: int, kind: str = "complex", samples: int = 100_000,
                          seed: int = 0) -> Estimate:
    """Sample mean of f^{=2j}(X)^2, an estimate of the degree weight W_2j(n).

    For j = 0 the component is the constant n!, so the estimate is exact.
    """
    check_kind(kind)
    _check_samples(samples)
    X = sample_batch(samples, n, n, kind, seed)
    if n <= MAX_EXACT_G:
        comp = _batched(lambda b: degree_components(b, kind)[:, j], X)
    else:
        comp = _batched(lambda b: degree_component(b, j, kind), X)
    return _mean_estimate(comp * comp, seed)


def estimate_g_mc(X, noise, inner_samples: int = 100_000, seed: int = 0,
                  kind: str | None = None) -> Estimate:
    """Nested Monte Carlo for g(X): mean of |perm(Y)|^2 over fresh epsilon-noises Y."""
    noise = as_noise(noise)
    if kind is None:
        kind = getattr(X, "kind", "complex")
    check_kind(kind)
    arr = np.asarray(X, dtype=np.complex128)
    if noise.epsilon == 0.0:
        return Estimate(abs(permanent(arr)) ** 2, 0.0, inner_samples, seed)
    sizes = chunk_sizes(inner_samples)

    def chunk(k):
        U = _draw(substream(seed, NOISE_STREAM, k), (sizes[k],) + arr.shape, kind)
        return np.abs(permanent(noisy_copy(arr, noise, U))) ** 2

    values = np.concatenate(map_chunks(chunk, range(len(sizes))))
    return _mean_estimate(values, seed)


def truncation_mse(n: int, noise, d: int, kind: str = "complex", samples: int = 200,
                   seed: int = 0) -> Estimate:
    """Empirical E[(p_d - g)^2] / E[(g - n!)^2] with a bootstrap standard error.

    Both expectations are sample means over the same matrices.
    """
    check_kind(kind)
    noise = as_noise(noise)
    if n > MAX_EXACT_G:
        raise CapacityError(f"truncation_mse is limited to n <= {MAX_EXACT_G}")
    if not 0 <= d <= 2 * n:
        raise ValueError(f"d must lie in [0, {2 * n}]")
    if noise.epsilon == 1.0:
        raise DegenerateInputError("g is the constant n! at full noise; the relative error is undefined")
    X = sample_batch(samples, n, n, kind, seed)
    comps = degree_components(X, kind)
    r = noise.rho2
    weights = r ** np.arange(n + 1)
    g = noisy_square_perm_exact(X, noise, kind)
    p = comps[:, : d // 2 + 1] @ weights[: d // 2 + 1]
    num = (p - g) ** 2
    den = (g - math.factorial(n)) ** 2
    ratio = float(num.mean() / den.mean())
    rng = substream(seed, BOOTSTRAP_STREAM)
    boots = np.empty(BOOTSTRAP_RESAMPLES)
    for b in range(BOOTSTRAP_RESAMPLES):
        idx = rng.integers(0, samples, samples)
        boots[b] = num[idx].mean() / den[idx].mean()
    return Estimate(ratio, float(np.std(boots, ddof=1)), samples, seed)
