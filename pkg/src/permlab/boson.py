"""Exact ideal and noisy BosonSampling distributions at desk scale."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DegenerateInputError
from .expansion import MAX_EXACT_G, noisy_minor_coeffs
from .matrices import NOISE_STREAM, _draw, as_noise, noisy_copy
from .permanent import MultisetOutcome, gram_permanent, permanent
from .rng import chunk_sizes, substream
from .spectral import cycle_lengths

MAX_OUTCOMES = 10**6
MAX_NOISY_GRAM = 8


def count_outcomes(n: int, m: int) -> int:
    return math.comb(m + n - 1, n)


def enumerate_outcomes(n: int, m: int) -> list[MultisetOutcome]:
    """All size-n multisets of ``1..m`` in lexicographic order."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if count_outcomes(n, m) > MAX_OUTCOMES:
        raise CapacityError(f"C(m+n-1, n) = {count_outcomes(n, m)} outcomes exceeds {MAX_OUTCOMES}")
    return [MultisetOutcome(m, parts) for parts in itertools.combinations_with_replacement(range(1, m + 1), n)]


def _mus(outcomes) -> np.ndarray:
    return np.array([float(S.mu) for S in outcomes])


def _minor_stack(A: np.ndarray, outcomes) -> np.ndarray:
    cols = np.array([S.columns for S in outcomes], dtype=np.intp)
    return A[:, cols].transpose(1, 0, 2)


def _as_nm(A) -> np.ndarray:
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError("A must be an n x m matrix")
    return arr


def multiset_weights(A, outcomes=None) -> np.ndarray:
    """mu(S) |perm(A_S)|^2 for each outcome (lexicographic by default)."""
    arr = _as_nm(A)
    if outcomes is None:
        outcomes = enumerate_outcomes(*arr.shape)
    return _mus(outcomes) * np.abs(permanent(_minor_stack(arr, outcomes))) ** 2


def pearson(p, q) -> float | None:
    """Pearson correlation, or None when either vector is constant.

    A vector counts as constant when its spread is at rounding level
    relative to its magnitude.
    """
    p, q = np.asarray(p, float), np.asarray(q, float)
    dp, dq = p - p.mean(), q - q.mean()
    for v, dv in ((p, dp), (q, dq)):
        if np.max(np.abs(dv), initial=0.0) <= 1e-12 * np.max(np.abs(v), initial=0.0):
            return None
    norm = math.sqrt(float(dp @ dp) * float(dq @ dq))
    return float(dp @ dq) / norm


def total_variation(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p, float) - np.asarray(q, float))))


def compare(report: "DistributionReport") -> dict:
    """Pearson correlation, total variation and l1 distance of the two sides."""
    if report.ideal_probs is None or report.noisy_probs is None:
        raise ValueError("both probability vectors must be populated")
    tv = total_variation(report.ideal_probs, report.noisy_probs)
    return {"pearson": pearson(report.ideal_probs, report.noisy_probs), "tv": tv, "l1": 2.0 * tv}


@dataclass
class DistributionReport:
    n: int
    m: int
    outcomes: list
    ideal_probs: np.ndarray | None = None
    noisy_probs: np.ndarray | None = None
    epsilon: float | None = None
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        rows = []
        for k, S in enumerate(self.outcomes):
            rows.append({
                "parts": list(S.parts),
                "mu": str(S.mu),
                "p_ideal": None if self.ideal_probs is None else float(self.ideal_probs[k]),
                "p_noisy": None if self.noisy_probs is None else float(self.noisy_probs[k]),
            })
        return {"n": self.n, "m": self.m, "epsilon": self.epsilon, "outcomes": rows,
                "metrics": self.metrics}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["outcome", "mu", "p_ideal", "p_noisy"])
        for row in self.to_dict()["outcomes"]:
            writer.writerow([
                " ".join(map(str, row["parts"])), row["mu"],
                "" if row["p_ideal"] is None else f"{row['p_ideal']:.12g}",
                "" if row["p_noisy"] is None else f"{row['p_noisy']:.12g}",
            ])
        return buf.getvalue()


def ideal_distribution(A) -> DistributionReport:
    """Pr(S) = mu(S) |perm(A_S)|^2 / perm(A A*).

    The divisor is the Gram permanent, not the sum of the numerators, so the
    probabilities sum to one only by the permanental Cauchy-Binet identity.
    """
    arr = _as_nm(A)
    n, m = arr.shape
    outcomes = enumerate_outcomes(n, m)
    h = gram_permanent(arr)
    if not h > 0:
        raise DegenerateInputError("perm(A A*) is zero; the distribution is undefined")
    probs = multiset_weights(arr, outcomes) / h
    return DistributionReport(n, m, outcomes, ideal_probs=probs)


def noisy_gram_exact(A, noise) -> float:
    """E[perm(Y Y*) | A] for Y an epsilon-noise of A.

    With M_r = rho^2 a_r a_r^* + epsilon I (a_r row r of A as a column),
    E[perm(Y Y*)] = sum_sigma prod over cycles (r1 -> r2 -> ... ) of
    tr(M_r1 M_rk ... M_r2), i.e. the rows of each cycle multiplied against the
    cycle direction.
    """
    noise = as_noise(noise)
    arr = _as_nm(A)
    n, m = arr.shape
    if n > MAX_NOISY_GRAM:
        raise CapacityError(f"noisy_gram_exact is limited to n <= {MAX_NOISY_GRAM}")
    M = noise.rho2 * (arr[:, :, None] * np.conj(arr)[:, None, :]) + noise.epsilon * np.eye(m)
    cache: dict = {}

    def cycle_trace(cycle: tuple) -> complex:
        if cycle not in cache:
            prod = np.eye(m, dtype=np.complex128)
            for r in cycle:
                prod = prod @ M[r]
            cache[cycle] = np.trace(prod)
        return cache[cycle]

    total = 0.0 + 0.0j
    for sigma in itertools.permutations(range(n)):
        term = 1.0 + 0.0j
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            # walk against sigma: start, sigma^-1(start), ...
            inv_cycle = []
            r = start
            while not seen[r]:
                seen[r] = True
                inv_cycle.append(r)
                r = sigma[r]
            cyc = (inv_cycle[0],) + tuple(reversed(inv_cycle[1:]))
            term *= cycle_trace(_canonical(cyc))
        total += term
    return float(total.real)


def _canonical(cycle: tuple) -> tuple:
    k = cycle.index(min(cycle))
    return cycle[k:] + cycle[:k]


def noisy_distribution(A, noise) -> DistributionReport:
    """Noisy distribution q(S) = mu(S) E[|perm(Y_S)|^2 | A] / Z, with both sides and metrics.

    Z is the sum of the numerators over all outcomes, which equals the noisy
    Gram permanent ``noisy_gram_exact(A, noise)``.
    """
    noise = as_noise(noise)
    arr = _as_nm(A)
    n, m = arr.shape
    if n > MAX_EXACT_G:
        raise CapacityError(f"noisy distribution is limited to n <= {MAX_EXACT_G}")
    report = ideal_distribution(arr)
    weights = _mus(report.outcomes) * noisy_minor_coeffs(arr, report.outcomes, noise)
    Z = float(np.sum(weights))
    if not Z > 0:
        raise DegenerateInputError("noisy normalization is zero")
    report.noisy_probs = weights / Z
    report.epsilon = noise.epsilon
    report.metrics = compare(report)
    return report


def noisy_distribution_mc(A, noise, samples: int, seed: int = 0, kind: str = "complex"):
    """Monte Carlo E[Pr_Y(S)] over epsilon-noises Y of A (ratio of expectations swapped).

    Returns ``(mean, stderr)`` arrays in lexicographic outcome order.  The gap
    to :func:`noisy_distribution` measures the effect of averaging each
    normalized probability instead of normalizing averaged weights.
    """
    noise = as_noise(noise)
    arr = _as_nm(A)
    n, m = arr.shape
    outcomes = enumerate_outcomes(n, m)
    cols = np.array([S.columns for S in outcomes], dtype=np.intp)
    mus = _mus(outcomes)
    acc = np.zeros(len(outcomes))
    acc2 = np.zeros(len(outcomes))
    for k, size in enumerate(chunk_sizes(samples)):
        U = _draw(substream(seed, NOISE_STREAM, k), (size, n, m), kind)
        Y = noisy_copy(arr, noise, U)
        minors = Y[:, :, cols].transpose(0, 2, 1, 3)  # (size, K, n, n)
        w = mus * np.abs(permanent(minors)) ** 2
        p = w / w.sum(axis=1, keepdims=True)
        acc += p.sum(axis=0)
        acc2 += (p * p).sum(axis=0)
    mean = acc / samples
    var = np.maximum(acc2 / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return mean, np.sqrt(var / samples)
