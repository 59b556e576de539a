"""Closed-form degree spectra of |perm(X)|^2 and the quantities built on them.

The squared norm of the degree-2m part of f = |perm(X)|^2 is

* complex Gaussian X:  W_2m(n) = (n!)^2              for m = 0..n
* real Gaussian X:     W_2m(n) = (m + 1) (n!)^2

and the noise operator multiplies the degree-2m part by rho^(2m).  Everything
in this module follows from those two facts, plus brute-force enumerations
that re-derive them.
"""
from __future__ import annotations

import itertools
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .matrices import NoiseParameter, as_noise, check_kind

MAX_PROFILE_N = 20
MAX_CYCLE_SUM_N = 10
MAX_BRUTE_EXPANSION_N = 4


@dataclass(frozen=True)
class SpectralProfile:
    n: int
    kind: str
    weights: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.weights)


def _class_factors(n: int, kind: str) -> np.ndarray:
    """Relative weight of each degree class m = 0..n (the common (n!)^2 dropped)."""
    m = np.arange(n + 1, dtype=float)
    return np.ones_like(m) if kind == "complex" else m + 1.0


def degree_weights(n: int, kind: str = "complex") -> SpectralProfile:
    check_kind(kind)
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_PROFILE_N:
        raise CapacityError(f"degree_weights is capped at n <= {MAX_PROFILE_N}")
    sq = math.factorial(n) ** 2
    if kind == "complex":
        weights = tuple(sq for _ in range(n + 1))
    else:
        weights = tuple((m + 1) * sq for m in range(n + 1))
    return SpectralProfile(n, kind, weights)


def fourth_moment(n: int, kind: str = "complex") -> int:
    """E|perm(X)|^4: (n+1)(n!)^2 complex, C(n+2, 2)(n!)^2 real."""
    check_kind(kind)
    if n < 1:
        raise ValueError("n must be at least 1")
    sq = math.factorial(n) ** 2
    return (n + 1) * sq if kind == "complex" else math.comb(n + 2, 2) * sq


def second_moment(n: int) -> int:
    """E|perm(X)|^2 = n! for either kind."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.factorial(n)


def corr_closed_form(n: int, noise, kind: str = "complex") -> float:
    """Correlation between f = |perm(X)|^2 and its noisy version g = T_rho f.

    Computed from the degree spectrum as
    sum_m W_m r^m / sqrt(sum_m W_m * sum_m W_m r^(2m)) over m = 1..n with r = rho^2.
    A common factor r is divided out so that epsilon = 1 gives its limit.
    epsilon = 0 returns 1 with a warning.
    """
    check_kind(kind)
    noise = as_noise(noise)
    if n < 1:
        raise ValueError("n must be at least 1")
    if noise.epsilon == 0.0:
        warnings.warn("epsilon = 0: g equals f, correlation set to 1 by convention", stacklevel=2)
        return 1.0
    r = noise.rho2
    w = _class_factors(n, kind)[1:]
    powers = r ** np.arange(n)
    num = np.sum(w * powers)
    den = math.sqrt(np.sum(w)) * math.sqrt(np.sum(w * powers * powers))
    return float(num / den)


def corr_geometric(n: int, epsilon: float) -> float:
    """Complex-case correlation in summed geometric-series form.

    sqrt((1 - (1-eps)^n)(2 - eps) / (eps n (1 + (1-eps)^n)))
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    q = (1.0 - epsilon) ** n
    return math.sqrt((1.0 - q) * (2.0 - epsilon) / (epsilon * n * (1.0 + q)))


def corr_asymptotic(c: float) -> float:
    """Large-n limit of the complex correlation at epsilon = c/n."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    e = math.exp(-c)
    # 1 - e^{-c} via expm1 keeps precision as c -> 0
    return math.sqrt(2.0 * -math.expm1(-c) / (c * (1.0 + e)))


def truncation_error_bound(n: int, noise, d: int, kind: str = "complex") -> float:
    """Fraction of ||g'||^2 carried by degrees above ``d``.

    Exact ratio sum_{m > d/2} W_2m rho^(4m) / sum_{m >= 1} W_2m rho^(4m).
    """
    check_kind(kind)
    noise = as_noise(noise)
    if not 0 <= d <= 2 * n:
        raise ValueError(f"d must lie in [0, 2n] = [0, {2 * n}], got {d}")
    if noise.epsilon <= 0.0:
        raise ValueError("truncation bound needs epsilon > 0")
    r = noise.rho2
    m = np.arange(1, n + 1)
    terms = _class_factors(n, kind)[1:] * (r * r) ** (m - 1)
    return float(np.sum(terms[m > d / 2]) / np.sum(terms))


# --- permutation combinatorics -------------------------------------------


@dataclass(frozen=True)
class PermutationPairStats:
    n: int
    fixed_points: int
    cycles: int
    cycles_ge2: int


def _check_perm(p, n=None) -> tuple[int, ...]:
    p = tuple(int(v) for v in p)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a permutation of 0..{len(p) - 1}: {p}")
    if n is not None and len(p) != n:
        raise ValueError(f"permutation orders differ: {n} vs {len(p)}")
    return p


def cycle_lengths(pi) -> list[int]:
    pi = _check_perm(pi)
    seen = [False] * len(pi)
    lengths = []
    for start in range(len(pi)):
        if seen[start]:
            continue
        length, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = pi[i]
            length += 1
        lengths.append(length)
    return lengths


def pair_stats(sigma, tau) -> PermutationPairStats:
    """Cycle statistics of sigma^-1 tau (permutations in zero-based one-line form)."""
    sigma = _check_perm(sigma)
    tau = _check_perm(tau, len(sigma))
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s] = i
    pi = [inv[t] for t in tau]
    lengths = cycle_lengths(pi)
    fixed = sum(1 for length in lengths if length == 1)
    return PermutationPairStats(len(sigma), fixed, len(lengths), len(lengths) - fixed)


def cycle_sum_identity(n: int) -> int:
    """Brute-force sum over S_n of 2^cyc(pi).

    The value is (n+1)!; a shorter "(n+1)" sometimes quoted for this sum
    is off by the factor n!.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_CYCLE_SUM_N:
        raise CapacityError(f"cycle_sum_identity enumerates S_n only for n <= {MAX_CYCLE_SUM_N}")
    return sum(2 ** len(cycle_lengths(p)) for p in itertools.permutations(range(n)))


def top_degree_weight_pairsum(n: int) -> int:
    """Real-case W_2n(n) as a sum over all (sigma, tau) of 2^FP * 2^cyc_ge2.

    Each top-degree Hermite monomial collects 2^cyc_ge2 pairs, each with
    coefficient 2^(FP/2), so its squared coefficient 2^FP 4^cyc_ge2 is spread
    evenly over those pairs.
    """
    if n > MAX_BRUTE_EXPANSION_N + 1:
        raise CapacityError("pair enumeration is limited to n <= 5")
    total = 0
    perms = list(itertools.permutations(range(n)))
    for sigma in perms:
        for tau in perms:
            st = pair_stats(sigma, tau)
            total += 2 ** st.fixed_points * 2 ** st.cycles_ge2
    return total


def top_degree_weight_grouped(n: int) -> int:
    """Real-case W_2n(n) summed over distinct top-degree monomials.

    A monomial is the cell set {(i, sigma(i)), (i, tau(i))}; its weight is
    2^FP * 4^cyc_ge2 for any pair that produces it.
    """
    if n > MAX_BRUTE_EXPANSION_N + 1:
        raise CapacityError("pair enumeration is limited to n <= 5")
    seen = {}
    perms = list(itertools.permutations(range(n)))
    for sigma in perms:
        for tau in perms:
            key = frozenset((i, sigma[i]) for i in range(n)) | frozenset((i, tau[i]) for i in range(n))
            if key not in seen:
                st = pair_stats(sigma, tau)
                seen[key] = 2 ** st.fixed_points * 4 ** st.cycles_ge2
    return sum(seen.values())


def brute_force_expansion(n: int, kind: str = "complex") -> dict:
    """Expand |perm(X)|^2 term by term into the orthonormal product basis.

    Returns ``{key: (count, h2_count)}``.  The basis coefficient of ``key`` is
    ``count`` (complex) or ``count * sqrt(2)^h2_count`` (real).  Keys are
    ``(degree, h2_cells, first_cells, second_cells)`` with cells ``(row, col)``:
    for the complex basis the first and second cells carry z and conj(z); for
    the real basis both carry h1 and are merged into ``first_cells``.
    """
    check_kind(kind)
    if not 1 <= n <= MAX_BRUTE_EXPANSION_N:
        raise CapacityError(f"brute-force expansion is limited to n <= {MAX_BRUTE_EXPANSION_N}")
    coeffs: dict = defaultdict(int)
    h2_of: dict = {}
    perms = list(itertools.permutations(range(n)))
    for sigma in perms:
        for tau in perms:
            agree = [i for i in range(n) if sigma[i] == tau[i]]
            differ = [i for i in range(n) if sigma[i] != tau[i]]
            zs = frozenset((i, sigma[i]) for i in differ)
            zbars = frozenset((i, tau[i]) for i in differ)
            # each agreeing row contributes |x|^2 = 1 + (h2 term); pick h2 on `chosen`
            for r in range(len(agree) + 1):
                for chosen in itertools.combinations(agree, r):
                    h2 = frozenset((i, sigma[i]) for i in chosen)
                    degree = 2 * len(differ) + 2 * len(chosen)
                    if kind == "complex":
                        key = (degree, h2, zs, zbars)
                    else:
                        key = (degree, h2, zs | zbars, frozenset())
                    coeffs[key] += 1
                    h2_of[key] = len(chosen)
    return {k: (c, h2_of[k]) for k, c in coeffs.items()}


def brute_force_weights(n: int, kind: str = "complex") -> list[int]:
    """W_2m(n), m = 0..n, as exact integers from :func:`brute_force_expansion`."""
    weights = [0] * (n + 1)
    for (degree, *_), (count, h2) in brute_force_expansion(n, kind).items():
        sq = count * count * (2 ** h2 if kind == "real" else 1)
        weights[degree // 2] += sq
    return weights
