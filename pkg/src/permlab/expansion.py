"""Degree decomposition of f(X) = |perm(X)|^2 and its noisy version.

Write w(i, a, b) = x[i, a] conj(x[i, b]) - [a == b].  For a == b this is the
degree-2 basis function h2(x[i, a]) (complex) or sqrt(2) h2(x[i, a]) (real);
otherwise it is a product of two distinct degree-1 functions.  Grouping the
pair expansion of |perm|^2 by the rows where the constant part of |x|^2 was
taken gives the degree-2j component

    f^{=2j}(X) = (n - j)! * sum_{|I| = |J| = j} sum_{sigma', tau': I -> J} prod_{i in I} w(i, sigma'(i), tau'(i)),

which has the same form for both ensemble kinds.  The noise operator
multiplies it by rho^(2j).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .errors import CapacityError
from .matrices import NoiseParameter, as_noise, check_kind
from .permanent import MultisetOutcome, pair_permanent, MAX_PAIR

MAX_EXACT_G = 7
MAX_SUBSETS = 10**6


def h2_complex(z):
    """|z|^2 - 1, the degree-2 member of the complex orthonormal set."""
    z = np.asarray(z)
    out = (z * np.conj(z)).real - 1.0
    return out if out.ndim else float(out)


def hermite(deg: int, x):
    """Normalized Hermite polynomial of degree 0, 1 or 2."""
    x = np.asarray(x, dtype=float)
    if deg == 0:
        out = np.ones_like(x)
    elif deg == 1:
        out = x.copy()
    elif deg == 2:
        out = (x * x - 1.0) / math.sqrt(2.0)
    else:
        raise ValueError(f"only degrees 0, 1, 2 are supported, got {deg}")
    return out if out.ndim else float(out)


def _matrices(X) -> np.ndarray:
    A = np.asarray(X, dtype=np.complex128)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {A.shape}")
    return A


def _w_tensor(A: np.ndarray) -> np.ndarray:
    """w[..., i, a, b] = x[i, a] conj(x[i, b]) - [a == b]."""
    n = A.shape[-1]
    return A[..., :, :, None] * np.conj(A)[..., :, None, :] - np.eye(n)


def degree_component(X, j: int, kind: str = "complex"):
    """Evaluate f^{=2j}(X) by summing over row sets, column sets and bijection pairs.

    Accepts a single matrix or a stack; returns float or array.
    """
    check_kind(kind)
    A = _matrices(X)
    n = A.shape[-1]
    if not 0 <= j <= n:
        raise ValueError(f"half-degree j must lie in 0..{n}, got {j}")
    if j > 6 and n > 7:
        raise CapacityError("degree_component needs j <= 6 or n <= 7")
    if j > MAX_PAIR or math.comb(n, j) ** 2 > MAX_SUBSETS:
        raise CapacityError(f"degree_component(n={n}, j={j}) exceeds the subset budget")
    batch = A.shape[:-2]
    scale = math.factorial(n - j)
    if j == 0:
        out = np.full(batch, float(scale))
        return out if batch else float(scale)
    w = _w_tensor(A)
    total = np.zeros(batch, dtype=np.complex128)
    for rows in itertools.combinations(range(n), j):
        sub_rows = w[..., rows, :, :]
        for cols in itertools.combinations(range(n), j):
            block = sub_rows[..., :, cols, :][..., :, :, cols]
            total = total + pair_permanent(block)
    out = scale * total.real
    return out if batch else float(out)


@numba.njit(cache=True)
def _layered_batch(w, n):
    count = w.shape[0]
    size = 1 << n
    pop = np.zeros(size, dtype=np.int64)
    for s in range(1, size):
        pop[s] = pop[s >> 1] + (s & 1)
    out = np.zeros((count, n + 1), dtype=np.complex128)
    dp = np.zeros(size * size, dtype=np.complex128)
    nxt = np.zeros(size * size, dtype=np.complex128)
    for b in range(count):
        dp[:] = 0.0
        dp[0] = 1.0
        for i in range(n):
            nxt[:] = dp  # row i carries the constant term
            for mt in range(size):
                for ms in range(size):
                    if pop[ms] != pop[mt] or pop[ms] > i:
                        continue
                    cur = dp[ms + mt * size]
                    if cur == 0:
                        continue
                    for a in range(n):
                        if (ms >> a) & 1:
                            continue
                        for c in range(n):
                            if (mt >> c) & 1:
                                continue
                            nxt[(ms | (1 << a)) + (mt | (1 << c)) * size] += cur * w[b, i, a, c]
            dp[:] = nxt
        for m in range(size):
            out[b, pop[m]] += dp[m + m * size]
    return out


def degree_components(X, kind: str = "complex") -> np.ndarray:
    """All components f^{=2j}(X), j = 0..n, in one pass (n <= 7).

    Rows either take the constant term or join the partial bijection pair;
    the final column sets of both bijections must coincide.  Returns shape
    ``batch + (n + 1,)``.
    """
    check_kind(kind)
    A = _matrices(X)
    n = A.shape[-1]
    if n > MAX_EXACT_G:
        raise CapacityError(f"degree_components is limited to n <= {MAX_EXACT_G}")
    flat = np.ascontiguousarray(_w_tensor(A).reshape(-1, n, n, n))
    raw = _layered_batch(flat, n).real
    scale = np.array([math.factorial(n - j) for j in range(n + 1)], dtype=float)
    return (raw * scale).reshape(A.shape[:-2] + (n + 1,))


def noisy_square_perm_exact(X, noise, kind: str = "complex"):
    """g(X) = E[|perm(Y)|^2 | X] for Y an epsilon-noise of X.

    Exact sum over all permutation pairs: a row where sigma and tau disagree
    contributes rho^2 x[i,s] conj(x[i,t]); a row where they agree contributes
    rho^2 |x[i,s]|^2 + epsilon.
    """
    check_kind(kind)
    noise = as_noise(noise)
    A = _matrices(X)
    n = A.shape[-1]
    if n > MAX_EXACT_G:
        raise CapacityError(f"exact noisy permanent is limited to n <= {MAX_EXACT_G}")
    W = noise.rho2 * (A[..., :, :, None] * np.conj(A)[..., :, None, :]) + noise.epsilon * np.eye(n)
    out = pair_permanent(W).real
    return float(out) if np.ndim(out) == 0 else out


def noisy_minor_coeff_exact(A, S: MultisetOutcome, noise) -> float:
    """E[|perm(Y_S)|^2 | A] where Y is an epsilon-noise of the full n x m matrix A.

    Repeated columns of the minor are copies of one noisy column, so two
    minor columns share a noise entry exactly when their ambient indices match.
    """
    noise = as_noise(noise)
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError("A must be an n x m matrix")
    n, m = arr.shape
    if S.m != m or S.n != n:
        raise ValueError(f"outcome over {S.m} columns of size {S.n} does not fit a {n}x{m} matrix")
    if n > MAX_EXACT_G:
        raise CapacityError(f"exact noisy coefficient is limited to n <= {MAX_EXACT_G}")
    return float(noisy_minor_coeffs(arr, [S], noise)[0])


def noisy_minor_coeffs(A: np.ndarray, outcomes, noise) -> np.ndarray:
    """Vectorized :func:`noisy_minor_coeff_exact` over a list of outcomes."""
    noise = as_noise(noise)
    cols = np.array([S.columns for S in outcomes], dtype=np.intp)
    minors = A[:, cols].transpose(1, 0, 2)  # (K, n, n)
    same = (cols[:, :, None] == cols[:, None, :]).astype(float)  # (K, n, n)
    W = noise.rho2 * (minors[:, :, :, None] * np.conj(minors)[:, :, None, :])
    W = W + noise.epsilon * same[:, None, :, :]
    return pair_permanent(W).real


@dataclass(frozen=True)
class TruncationModel:
    """The degree-<=d approximator p_d = sum_{2j <= d} rho^(2j) f^{=2j}."""

    n: int
    kind: str
    noise: NoiseParameter
    d: int

    def __post_init__(self):
        check_kind(self.kind)
        object.__setattr__(self, "noise", as_noise(self.noise))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.d <= 2 * self.n or self.d % 2:
            raise ValueError(f"d must be even and in [0, {2 * self.n}], got {self.d}")

    @property
    def half_degrees(self) -> range:
        return range(self.d // 2 + 1)


def evaluate_truncated(model: TruncationModel, X):
    """p_d(X) for a single matrix or a stack."""
    A = _matrices(X)
    if A.shape[-1] != model.n:
        raise ValueError(f"model is for n={model.n}, matrix has n={A.shape[-1]}")
    r = model.noise.rho2
    if model.n <= MAX_EXACT_G:
        comps = degree_components(A, model.kind)[..., : model.d // 2 + 1]
        weights = r ** np.arange(model.d // 2 + 1)
        out = comps @ weights
    else:
        out = sum(r**j * degree_component(A, j, model.kind) for j in model.half_degrees)
    return float(out) if np.ndim(out) == 0 else out


# --- basis terms and coefficients ----------------------------------------

COMPLEX_LABELS = ("z", "zbar", "h2")
REAL_LABELS = (1, 2)


@dataclass(frozen=True)
class BasisTerm:
    """A product basis function over the cells of an n x n grid.

    ``cells`` maps zero-based ``(row, col)`` to a label: ``"z"``, ``"zbar"`` or
    ``"h2"`` for the complex basis, Hermite degree 1 or 2 for the real basis.
    Unlisted cells carry the constant function.
    """

    n: int
    kind: str
    cells: tuple

    def __post_init__(self):
        check_kind(self.kind)
        items = self.cells.items() if isinstance(self.cells, dict) else self.cells
        norm = []
        seen = set()
        allowed = COMPLEX_LABELS if self.kind == "complex" else REAL_LABELS
        for cell, label in items:
            i, a = (int(v) for v in cell)
            if not (0 <= i < self.n and 0 <= a < self.n):
                raise ValueError(f"cell {(i, a)} outside the {self.n}x{self.n} grid")
            if (i, a) in seen:
                raise ValueError(f"cell {(i, a)} listed twice")
            if label not in allowed:
                raise ValueError(f"label {label!r} not valid for the {self.kind} basis")
            seen.add((i, a))
            norm.append(((i, a), label))
        object.__setattr__(self, "cells", tuple(sorted(norm, key=lambda t: t[0])))

    @classmethod
    def complex_term(cls, n, z=(), zbar=(), h2=()) -> "BasisTerm":
        cells = [(c, "z") for c in z] + [(c, "zbar") for c in zbar] + [(c, "h2") for c in h2]
        return cls(n, "complex", tuple(cells))

    @classmethod
    def real_term(cls, n, h1=(), h2=()) -> "BasisTerm":
        return cls(n, "real", tuple([(c, 1) for c in h1] + [(c, 2) for c in h2]))

    @property
    def degree(self) -> int:
        if self.kind == "complex":
            return sum(2 if lab == "h2" else 1 for _, lab in self.cells)
        return sum(lab for _, lab in self.cells)

    @property
    def h2_count(self) -> int:
        return sum(1 for _, lab in self.cells if lab in ("h2", 2))


def _complex_multiplicity(term: BasisTerm) -> int | None:
    """Number of rows j used if the term has the bijection-pair shape, else None."""
    by_row: dict = {}
    for (i, a), lab in term.cells:
        by_row.setdefault(i, {}).setdefault(lab, []).append(a)
    sigma, tau = {}, {}
    for i, labs in by_row.items():
        if set(labs) == {"h2"} and len(labs["h2"]) == 1:
            sigma[i] = tau[i] = labs["h2"][0]
        elif set(labs) == {"z", "zbar"} and len(labs["z"]) == len(labs["zbar"]) == 1:
            sigma[i], tau[i] = labs["z"][0], labs["zbar"][0]
        else:
            return None
    image = set(sigma.values())
    if len(image) != len(sigma) or len(set(tau.values())) != len(tau) or image != set(tau.values()):
        return None
    return len(sigma)


def _real_multiplicity(term: BasisTerm) -> tuple[int, int] | None:
    """(rows used, number of (sigma', tau') pairs) for a real term, or None."""
    by_row: dict = {}
    for (i, a), lab in term.cells:
        by_row.setdefault(i, []).append((a, lab))
    loops, edges = set(), []
    for i, entries in by_row.items():
        labs = sorted(lab for _, lab in entries)
        if labs == [2]:
            loops.add(entries[0][0])
        elif labs == [1, 1]:
            edges.append((entries[0][0], entries[1][0]))
        else:
            return None
    if len(loops) != sum(1 for labs in by_row.values() if len(labs) == 1):
        return None  # two h2 rows on one column
    degree: dict = {}
    adj: dict = {}
    for a, b in edges:
        for u, v in ((a, b), (b, a)):
            degree[u] = degree.get(u, 0) + 1
            adj.setdefault(u, []).append(v)
    if any(c in loops for c in degree) or any(k != 2 for k in degree.values()):
        return None
    # every edge column has degree 2, so the edges form disjoint cycles
    seen, cycles = set(), 0
    for start in degree:
        if start in seen:
            continue
        cycles += 1
        stack = [start]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(adj[u])
    return len(by_row), 2**cycles


def coefficient_query(n: int, term: BasisTerm, kind: str | None = None, noise=None, d: int | None = None):
    """Coefficient of ``term`` in f (``noise=None``) or in p_d.

    Complex basis: an exact ``Fraction``, (n - j)! times rho^(2j) when a noise
    level is given.  Real basis: a float, since normalized h2 factors bring
    powers of sqrt(2); :func:`squared_coefficient` gives the exact square.
    Terms above degree ``d`` have coefficient 0 in p_d.
    """
    sq = squared_coefficient(n, term, kind, noise, d)
    if term.kind == "complex":
        return _complex_coefficient(n, term, noise, d)
    # real coefficients are positive: counts times powers of sqrt(2) and rho
    return math.sqrt(sq)


def _noise_factor(noise, j: int) -> Fraction:
    if noise is None:
        return Fraction(1)
    return Fraction(as_noise(noise).rho2) ** j


def _complex_coefficient(n, term, noise, d) -> Fraction:
    j = _complex_multiplicity(term)
    if j is None or (d is not None and 2 * j > d):
        return Fraction(0)
    return math.factorial(n - j) * _noise_factor(noise, j)


def squared_coefficient(n: int, term: BasisTerm, kind: str | None = None, noise=None,
                        d: int | None = None) -> Fraction:
    """Exact square of :func:`coefficient_query` as a ``Fraction``."""
    if kind is not None and kind != term.kind:
        raise ValueError(f"term is {term.kind}, query asked for {kind}")
    if term.n != n:
        raise ValueError(f"term lives on a {term.n}x{term.n} grid, not {n}x{n}")
    if term.kind == "complex":
        return _complex_coefficient(n, term, noise, d) ** 2
    found = _real_multiplicity(term)
    if found is None:
        return Fraction(0)
    j, pairs = found
    if d is not None and 2 * j > d:
        return Fraction(0)
    base = math.factorial(n - j) * pairs
    return Fraction(base * base * 2**term.h2_count) * _noise_factor(noise, j) ** 2
