"""Exact permanent kernels.

``permanent`` uses Ryser's inclusion-exclusion formula with Gray-code
subset iteration, O(2^n n) per matrix.  All kernels accept either a single
matrix or a stack of matrices with leading batch axes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .errors import CapacityError

MAX_RYSER = 30
MAX_NAIVE = 9
MAX_PAIR = 8


@dataclass(frozen=True)
class MultisetOutcome:
    """A size-n multiset of column indices drawn from ``1..m``.

    ``parts`` is the sorted tuple of (1-based) column indices with repetition.
    """

    m: int
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted(int(p) for p in self.parts))
        if not parts:
            raise ValueError("a multiset outcome needs at least one part")
        if parts[0] < 1 or parts[-1] > self.m:
            raise ValueError(f"parts must lie in 1..{self.m}, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return len(self.parts)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(len(list(g)) for _, g in itertools.groupby(self.parts))

    @property
    def mu(self) -> Fraction:
        """1 / (r_1! r_2! ... r_k!) for multiplicities r_i."""
        return Fraction(1, math.prod(math.factorial(r) for r in self.multiplicities))

    @property
    def has_repeats(self) -> bool:
        return len(set(self.parts)) < len(self.parts)

    @property
    def columns(self) -> np.ndarray:
        """Zero-based column indices, in order."""
        return np.asarray(self.parts, dtype=np.intp) - 1

    def __str__(self):
        return "{" + ",".join(map(str, self.parts)) + "}"


def _square(M) -> np.ndarray:
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"permanent needs square matrices, got shape {A.shape}")
    if A.shape[-1] < 1:
        raise ValueError("permanent needs n >= 1")
    return A


@numba.njit(cache=True)
def _ryser_batch(A):
    count, n, _ = A.shape
    out = np.empty(count, dtype=np.complex128)
    rowsum = np.empty(n, dtype=np.complex128)
    for b in range(count):
        rowsum[:] = 0.0
        total = 0.0 + 0.0j
        members = np.zeros(n, dtype=np.bool_)
        size = 0
        for k in range(1, 1 << n):
            # Gray code: flip the column at the lowest set bit of k
            j = 0
            while not (k >> j) & 1:
                j += 1
            if members[j]:
                members[j] = False
                size -= 1
                for i in range(n):
                    rowsum[i] -= A[b, i, j]
            else:
                members[j] = True
                size += 1
                for i in range(n):
                    rowsum[i] += A[b, i, j]
            prod = 1.0 + 0.0j
            for i in range(n):
                prod *= rowsum[i]
            if size & 1:
                total -= prod
            else:
                total += prod
        out[b] = -total if n & 1 else total
    return out


def permanent(M):
    """Permanent of a square matrix (or of each matrix in a stack).

    Returns a complex scalar for a single matrix and an array for a stack.
    """
    A = _square(M)
    n = A.shape[-1]
    if n > MAX_RYSER:
        raise CapacityError(f"permanent kernel is limited to n <= {MAX_RYSER}, got {n}")
    flat = np.ascontiguousarray(A.reshape(-1, n, n))
    out = _ryser_batch(flat)
    if A.ndim == 2:
        return complex(out[0])
    return out.reshape(A.shape[:-2])


def permanent_naive(M):
    """Permanent by direct summation over all n! permutations (oracle)."""
    A = _square(M)
    n = A.shape[-1]
    if n > MAX_NAIVE:
        raise CapacityError(f"naive permanent is limited to n <= {MAX_NAIVE}, got {n}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    rows = np.arange(n)
    terms = A[..., rows, perms].prod(axis=-1)
    out = terms.sum(axis=-1)
    return complex(out) if A.ndim == 2 else out


def minor(A, S: MultisetOutcome) -> np.ndarray:
    """The n x n matrix whose j-th column is column ``S.parts[j]`` of ``A``."""
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim < 2:
        raise ValueError("A must be at least 2-d")
    if S.m != arr.shape[-1]:
        raise ValueError(f"outcome is over {S.m} columns but A has {arr.shape[-1]}")
    if S.n != arr.shape[-2]:
        raise ValueError(f"outcome has size {S.n} but A has {arr.shape[-2]} rows")
    return arr[..., S.columns]


def gram_permanent(A) -> float:
    """perm(A A*), the BosonSampling normalization of an n x m matrix.

    The value is real and nonnegative; the tiny imaginary residue of the
    complex kernel is dropped.
    """
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError("gram_permanent expects a single n x m matrix")
    G = arr @ arr.conj().T
    return permanent(G).real


@numba.njit(cache=True)
def _pair_batch(W, n):
    count = W.shape[0]
    size = 1 << n
    out = np.empty(count, dtype=np.complex128)
    pop = np.zeros(size, dtype=np.int64)
    for s in range(1, size):
        pop[s] = pop[s >> 1] + (s & 1)
    dp = np.zeros(size * size, dtype=np.complex128)
    for b in range(count):
        dp[:] = 0.0
        dp[0] = 1.0
        # index = ms + mt * size only ever grows along a transition
        for mt in range(size):
            for ms in range(size):
                if pop[ms] != pop[mt]:
                    continue
                r = pop[ms]
                if r == n:
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
                        dp[(ms | (1 << a)) + (mt | (1 << c)) * size] += cur * W[b, r, a, c]
        out[b] = dp[size * size - 1]
    return out


def pair_permanent(W):
    """Sum over permutation pairs of prod_i W[i, sigma(i), tau(i)].

    ``W`` has shape ``(..., n, n, n)``.  With ``W[i, a, b] = x[i, a] * conj(x[i, b])``
    this is |perm(x)|^2; other choices of ``W`` give conditional expectations
    of |perm|^2 under noise.  Evaluated by dynamic programming over pairs of
    used-column sets, O(C(2n, n) n^3) per tensor.
    """
    T = np.asarray(W, dtype=np.complex128)
    if T.ndim < 3 or not (T.shape[-1] == T.shape[-2] == T.shape[-3]):
        raise ValueError(f"pair_permanent needs shape (..., n, n, n), got {T.shape}")
    n = T.shape[-1]
    if n > MAX_PAIR:
        raise CapacityError(f"pair_permanent is limited to n <= {MAX_PAIR}, got {n}")
    if n == 0:
        return 1.0 + 0.0j if T.ndim == 3 else np.ones(T.shape[:-3], dtype=np.complex128)
    flat = np.ascontiguousarray(T.reshape(-1, n, n, n))
    out = _pair_batch(flat, n)
    if T.ndim == 3:
        return complex(out[0])
    return out.reshape(T.shape[:-3])
