"""Gaussian matrix ensembles and the epsilon-noise model.

Complex entries have independent real and imaginary parts, each N(0, 1/2),
so that E|z|^2 = 1 and E|z|^4 = 2.  Real entries are N(0, 1).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .rng import GENERATOR_ID, chunk_sizes, map_chunks, substream

Kind = Literal["complex", "real"]
KINDS = ("complex", "real")

# stream ids under a master seed
MATRIX_STREAM = 0
NOISE_STREAM = 1


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"kind must be 'complex' or 'real', got {kind!r}")
    return kind


@dataclass(frozen=True)
class NoiseParameter:
    """Noise level ``epsilon`` together with the correlation ``rho = sqrt(1 - epsilon)``."""

    epsilon: float
    rho: float

    def __post_init__(self):
        eps, rho = float(self.epsilon), float(self.rho)
        if not (0.0 <= eps <= 1.0) or not (0.0 <= rho <= 1.0):
            raise ValueError(f"epsilon and rho must lie in [0, 1], got ({eps}, {rho})")
        if abs(rho * rho + eps - 1.0) > 1e-12:
            raise ValueError(f"rho^2 + epsilon must equal 1, got {rho * rho + eps}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_epsilon(cls, epsilon: float) -> "NoiseParameter":
        epsilon = float(epsilon)
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        return cls(epsilon, math.sqrt(1.0 - epsilon))

    @classmethod
    def from_rho(cls, rho: float) -> "NoiseParameter":
        rho = float(rho)
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {rho}")
        return cls(1.0 - rho * rho, rho)

    @classmethod
    def from_c(cls, c: float, n: int) -> "NoiseParameter":
        """Noise ``epsilon = c / n``."""
        if c <= 0 or n < 1:
            raise ValueError("need c > 0 and n >= 1")
        return cls.from_epsilon(c / n)

    @property
    def rho2(self) -> float:
        """rho squared, computed as ``1 - epsilon`` to avoid a rounding step."""
        return 1.0 - self.epsilon


def as_noise(noise) -> NoiseParameter:
    if isinstance(noise, NoiseParameter):
        return noise
    return NoiseParameter.from_epsilon(noise)


@dataclass(frozen=True, eq=False)
class GaussianMatrix:
    """An immutable dense matrix tagged with its ensemble kind.

    ``entries`` is always stored as ``complex128``; a real matrix simply has
    zero imaginary parts.  The object converts to an ndarray via ``np.asarray``.
    """

    entries: np.ndarray
    kind: Kind = "complex"
    provenance: tuple | None = field(default=None)

    def __post_init__(self):
        check_kind(self.kind)
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"entries must be a nonempty 2-d grid, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        if self.kind == "real" and np.any(arr.imag != 0):
            raise ValueError("real matrix has nonzero imaginary parts")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, GaussianMatrix):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def to_dict(self) -> dict:
        flat = self.entries.reshape(-1)
        out = {
            "rows": self.rows,
            "cols": self.cols,
            "kind": self.kind,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }
        if self.provenance is not None:
            out["provenance"] = {"seed": self.provenance[0], "generator": self.provenance[1]}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianMatrix":
        rows, cols = int(data["rows"]), int(data["cols"])
        pairs = np.asarray(data["entries"], dtype=float)
        if pairs.shape != (rows * cols, 2):
            raise ValueError(f"expected {rows * cols} [re, im] pairs, got shape {pairs.shape}")
        entries = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(rows, cols)
        prov = data.get("provenance")
        provenance = (prov["seed"], prov["generator"]) if prov else None
        return cls(entries, data["kind"], provenance)

    @classmethod
    def from_json(cls, text: str) -> "GaussianMatrix":
        return cls.from_dict(json.loads(text))


def _draw(rng: np.random.Generator, shape: tuple, kind: str) -> np.ndarray:
    if kind == "real":
        return rng.standard_normal(shape).astype(np.complex128)
    parts = rng.standard_normal((2, *shape))
    return (parts[0] + 1j * parts[1]) * np.sqrt(0.5)


def sample_gaussian(rows: int, cols: int, kind: Kind = "complex", seed: int = 0) -> GaussianMatrix:
    """Draw one matrix with i.i.d. standard Gaussian entries."""
    check_kind(kind)
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be positive, got {rows}x{cols}")
    entries = _draw(substream(seed, MATRIX_STREAM), (rows, cols), kind)
    return GaussianMatrix(entries, kind, (seed, GENERATOR_ID))


def sample_batch(count: int, rows: int, cols: int, kind: Kind = "complex", seed: int = 0,
                 stream: int = MATRIX_STREAM) -> np.ndarray:
    """Draw ``count`` matrices as an array of shape ``(count, rows, cols)``.

    Samples are produced in fixed-size chunks, chunk ``k`` coming from
    substream ``(seed, stream, k)``, so the result is independent of threading.
    """
    check_kind(kind)
    if rows < 1 or cols < 1 or count < 0:
        raise ValueError("dimensions must be positive and count nonnegative")
    sizes = chunk_sizes(count)
    blocks = map_chunks(
        lambda k: _draw(substream(seed, stream, k), (sizes[k], rows, cols), kind),
        range(len(sizes)),
    )
    if not blocks:
        return np.zeros((0, rows, cols), dtype=np.complex128)
    return np.concatenate(blocks, axis=0)


def noisy_copy(X: np.ndarray, noise: NoiseParameter, U: np.ndarray) -> np.ndarray:
    """``rho * X + sqrt(epsilon) * U``; exact passthrough at epsilon = 0."""
    if noise.epsilon == 0.0:
        return np.array(X, dtype=np.complex128)
    return noise.rho * np.asarray(X) + math.sqrt(noise.epsilon) * U


def apply_noise(X, noise, seed: int = 0, kind: Kind | None = None) -> GaussianMatrix:
    """Return an epsilon-noise of ``X`` using fresh Gaussian noise of the same kind.

    ``kind`` defaults to ``X.kind`` for a :class:`GaussianMatrix` and to
    ``"complex"`` for a plain array.
    """
    noise = as_noise(noise)
    if kind is None:
        kind = X.kind if isinstance(X, GaussianMatrix) else "complex"
    check_kind(kind)
    arr = np.asarray(X, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError("X must be finite")
    U = _draw(substream(seed, NOISE_STREAM), arr.shape, kind)
    return GaussianMatrix(noisy_copy(arr, noise, U), kind, (seed, GENERATOR_ID))


def correlated_pair(rows: int, cols: int, kind: Kind = "complex", noise=0.0,
                    seed: int = 0) -> tuple[GaussianMatrix, GaussianMatrix]:
    """A rho-correlated pair ``(X, Y)`` with ``Y`` an epsilon-noise of ``X``."""
    X = sample_gaussian(rows, cols, kind, seed)
    return X, apply_noise(X, noise, seed)
