"""Exact sampling of fractional Brownian motion trajectories on a uniform grid.

Two generators, both exact in law:

- ``CHOLESKY_EXACT``: dense Cholesky factor of the increment Gram matrix, the
  slow reference method, limited to grids below the Gram cap;
- ``CIRCULANT_EMBEDDING``: the stationary increment sequence is embedded into
  a circulant covariance diagonalized by the FFT (O(m log m)), then summed.

Randomness comes from counter-based Philox streams keyed by a 64-bit seed, so
a path is a pure function of (grid, kind, seed) and replications of an
experiment can be generated in any order or thread count.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .covariance import GRAM_CAP_DEFAULT, HurstGrid, fgn_autocov, increment_gram

#: Embedding eigenvalues in [EIGENVALUE_TOL, 0) are clamped to zero; anything
#: below triggers the Cholesky fallback.
EIGENVALUE_TOL = -1e-9


class GeneratorKind(Enum):
    CHOLESKY_EXACT = "cholesky"
    CIRCULANT_EMBEDDING = "circulant"


@dataclass
class FbmPath:
    """One sampled trajectory: values B_{j/n} for j = 0..floor(nT)."""

    grid: HurstGrid
    values: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or len(self.values) != self.grid.num_increments + 1:
            raise ValueError("path length must equal floor(nT) + 1")
        if self.values[0] != 0.0:
            raise ValueError("path must start at exactly 0")

    def increments(self) -> np.ndarray:
        """B_{(j+1)/n} - B_{j/n} for j = 0..floor(nT)-1."""
        return np.diff(self.values)

    def midpoints(self) -> np.ndarray:
        """(B_{j/n} + B_{(j+1)/n}) / 2 for j = 0..floor(nT)-1."""
        return 0.5 * (self.values[:-1] + self.values[1:])


def replication_seed(master_seed: int, stream_index: int) -> int:
    """64-bit sub-seed for one replication stream of a seeded experiment."""
    return int(replication_seeds(master_seed, stream_index, stream_index + 1)[0])


def replication_seeds(master_seed: int, start: int, stop: int) -> np.ndarray:
    """Sub-seeds for streams start..stop-1, sliced from the master expansion.

    The expansion is prefix-stable, so a stream's seed does not depend on how
    many other streams an experiment uses.
    """
    if not 0 <= start <= stop:
        raise ValueError(f"need 0 <= start <= stop, got {start}..{stop}")
    if stop == 0:
        return np.empty(0, dtype=np.uint64)
    words = _seed_words(int(master_seed), 1 << max(6, (stop - 1).bit_length()))
    return words[start:stop].copy()


def generate(grid: HurstGrid, kind: GeneratorKind, seed: int) -> FbmPath:
    """Sample one trajectory; deterministic in (grid, kind, seed)."""
    values = generate_batch(grid, kind, [seed])[0]
    return FbmPath(grid=grid, values=values, seed=int(seed))


def generate_batch(grid: HurstGrid, kind: GeneratorKind, seeds) -> np.ndarray:
    """Sample one trajectory per seed; row i equals generate(grid, kind, seeds[i]).

    Each row consumes its own Philox stream, so the batch decomposition has no
    effect on the values.  Returns an array of shape (len(seeds), floor(nT)+1).
    """
    seeds = [int(s) for s in np.atleast_1d(seeds)]
    kind = _resolve_kind(grid, kind)
    if kind is GeneratorKind.CIRCULANT_EMBEDDING:
        fgn = _circulant_fgn(grid, seeds)
    else:
        fgn = _cholesky_fgn(grid, seeds)
    paths = np.empty((len(seeds), grid.num_increments + 1))
    paths[:, 0] = 0.0
    np.cumsum(fgn, axis=1, out=paths[:, 1:])
    return paths


def circulant_eigenvalues(grid: HurstGrid) -> np.ndarray:
    """Eigenvalues of the circulant embedding of the increment autocovariance.

    Nonnegative in exact arithmetic for fractional Gaussian noise; the
    generator clamps values within EIGENVALUE_TOL of zero and falls back to
    Cholesky below that.
    """
    m = grid.num_increments
    gamma = fgn_autocov(grid, m)
    first_row = np.concatenate([gamma, gamma[m - 1 : 0 : -1]])
    return np.fft.fft(first_row).real


def write_path_csv(path: FbmPath, stream=None) -> None:
    """Dump a path as CSV with header ``t,B``, one row per grid point."""
    out = stream if stream is not None else sys.stdout
    out.write("t,B\n")
    for t, b in zip(path.grid.times(), path.values):
        out.write(f"{float(t)!r},{float(b)!r}\n")


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------


def _stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


@lru_cache(maxsize=32)
def _seed_words(master_seed: int, size: int) -> np.ndarray:
    words = np.random.SeedSequence(master_seed).generate_state(size, dtype=np.uint64)
    words.setflags(write=False)
    return words


def _resolve_kind(grid: HurstGrid, kind: GeneratorKind) -> GeneratorKind:
    if kind is GeneratorKind.CIRCULANT_EMBEDDING and _sqrt_eigenvalues(grid) is None:
        kind = GeneratorKind.CHOLESKY_EXACT
    if kind is GeneratorKind.CHOLESKY_EXACT and grid.num_increments > GRAM_CAP_DEFAULT:
        raise ValueError(
            f"Cholesky generation needs floor(nT) <= {GRAM_CAP_DEFAULT}, "
            f"got {grid.num_increments}"
        )
    return kind


@lru_cache(maxsize=8)
def _sqrt_eigenvalues(grid: HurstGrid):
    """sqrt of clamped embedding eigenvalues, or None when the embedding fails."""
    lam = circulant_eigenvalues(grid)
    if lam.min() < EIGENVALUE_TOL:
        return None
    sq = np.sqrt(np.clip(lam, 0.0, None))
    sq.setflags(write=False)
    return sq


@lru_cache(maxsize=8)
def _cholesky_factor(grid: HurstGrid) -> np.ndarray:
    factor = np.linalg.cholesky(increment_gram(grid))
    factor.setflags(write=False)
    return factor


def _cholesky_fgn(grid: HurstGrid, seeds: list[int]) -> np.ndarray:
    m = grid.num_increments
    factor = _cholesky_factor(grid)
    fgn = np.empty((len(seeds), m))
    for i, seed in enumerate(seeds):
        fgn[i] = factor @ _stream(seed).standard_normal(m)
    return fgn


def _circulant_fgn(grid: HurstGrid, seeds: list[int]) -> np.ndarray:
    m = grid.num_increments
    sq = _sqrt_eigenvalues(grid)
    two_m = 2 * m
    spectral = np.empty((len(seeds), two_m), dtype=np.complex128)
    half = sq[1:m] / np.sqrt(2.0)
    for i, seed in enumerate(seeds):
        z = _stream(seed).standard_normal(two_m)
        spectral[i, 0] = sq[0] * z[0]
        spectral[i, m] = sq[m] * z[1]
        interior = half * (z[2:two_m:2] + 1j * z[3:two_m:2])
        spectral[i, 1:m] = interior
        spectral[i, m + 1 :] = np.conj(interior[::-1])
    return np.fft.fft(spectral, axis=1).real[:, :m] / np.sqrt(two_m)
