"""Path generators: reproducibility, law correctness, embedding health."""

import io
import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from fbmquad import (
    EIGENVALUE_TOL,
    FbmPath,
    GeneratorKind,
    HurstGrid,
    circulant_eigenvalues,
    fgn_autocov,
    generate,
    generate_batch,
    increment_gram,
    replication_seed,
    replication_seeds,
    write_path_csv,
)

CIRC = GeneratorKind.CIRCULANT_EMBEDDING
CHOL = GeneratorKind.CHOLESKY_EXACT

# ---------------------------------------------------------------------------
# path container
# ---------------------------------------------------------------------------


class TestFbmPath:
    def test_increment_arithmetic(self):
        grid = HurstGrid(0.5, 4)
        path = FbmPath(grid, np.array([0.0, 1.0, 3.0, 2.0, 5.0]), seed=0)
        assert np.array_equal(path.increments(), [1.0, 2.0, -1.0, 3.0])

    def test_zero_path(self):
        grid = HurstGrid(0.5, 4)
        path = FbmPath(grid, np.zeros(5), seed=0)
        assert np.all(path.increments() == 0.0)
        assert np.all(path.midpoints() == 0.0)

    def test_increments_telescope(self):
        grid = HurstGrid(0.1, 32)
        path = generate(grid, CIRC, 7)
        assert path.increments().sum() == pytest.approx(path.values[-1], rel=1e-12)

    def test_midpoint_values(self):
        grid = HurstGrid(0.5, 4)
        path = FbmPath(grid, np.array([0.0, 2.0, 1.0, 1.0, 4.0]), seed=0)
        assert path.midpoints()[0] == 1.0
        assert np.array_equal(path.midpoints(), path.values[:-1] + path.increments() / 2.0)

    def test_validation(self):
        grid = HurstGrid(0.5, 4)
        with pytest.raises(ValueError):
            FbmPath(grid, np.ones(5), seed=0)  # does not start at 0
        with pytest.raises(ValueError):
            FbmPath(grid, np.zeros(4), seed=0)  # wrong length


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------


class TestReproducibility:
    @pytest.mark.parametrize("kind", [CIRC, CHOL])
    def test_bit_identical_regeneration(self, kind):
        grid = HurstGrid(0.1, 128)
        a = generate(grid, kind, 12345)
        b = generate(grid, kind, 12345)
        assert np.array_equal(a.values, b.values)

    @pytest.mark.parametrize("kind", [CIRC, CHOL])
    def test_batch_rows_equal_single_calls(self, kind):
        grid = HurstGrid(0.2, 64)
        seeds = replication_seeds(11, 0, 17)
        batch = generate_batch(grid, kind, seeds)
        for i, s in enumerate(seeds):
            assert np.array_equal(batch[i], generate(grid, kind, int(s)).values)

    def test_batch_rows_independent_of_batch_split(self):
        grid = HurstGrid(0.1, 64)
        seeds = replication_seeds(11, 0, 20)
        whole = generate_batch(grid, CIRC, seeds)
        parts = np.vstack([generate_batch(grid, CIRC, seeds[:7]), generate_batch(grid, CIRC, seeds[7:])])
        assert np.array_equal(whole, parts)

    def test_different_seeds_differ(self):
        grid = HurstGrid(0.1, 64)
        assert not np.array_equal(generate(grid, CIRC, 1).values, generate(grid, CIRC, 2).values)

    def test_replication_seeds_distinct_and_prefix_stable(self):
        long = replication_seeds(99, 0, 100_000)
        assert len(np.unique(long)) == 100_000
        assert replication_seed(99, 41) == int(long[41])
        short = replication_seeds(99, 10, 20)
        assert np.array_equal(short, long[10:20])

    def test_streams_differ_across_masters(self):
        a = replication_seeds(1, 0, 1000)
        b = replication_seeds(2, 0, 1000)
        assert len(np.intersect1d(a, b)) == 0


# ---------------------------------------------------------------------------
# distributional correctness
# ---------------------------------------------------------------------------


class TestLaw:
    def test_brownian_increments_iid(self):
        # lag-1 correlation over 10^4 paths within 4 SE of zero
        grid = HurstGrid(0.5, 64)
        values = generate_batch(grid, CIRC, replication_seeds(3, 0, 10_000))
        db = np.diff(values, axis=1)
        x = db[:, :-1].ravel()
        y = db[:, 1:].ravel()
        r = np.corrcoef(x, y)[0, 1]
        assert abs(r) <= 4.0 / math.sqrt(len(x))
        assert db.var(ddof=1) == pytest.approx(1 / 64, rel=0.05)

    def test_rough_increment_variance(self):
        # Var(dB) = n^{-2H} at H = 0.1, n = 256, within 4 SE over 10^4 paths
        grid = HurstGrid(0.1, 256)
        values = generate_batch(grid, CIRC, replication_seeds(4, 0, 10_000))
        db = np.diff(values, axis=1)
        sq = db**2
        est = sq.mean()
        # increments across one path are correlated; use per-path means for the SE
        per_path = sq.mean(axis=1)
        se = per_path.std(ddof=1) / math.sqrt(len(per_path))
        assert abs(est - 256**-0.2) <= 4.0 * se

    @pytest.mark.parametrize("kind", [CIRC, CHOL])
    def test_increment_gram_matches(self, kind):
        # every empirical Gram entry within 5 SE at m = 16 and 2*10^4 paths
        grid = HurstGrid(0.1, 16)
        reps = 20_000
        values = generate_batch(grid, kind, replication_seeds(5, 0, reps))
        db = np.diff(values, axis=1)
        emp = db.T @ db / reps
        exact = increment_gram(grid)
        se = np.sqrt((np.outer(np.diag(exact), np.diag(exact)) + exact**2) / reps)
        assert np.all(np.abs(emp - exact) <= 5.0 * se)

    def test_self_similar_level_variance(self):
        # Var(B_t) = t^{2H} within 4 SE at a few times
        grid = HurstGrid(0.25, 64)
        values = generate_batch(grid, CIRC, replication_seeds(6, 0, 20_000))
        for t_idx, t in ((16, 0.25), (32, 0.5), (64, 1.0)):
            level = values[:, t_idx]
            sq = level**2
            se = sq.std(ddof=1) / math.sqrt(len(sq))
            assert abs(sq.mean() - t ** (2 * 0.25)) <= 4.0 * se

    def test_generators_share_marginal_law(self):
        # two-sample KS on the first increment across fresh seed sets
        grid = HurstGrid(0.1, 64)
        a = generate_batch(grid, CHOL, replication_seeds(7, 0, 10_000))
        b = generate_batch(grid, CIRC, replication_seeds(8, 0, 10_000))
        result = ks_2samp(np.diff(a, axis=1)[:, 0], np.diff(b, axis=1)[:, 0])
        assert result.pvalue > 0.01


# ---------------------------------------------------------------------------
# embedding health and caps
# ---------------------------------------------------------------------------


class TestEmbedding:
    @pytest.mark.parametrize("H", [0.05, 0.1, 1 / 6, 0.25, 0.4, 0.5, 0.7])
    def test_eigenvalues_nonnegative_up_to_2_16(self, H):
        for n in (64, 4096, 2**16):
            lam = circulant_eigenvalues(HurstGrid(H, n))
            assert lam.min() >= EIGENVALUE_TOL
            assert lam.min() >= -1e-12  # clamping never actually needed here

    def test_circulant_covariance_identity(self):
        # FFT of the embedding row reproduces the autocovariance exactly
        grid = HurstGrid(0.3, 32)
        lam = circulant_eigenvalues(grid)
        m = grid.num_increments
        back = np.fft.ifft(lam).real
        gamma = fgn_autocov(grid, m)
        assert np.allclose(back[: m + 1], gamma, rtol=1e-10, atol=1e-15)

    def test_cholesky_cap(self):
        grid = HurstGrid(0.3, 8192)
        with pytest.raises(ValueError):
            generate(grid, CHOL, 1)

    def test_circulant_handles_large_grids(self):
        grid = HurstGrid(0.1, 8192)
        path = generate(grid, CIRC, 1)
        assert len(path.values) == 8193
        assert path.values[0] == 0.0


# ---------------------------------------------------------------------------
# CSV dump
# ---------------------------------------------------------------------------


class TestCsv:
    def test_round_trip(self):
        grid = HurstGrid(0.1, 16)
        path = generate(grid, CIRC, 42)
        buf = io.StringIO()
        write_path_csv(path, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "t,B"
        assert len(lines) == 18  # header + 17 grid points
        ts, bs = zip(*(map(float, line.split(",")) for line in lines[1:]))
        assert np.array_equal(np.array(bs), path.values)
        assert np.array_equal(np.array(ts), path.grid.times())
