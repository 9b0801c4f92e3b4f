import numpy as np
import pytest

import expsys as es
from expsys.tiling import NONUNIFORM, NOT_TILING, TILES, UNIFORM

# dense 2000^2 grid oracle for the z = e^{x2} overlap at k = (1, 0);
# analytic value is 1/e = 0.3678794
EXP_OVERLAP_ORACLE = 0.36788

BOX = ([0.0, 0.0], [1.0, 1.0])
EYE = [[1.0, 0.0], [0.0, 1.0]]


def sin_unipotent():
    return es.Unipotent(shifts=(lambda p: np.sin(2 * np.pi * p[:, 1]),), dim=2)


def exp_triangular():
    return es.Triangular2D(
        z=lambda t: np.exp(t), f=lambda t: np.zeros_like(t), K=0.0,
        z_prime=lambda t: np.exp(t), f_prime=lambda t: np.zeros_like(t),
    )


class TestFracHistogram:
    def test_identity_uniform(self):
        rep = es.frac_histogram_test(es.Identity(2), BOX, EYE, n=100_000, bins=16, seed=0)
        assert rep.verdict == UNIFORM

    def test_unipotent_uniform(self):
        rep = es.frac_histogram_test(sin_unipotent(), BOX, EYE, n=200_000, bins=16, seed=1)
        assert rep.verdict == UNIFORM

    def test_exponential_family_nonuniform(self):
        rep = es.frac_histogram_test(exp_triangular(), BOX, EYE, n=100_000, bins=16, seed=2)
        assert rep.verdict == NONUNIFORM
        assert rep.empty_bins >= 0

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            es.frac_histogram_test(es.Identity(2), BOX, EYE, n=100, bins=16)

    def test_csv_dump(self, tmp_path):
        rep = es.frac_histogram_test(es.Identity(2), BOX, EYE, n=20_000, bins=4, seed=0)
        out = tmp_path / "hist.csv"
        rep.write_csv(out, EYE)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "center_1,center_2,count"
        assert len(lines) == 1 + 16


class TestOverlapVolume:
    def test_identity_disjoint_translate(self):
        rep = es.overlap_volume(es.Identity(2), BOX, [1.0, 0.0], n=100_000, seed=0)
        assert rep.volume_est <= 3 * max(rep.std_err, 1e-12)

    def test_identity_self_overlap(self):
        rep = es.overlap_volume(es.Identity(2), BOX, [0.0, 0.0], n=100_000, seed=1)
        assert abs(rep.volume_est - 1.0) <= 3 * max(rep.std_err, 1e-5)

    def test_exponential_overlap_positive_matches_grid_oracle(self):
        rep = es.overlap_volume(exp_triangular(), BOX, [1.0, 0.0], n=200_000, seed=2)
        assert rep.valid
        assert rep.volume_est > 5 * rep.std_err
        assert abs(rep.volume_est - EXP_OVERLAP_ORACLE) <= 4 * rep.std_err

    def test_symmetry_in_k(self):
        for k in ([1.0, 0.0], [0.0, 1.0], [1.0, 1.0]):
            plus = es.overlap_volume(exp_triangular(), BOX, k, n=100_000, seed=3)
            minus = es.overlap_volume(
                exp_triangular(), BOX, [-v for v in k], n=100_000, seed=4
            )
            sigma = np.hypot(max(plus.std_err, 1e-6), max(minus.std_err, 1e-6))
            assert abs(plus.volume_est - minus.volume_est) <= 3 * sigma

    def test_grid_membership_fallback(self):
        # custom map without an inverse goes through the occupancy grid
        phi = es.CustomPhase(lambda p: p + 0.0, 2, 2)
        rep = es.overlap_volume(phi, BOX, [2.0, 0.0], n=50_000, seed=5)
        assert rep.volume_est <= 0.01


class TestTilingVerdict:
    def test_identity_tiles(self):
        rep = es.tiling_verdict(es.Identity(2), BOX, EYE, n=100_000, bins=16, seed=0)
        assert rep.tiling == TILES
        assert rep.packing == "PASS"
        assert rep.volume_match

    def test_unipotent_tiles(self):
        rep = es.tiling_verdict(sin_unipotent(), BOX, EYE, n=100_000, bins=16, seed=1)
        assert rep.tiling == TILES

    def test_exponential_family_not_tiling(self):
        rep = es.tiling_verdict(exp_triangular(), BOX, EYE, n=100_000, bins=16, seed=2)
        assert rep.tiling == NOT_TILING
        assert rep.packing == "FAIL"

    def test_dual_lattice_gram_consistency(self):
        # a TILES verdict must cohere with orthogonality of E(dual lattice)
        for phi in (es.Identity(2), sin_unipotent()):
            verdict = es.tiling_verdict(phi, BOX, EYE, n=50_000, bins=8, seed=3)
            assert verdict.tiling == TILES
            dual = es.dual_lattice(EYE)
            spectrum = es.lattice(dual, 2)
            rep = es.gram(
                es.LebesgueBox(*BOX), phi, spectrum, es.gauss(48)
            )
            assert rep.max_offdiag <= 1e-10
