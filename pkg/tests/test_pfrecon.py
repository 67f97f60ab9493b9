import numpy as np
import pytest

from gibbsim import (
    PfReconConfig,
    PhaseModelParams,
    UnsupportedFractionError,
    apply_phase,
    center_crop_kspace,
    dft2_centered,
    estimate_lowres_phase,
    homodyne_weights,
    idft2_centered,
    kept_lines,
    magnitude,
    margosian_recon,
    pf_mask,
    sample_phase,
    zero_filled_recon,
)

FRACTIONS = [7 / 8, 6 / 8, 5 / 8]


def gaussian_blob(n=256, sigma=30.0):
    r = np.arange(n) - n / 2
    d2 = np.add.outer(r**2, r**2)
    return np.exp(-d2 / (2 * sigma**2))


def row_edge(n=256):
    """Step varying along the rows (the partial Fourier axis)."""
    img = np.zeros((n, n))
    img[n // 2 :, :] = 1.0
    return img


def lowres_kspace(img, lo=100):
    return center_crop_kspace(dft2_centered(img), lo, lo)


def rel_rmse(a, b):
    return float(np.sqrt(np.mean(np.abs(a - b) ** 2)) / np.sqrt(np.mean(np.abs(b) ** 2)))


class TestKeptLines:
    def test_round_half_up(self):
        assert kept_lines(100, 5 / 8) == 63
        assert kept_lines(100, 6 / 8) == 75
        assert kept_lines(100, 7 / 8) == 88
        assert kept_lines(100, 1.0) == 100
        assert kept_lines(8, 5 / 8) == 5

    def test_unsupported_fraction(self):
        with pytest.raises(UnsupportedFractionError):
            kept_lines(100, 0.5)
        with pytest.raises(UnsupportedFractionError):
            PfReconConfig(0.4)


class TestHomodyneWeights:
    @pytest.mark.parametrize("height", [100, 64, 101, 99])
    @pytest.mark.parametrize("fraction", FRACTIONS)
    def test_mirror_pairs_sum_to_two(self, height, fraction):
        w = homodyne_weights(height, fraction)
        c = height // 2
        k = kept_lines(height, fraction)
        first = height - k
        for r in range(first, height):
            m = (2 * c - r) % height
            assert w[r] + w[m] == pytest.approx(2.0), (r, m)

    @pytest.mark.parametrize("fraction", FRACTIONS + [1.0])
    def test_dc_conserved(self, fraction):
        w = homodyne_weights(100, fraction)
        assert w[50] == 1.0

    def test_fraction_one_is_flat(self):
        assert np.array_equal(homodyne_weights(64, 1.0), np.ones(64))

    def test_unmeasured_rows_zero(self):
        w = homodyne_weights(8, 5 / 8)
        assert np.array_equal(w[:3], np.zeros(3))


class TestPhaseEstimate:
    def test_real_nonneg_image_zero_phase(self):
        ksp = pf_mask(lowres_kspace(gaussian_blob()), 5 / 8)
        field = estimate_lowres_phase(ksp, PfReconConfig(5 / 8))
        lowres = np.abs(idft2_centered(lowres_kspace(gaussian_blob())))
        support = lowres > 1e-3 * lowres.max()
        assert np.max(np.abs(field.angles[support])) < 1e-6

    def test_constant_global_phase_recovered(self):
        phi = 0.9
        x = gaussian_blob() * np.exp(1j * phi)
        ksp = pf_mask(lowres_kspace(x), 6 / 8)
        field = estimate_lowres_phase(ksp, PfReconConfig(6 / 8))
        # support: safely above the estimator's low-magnitude guard
        lowres = np.abs(idft2_centered(lowres_kspace(x)))
        support = lowres > 0.05 * lowres.max()
        err = np.angle(np.exp(1j * (field.angles - phi)))
        assert np.max(np.abs(err[support])) < 1e-6

    def test_smooth_rbf_phase_rmse(self):
        blob = gaussian_blob()
        params = PhaseModelParams(width_mean=400.0, width_sigma=0.0, no_phase_prob=0.0)
        field_hi = sample_phase(params, 256, 256, seed=11)
        x = apply_phase(blob, field_hi)
        ksp_full = lowres_kspace(x)
        ksp = pf_mask(ksp_full, 6 / 8)
        est = estimate_lowres_phase(ksp, PfReconConfig(6 / 8))
        # reference: phase of the fully sampled low-resolution image
        true_phase = np.angle(idft2_centered(ksp_full))
        mag = np.abs(idft2_centered(ksp_full))
        support = mag > 1e-3 * mag.max()
        err = np.angle(np.exp(1j * (est.angles - true_phase)))
        rmse = np.sqrt(np.sum(mag[support] * err[support] ** 2) / np.sum(mag[support]))
        assert rmse < 0.05

    def test_empty_band_rejected(self):
        ksp = np.ones((8, 8), dtype=complex)
        cfg = PfReconConfig(0.51)  # kept_lines(8, .51) = 4 -> no band
        with pytest.raises(UnsupportedFractionError):
            estimate_lowres_phase(ksp, cfg)


class TestMargosian:
    def test_fraction_one_recovers_real_image(self):
        img = np.abs(idft2_centered(lowres_kspace(gaussian_blob())))
        ksp = dft2_centered(img)
        out = margosian_recon(ksp, PfReconConfig(1.0))
        assert np.max(np.abs(out - img)) < 1e-8

    def test_zero_kspace(self):
        out = margosian_recon(np.zeros((16, 16), dtype=complex), PfReconConfig(6 / 8))
        assert np.allclose(out, 0.0)

    @pytest.mark.parametrize("fraction", FRACTIONS)
    def test_exact_on_zero_phase_phantoms(self, fraction):
        # For phantoms whose truncated recon stays nonnegative (blob) the
        # magnitude recon is the natural reference; for the hard edge,
        # whose ringing genuinely goes negative, the fully sampled
        # reference is the same clamped-real reconstruction with full data.
        blob_full = lowres_kspace(gaussian_blob())
        out = margosian_recon(pf_mask(blob_full, fraction), PfReconConfig(fraction))
        assert rel_rmse(out, magnitude(idft2_centered(blob_full))) < 1e-3

        edge_full = lowres_kspace(row_edge())
        ref = margosian_recon(edge_full, PfReconConfig(1.0))
        out = margosian_recon(pf_mask(edge_full, fraction), PfReconConfig(fraction))
        assert rel_rmse(out, ref) < 1e-3

    def test_beats_zero_fill_on_edge_phantom(self):
        ksp_full = lowres_kspace(row_edge())
        ref = margosian_recon(ksp_full, PfReconConfig(1.0))
        masked = pf_mask(ksp_full, 5 / 8)
        rmse_margosian = rel_rmse(margosian_recon(masked, PfReconConfig(5 / 8)), ref)
        rmse_zerofill = rel_rmse(zero_filled_recon(masked), ref)
        assert rmse_margosian < 0.25 * rmse_zerofill

    def test_monotone_degradation_with_fraction(self):
        # Fixed phantom set: one blob under five random smooth phase draws,
        # strong enough that the PF-dependent error dominates.
        blob = gaussian_blob()
        params = PhaseModelParams(
            width_mean=150.0, width_sigma=50.0, amp_sigma_deg=20.0, no_phase_prob=0.0
        )
        errs = {f: [] for f in FRACTIONS}
        for seed in range(1, 6):
            x = apply_phase(blob, sample_phase(params, 256, 256, seed=seed))
            ksp_full = lowres_kspace(x)
            full = magnitude(idft2_centered(ksp_full))
            for f in FRACTIONS:
                errs[f].append(
                    rel_rmse(margosian_recon(pf_mask(ksp_full, f), PfReconConfig(f)), full)
                )
        means = [np.mean(errs[f]) for f in FRACTIONS]  # decreasing fractions
        assert means[0] <= means[1] + 1e-12
        assert means[1] <= means[2] + 1e-12
