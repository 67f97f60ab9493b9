import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbsim import (
    DegenerateInputError,
    DimensionError,
    bilinear_resize,
    center_crop_kspace,
    center_pad_kspace,
    cubic_spline_resize,
    dft2_centered,
    fourier_upsample,
    grayscale_bt601,
    idft2_centered,
    magnitude,
    normalize_by_max_abs,
)

from oracles import direct_dft2_centered, direct_idft2_centered, measure_overshoot


def rng(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


class TestGrayscale:
    def test_gray_input_is_fixed_point(self):
        img = np.full((5, 7, 3), 0.5)
        assert np.allclose(grayscale_bt601(img), 0.5)

    def test_pure_red(self):
        img = np.zeros((2, 2, 3))
        img[:, :, 0] = 1.0
        assert np.allclose(grayscale_bt601(img), 0.299)

    def test_mixed_pixel(self):
        img = np.array([[[0.2, 0.4, 0.6]]])
        # 0.299 * 0.2 + 0.587 * 0.4 + 0.114 * 0.6
        assert np.allclose(grayscale_bt601(img), 0.363)

    def test_bad_shape_raises(self):
        with pytest.raises(DimensionError):
            grayscale_bt601(np.zeros((4, 4)))
        with pytest.raises(DimensionError):
            grayscale_bt601(np.zeros((4, 4, 4)))


class TestBilinearResize:
    def test_constant(self):
        out = bilinear_resize(np.full((5, 5), 3.25), 9, 4)
        assert out.shape == (9, 4)
        assert np.allclose(out, 3.25)

    def test_hand_computed_2x2_to_4x4(self):
        img = np.array([[0.0, 1.0], [0.0, 1.0]])
        out = bilinear_resize(img, 4, 4)
        # 1D align-corners-false resample of [0, 1]: src = (j+0.5)/2 - 0.5,
        # clamped to [0, 1] -> values [0, 0.25, 0.75, 1].
        expected_row = np.array([0.0, 0.25, 0.75, 1.0])
        assert np.allclose(out, np.tile(expected_row, (4, 1)))

    def test_identity_resize(self):
        img = rng(1).random((6, 8))
        assert np.allclose(bilinear_resize(img, 6, 8), img)

    def test_linear_ramp_downsample(self):
        r = np.arange(64.0)
        img = np.add.outer(2.0 * r, 3.0 * r)
        out = bilinear_resize(img, 16, 24)
        rows = (np.arange(16) + 0.5) * 64 / 16 - 0.5
        cols = (np.arange(24) + 0.5) * 64 / 24 - 0.5
        assert np.allclose(out, np.add.outer(2.0 * rows, 3.0 * cols), atol=1e-9)

    def test_values_stay_in_input_range(self):
        img = rng(2).random((10, 10))
        out = bilinear_resize(img, 23, 7)
        assert out.min() >= img.min() - 1e-12
        assert out.max() <= img.max() + 1e-12

    def test_degenerate_output_raises(self):
        with pytest.raises(DimensionError):
            bilinear_resize(np.ones((4, 4)), 1, 4)


class TestCubicSplineResize:
    def test_constant(self):
        out = cubic_spline_resize(np.full((6, 6), -1.5), 11, 5)
        assert np.allclose(out, -1.5, atol=1e-12)

    def test_linear_ramp_both_directions(self):
        r = np.arange(32.0)
        img = np.add.outer(0.5 * r, -1.25 * r) + 4.0
        for shape in [(12, 20), (50, 64), (32, 32)]:
            out = cubic_spline_resize(img, *shape)
            rows = (np.arange(shape[0]) + 0.5) * 32 / shape[0] - 0.5
            cols = (np.arange(shape[1]) + 0.5) * 32 / shape[1] - 0.5
            expected = np.add.outer(0.5 * rows, -1.25 * cols) + 4.0
            assert np.max(np.abs(out - expected)) < 1e-6

    def test_mean_preserved_on_smooth_image(self):
        # smooth random image: low-pass filtered noise
        g = rng(3).standard_normal((256, 256))
        ksp = np.fft.fftshift(np.fft.fft2(g))
        mask = np.hypot(*np.meshgrid(np.arange(256) - 128, np.arange(256) - 128)) < 20
        img = np.fft.ifft2(np.fft.ifftshift(ksp * mask)).real
        img -= img.min() - 0.1  # keep positive so relative mean makes sense
        out = cubic_spline_resize(img, 100, 100)
        # oracle: dense supersampled average of the same interpolant
        dense = cubic_spline_resize(img, 800, 800)
        assert abs(out.mean() - dense.mean()) / abs(dense.mean()) < 0.01
        assert abs(out.mean() - img.mean()) / abs(img.mean()) < 0.01

    def test_small_input_raises(self):
        with pytest.raises(DimensionError):
            cubic_spline_resize(np.ones((3, 8)), 5, 5)


class TestCenteredDft:
    def test_constant_image_dc_only(self):
        ksp = dft2_centered(np.ones((4, 4)))
        expected = np.zeros((4, 4), dtype=complex)
        expected[2, 2] = 16.0
        assert np.allclose(ksp, expected, atol=1e-12)

    def test_impulse_at_center_flat_spectrum(self):
        img = np.zeros((4, 4))
        img[2, 2] = 1.0
        ksp = dft2_centered(img)
        assert np.allclose(np.abs(ksp), 1.0, atol=1e-12)

    @pytest.mark.parametrize("shape", [(8, 8), (7, 5), (6, 9), (16, 16)])
    def test_matches_direct_oracle(self, shape):
        x = rng(4).standard_normal(shape) + 1j * rng(5).standard_normal(shape)
        assert np.allclose(dft2_centered(x), direct_dft2_centered(x), atol=1e-9)
        assert np.allclose(idft2_centered(x), direct_idft2_centered(x), atol=1e-12)

    def test_parseval(self):
        x = rng(6).standard_normal((8, 8))
        ksp = dft2_centered(x)
        lhs = np.sum(np.abs(x) ** 2)
        rhs = np.sum(np.abs(ksp) ** 2) / 64.0
        assert abs(lhs - rhs) / lhs < 1e-12

    def test_round_trip(self):
        x = rng(7).standard_normal((16, 16)) + 1j * rng(8).standard_normal((16, 16))
        back = idft2_centered(dft2_centered(x))
        assert np.max(np.abs(back - x)) < 1e-10 * np.max(np.abs(x))

    def test_zero_kspace(self):
        assert np.allclose(idft2_centered(np.zeros((5, 5), dtype=complex)), 0.0)

    def test_dc_only_kspace_gives_ones(self):
        ksp = np.zeros((6, 4), dtype=complex)
        ksp[3, 2] = 24.0
        assert np.allclose(idft2_centered(ksp), 1.0, atol=1e-12)

    def test_even_symmetric_image_has_real_spectrum(self):
        n = 8
        r = np.arange(n)
        dist = np.hypot(*np.meshgrid(r - n // 2, r - n // 2))
        img = np.exp(-0.3 * dist**2)
        ksp = dft2_centered(img)
        assert np.max(np.abs(ksp.imag)) < 1e-9 * np.max(np.abs(ksp))

    @settings(max_examples=25, deadline=None)
    @given(
        h=st.integers(min_value=2, max_value=12),
        w=st.integers(min_value=2, max_value=12),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_parseval_property(self, h, w, seed):
        x = np.random.Generator(np.random.PCG64(seed)).standard_normal((h, w))
        ksp = dft2_centered(x)
        lhs = np.sum(np.abs(x) ** 2)
        rhs = np.sum(np.abs(ksp) ** 2) / (h * w)
        assert abs(lhs - rhs) <= 1e-9 * max(lhs, 1.0)


class TestCenterCrop:
    def test_same_size_identity(self):
        x = rng(9).standard_normal((6, 6)) * (1 + 0j)
        assert np.array_equal(center_crop_kspace(x, 6, 6), x)

    def test_dc_preserved(self):
        x = rng(10).standard_normal((16, 12)) + 0j
        cropped = center_crop_kspace(x, 7, 5)
        assert cropped[7 // 2, 5 // 2] == x[8, 6]

    def test_too_large_raises(self):
        with pytest.raises(DimensionError):
            center_crop_kspace(np.ones((4, 4), dtype=complex), 8, 4)

    def test_crop_pad_idft_equals_truncated_series(self):
        x = rng(11).standard_normal((8, 8))
        ksp = direct_dft2_centered(x)
        kept = np.zeros_like(ksp)
        kept[2:6, 2:6] = ksp[2:6, 2:6]  # window [8//2 - 2, ...+4) = [2, 6)
        oracle = direct_idft2_centered(kept)
        ours = idft2_centered(center_pad_kspace(center_crop_kspace(dft2_centered(x), 4, 4), 8, 8))
        assert np.max(np.abs(ours - oracle)) < 1e-10

    def test_unit_step_1024_to_100_overshoot(self):
        img = np.zeros((1024, 1024))
        img[:, 512:] = 1.0
        lo = idft2_centered(center_crop_kspace(dft2_centered(img), 100, 100))
        profile = np.abs(lo[50])
        # edge lands at column 49.95 on the 100 grid
        overshoot = measure_overshoot(profile, edge_pos=49.95)
        assert 0.08 <= overshoot <= 0.10


class TestMagnitudeNormalize:
    def test_magnitude_of_nonnegative_real(self):
        x = rng(12).random((4, 4))
        assert np.allclose(magnitude(x), x)

    def test_three_four_five(self):
        assert magnitude(np.array([[3 + 4j]]))[0, 0] == pytest.approx(5.0)

    def test_global_phase_invariance(self):
        x = rng(13).standard_normal((5, 5)) + 1j * rng(14).standard_normal((5, 5))
        assert np.allclose(magnitude(np.exp(1j * 0.7) * x), magnitude(x))

    def test_normalize_scales_companions(self):
        x = np.array([[4.0, 2.0], [1.0, 0.5]]) + 0j
        m = np.array([[2.0, 2.0], [2.0, 2.0]])
        xn, (mn,) = normalize_by_max_abs(x, [m])
        assert np.abs(xn).max() == pytest.approx(1.0)
        assert np.allclose(mn, 0.5)

    def test_normalize_idempotent(self):
        x = rng(15).standard_normal((4, 4)) + 1j * rng(16).standard_normal((4, 4))
        xn, _ = normalize_by_max_abs(x)
        xnn, _ = normalize_by_max_abs(xn)
        assert np.allclose(xn, xnn)

    def test_argmax_location_unchanged(self):
        x = rng(17).standard_normal((6, 6)) + 0j
        xn, _ = normalize_by_max_abs(x)
        assert np.argmax(np.abs(x)) == np.argmax(np.abs(xn))

    def test_all_zero_raises(self):
        with pytest.raises(DegenerateInputError):
            normalize_by_max_abs(np.zeros((3, 3), dtype=complex))


class TestFourierUpsample:
    def test_samples_preserved(self):
        x = rng(18).standard_normal((8, 6))
        up = fourier_upsample(x, 4)
        assert up.shape == (32, 24)
        assert np.allclose(up[::4, ::4], x, atol=1e-10)

    def test_real_in_real_out(self):
        assert fourier_upsample(np.ones((4, 4)), 2).dtype.kind == "f"
