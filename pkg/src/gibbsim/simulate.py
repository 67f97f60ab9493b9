"""The full acquisition simulation: photograph in, training pair out.

One sample is produced by a fixed sequence of steps (grayscale, resize,
random flip/transpose, random phase, random ellipsoid crop, forward
transform, k-space crop, noise, partial Fourier mask, inverse
transform, shared normalization, spline-resized clean target).  All
randomness comes from a single per-sample stream consumed in a fixed,
documented order, so a sample is a pure function of
``(photo, config, seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    bilinear_resize,
    center_crop_kspace,
    cubic_spline_resize,
    dft2_centered,
    grayscale_bt601,
    idft2_centered,
)
from .errors import DegenerateInputError, DimensionError
from .pfrecon import PfReconConfig, kept_lines, margosian_recon
from .phase import (
    PhaseField,
    PhaseModelParams,
    _draw_basis_params,
    _render,
    apply_phase,
)

__all__ = [
    "SimConfig",
    "SampleMeta",
    "SamplePair",
    "random_flip_transpose",
    "random_ellipsoid_crop",
    "add_kspace_noise",
    "pf_mask",
    "simulate_pair",
]


@dataclass(frozen=True)
class SimConfig:
    """Knobs of the simulation pipeline (defaults follow the standard run)."""

    hi_res: int = 256
    lo_res: int = 100
    pf_fraction: float = 1.0
    noise_ratio_range: tuple[float, float] = (1.0, 32.0)
    phase_params: PhaseModelParams = field(default_factory=PhaseModelParams)
    ellipsoid_skip_prob: float = 0.1
    flip_prob: float = 0.5
    transpose_prob: float = 0.5
    magnitude_mode: bool = False
    concat_pf_recon: bool = False
    pf_transition_width: int = 4

    def __post_init__(self):
        if self.lo_res > self.hi_res:
            raise ValueError(f"lo_res {self.lo_res} exceeds hi_res {self.hi_res}")
        if self.lo_res < 4:
            raise ValueError("lo_res must be at least 4")
        low, high = self.noise_ratio_range
        if not 0 < low <= high:
            raise ValueError(f"noise_ratio_range must satisfy 0 < low <= high, got {self.noise_ratio_range}")
        if not 0.5 < self.pf_fraction <= 1.0:
            raise ValueError(f"pf_fraction must be in (1/2, 1], got {self.pf_fraction}")
        for name in ("ellipsoid_skip_prob", "flip_prob", "transpose_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")
        if self.concat_pf_recon and self.magnitude_mode:
            raise ValueError("concat_pf_recon is only available in complex mode")


@dataclass(frozen=True)
class SampleMeta:
    """Provenance of one simulated sample."""

    seed: int
    pf_fraction: float
    noise_ratio: float
    flipped: bool
    transposed: bool
    no_phase: bool
    no_ellipsoid: bool


@dataclass(frozen=True)
class SamplePair:
    """One (input, target) training/evaluation record.

    ``input`` is complex (or real in magnitude mode) at ``lo_res``
    square, normalized so its maximum modulus is 1; ``target`` is the
    clean, real, nonnegative reference at the same size; ``companion``
    optionally carries the classical partial Fourier reconstruction of
    the same data.
    """

    input: np.ndarray
    target: np.ndarray
    meta: SampleMeta
    companion: np.ndarray | None = None


def _flip_transpose(img, rng, flip_prob, transpose_prob):
    do_flip = bool(rng.random() < flip_prob)
    do_transpose = bool(rng.random() < transpose_prob)
    if do_flip:
        img = img[:, ::-1].copy()
    if do_transpose:
        if img.shape[0] != img.shape[1]:
            raise DimensionError(f"transpose drawn for non-square image {img.shape}")
        img = img.T.copy()
    return img, do_flip, do_transpose


def random_flip_transpose(img: np.ndarray, seed: int, flip_prob: float = 0.5,
                          transpose_prob: float = 0.5) -> tuple[np.ndarray, bool, bool]:
    """Horizontal flip then transpose, each with an independent coin.

    Returns ``(image, flipped, transposed)``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    return _flip_transpose(np.asarray(img), rng, flip_prob, transpose_prob)


def _ellipsoid_crop(img, rng, skip_prob):
    if rng.random() < skip_prob:
        return img, True
    h, w = img.shape
    # Center within the central half; semi-axes 0.25..0.5 of the short side.
    c_row = rng.uniform(h / 4.0, 3.0 * h / 4.0)
    c_col = rng.uniform(w / 4.0, 3.0 * w / 4.0)
    n = min(h, w)
    axis_a = rng.uniform(0.25 * n, 0.5 * n)
    axis_b = rng.uniform(0.25 * n, 0.5 * n)
    theta = rng.uniform(0.0, np.pi)
    rows = np.arange(h)[:, None] - c_row
    cols = np.arange(w)[None, :] - c_col
    u = cols * np.cos(theta) + rows * np.sin(theta)
    v = -cols * np.sin(theta) + rows * np.cos(theta)
    inside = (u / axis_a) ** 2 + (v / axis_b) ** 2 <= 1.0
    return img * inside, False


def random_ellipsoid_crop(img: np.ndarray, seed: int, skip_prob: float = 0.1
                          ) -> tuple[np.ndarray, bool]:
    """Zero everything outside a random ellipse (or skip entirely).

    Returns ``(image, skipped)``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    return _ellipsoid_crop(np.asarray(img), rng, skip_prob)


def _kspace_noise(ksp, ratio_range, rng):
    low, high = ratio_range
    if not 0 < low <= high:
        raise ValueError(f"noise ratio range must satisfy 0 < low <= high, got {ratio_range}")
    scale = float(np.mean(np.abs(ksp)))
    if not scale > 0:
        raise DegenerateInputError("cannot scale noise to an all-zero k-space")
    exponent = rng.uniform(np.log2(low), np.log2(high))
    ratio = float(2.0 ** exponent)
    # ratio * mean|k| is the std of the complex noise magnitude, so each
    # real component gets sigma / sqrt(2).
    sigma = ratio * scale / np.sqrt(2.0)
    comps = rng.standard_normal(ksp.shape + (2,))
    noise = sigma * (comps[..., 0] + 1j * comps[..., 1])
    return ksp + noise, ratio


def add_kspace_noise(ksp: np.ndarray, ratio_range: tuple[float, float], seed: int
                     ) -> tuple[np.ndarray, float]:
    """Add complex Gaussian noise at a log2-uniform multiple of ``mean(|ksp|)``.

    Returns ``(noisy k-space, realized ratio)``; the complex noise
    magnitude has standard deviation ``ratio * mean(abs(ksp))``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    return _kspace_noise(np.asarray(ksp), ratio_range, rng)


def pf_mask(ksp: np.ndarray, pf_fraction: float) -> np.ndarray:
    """Zero the first ``H - round(f * H)`` k-space rows (partial Fourier).

    The kept rows are the high-index side and always include the center
    row; fractions at or below 1/2 would lose DC coverage and raise.
    """
    ksp = np.asarray(ksp)
    k = kept_lines(ksp.shape[0], pf_fraction)
    out = ksp.copy()
    out[: ksp.shape[0] - k, :] = 0
    return out


def _to_grayscale(photo: np.ndarray) -> np.ndarray:
    photo = np.asarray(photo)
    if photo.ndim == 3:
        return grayscale_bt601(photo)
    if photo.ndim == 2:
        return photo.astype(np.float64)
    raise DimensionError(f"photo must be (H, W) or (H, W, 3), got shape {photo.shape}")


def simulate_pair(photo: np.ndarray, cfg: SimConfig, seed: int) -> SamplePair:
    """Run the full pipeline on one photograph.

    Random draws consume a single seeded stream in a fixed order: flip
    coin, transpose coin, no-phase coin, phase draws, ellipsoid coin,
    ellipsoid geometry, noise exponent, noise samples (row-major).
    The clean target never depends on the noise or mask draws.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    gray = bilinear_resize(_to_grayscale(photo), cfg.hi_res, cfg.hi_res)
    gray, flipped, transposed = _flip_transpose(gray, rng, cfg.flip_prob, cfg.transpose_prob)

    basis = _draw_basis_params(cfg.phase_params, cfg.hi_res, cfg.hi_res, rng)
    phase = PhaseField(angles=_render(basis, cfg.hi_res, cfg.hi_res))
    clean = apply_phase(gray, phase)
    clean, no_ellipsoid = _ellipsoid_crop(clean, rng, cfg.ellipsoid_skip_prob)

    ksp = center_crop_kspace(dft2_centered(clean), cfg.lo_res, cfg.lo_res)
    ksp, ratio = _kspace_noise(ksp, cfg.noise_ratio_range, rng)
    ksp = pf_mask(ksp, cfg.pf_fraction)
    corrupted = idft2_centered(ksp)

    meta = SampleMeta(
        seed=seed,
        pf_fraction=cfg.pf_fraction,
        noise_ratio=ratio,
        flipped=flipped,
        transposed=transposed,
        no_phase=basis.no_phase,
        no_ellipsoid=no_ellipsoid,
    )

    if cfg.magnitude_mode:
        mag = np.abs(corrupted)
        scale = float(mag.max())
        if not scale > 0:
            raise DegenerateInputError("corrupted image is identically zero")
        target = cubic_spline_resize(np.abs(clean) / scale, cfg.lo_res, cfg.lo_res)
        return SamplePair(input=mag / scale, target=np.maximum(target, 0.0), meta=meta)

    scale = float(np.abs(corrupted).max())
    if not scale > 0:
        raise DegenerateInputError("corrupted image is identically zero")
    x = corrupted / scale
    target = cubic_spline_resize(np.abs(clean) / scale, cfg.lo_res, cfg.lo_res)
    companion = None
    if cfg.concat_pf_recon:
        pf_cfg = PfReconConfig(cfg.pf_fraction, cfg.pf_transition_width)
        companion = margosian_recon(ksp / scale, pf_cfg)
    return SamplePair(
        input=x, target=np.maximum(target, 0.0), meta=meta, companion=companion
    )
