"""Random smooth phase maps built from Gaussian radial basis functions.

A phase map is a weighted sum of isotropic Gaussian bumps organized in
subsets that share a width.  Subset and basis counts are Poisson, widths
are folded-Gaussian, amplitudes are Gaussian (drawn in degrees, summed
in radians) and centers are uniform over the image support.  A small
probability produces a flat (all-zero) phase map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

__all__ = ["PhaseModelParams", "PhaseField", "sample_phase", "apply_phase"]


@dataclass(frozen=True)
class PhaseModelParams:
    """Sampling distribution parameters for the phase model.

    ``center_min`` / ``center_max`` bound the bump centers per image
    dimension (row, col); ``None`` means the full image support,
    ``0 .. N-1`` in each dimension.
    """

    subset_mean: float = 12.0  # Poisson mean, number of width-sharing subsets
    bases_per_subset_mean: float = 15.0  # Poisson mean, bumps per subset
    width_mean: float = 64.0  # pixels^2, folded-Gaussian location
    width_sigma: float = 100.0  # pixels^2, folded-Gaussian scale
    amp_mean_deg: float = 0.0  # degrees
    amp_sigma_deg: float = 5.0  # degrees
    center_min: tuple[float, float] | None = None
    center_max: tuple[float, float] | None = None
    no_phase_prob: float = 0.01

    def __post_init__(self):
        if self.subset_mean <= 0 or self.bases_per_subset_mean <= 0:
            raise ValueError("Poisson means must be positive")
        if self.width_sigma < 0 or self.amp_sigma_deg < 0:
            raise ValueError("scale parameters must be nonnegative")
        if not 0.0 <= self.no_phase_prob <= 1.0:
            raise ValueError("no_phase_prob must be in [0, 1]")
        if (self.center_min is None) != (self.center_max is None):
            raise ValueError("center_min and center_max must be given together")
        if self.center_min is not None:
            if any(lo > hi for lo, hi in zip(self.center_min, self.center_max)):
                raise ValueError("center_min must be <= center_max componentwise")


@dataclass(frozen=True)
class PhaseField:
    """A realized phase map in radians."""

    angles: np.ndarray

    @property
    def as_complex(self) -> np.ndarray:
        """Unit-modulus complex representation ``exp(1j * angles)``."""
        return np.exp(1j * self.angles)


# Width floor in pixels^2; folded-Gaussian widths below this would create
# near-delta bumps that alias on the pixel grid.
_WIDTH_FLOOR = 1.0


@dataclass(frozen=True)
class _BasisDraw:
    """Parameters of one realized phase draw (before rendering)."""

    no_phase: bool
    widths: list = field(default_factory=list)  # one per subset, pixels^2
    amps_rad: list = field(default_factory=list)  # (B,) arrays, radians
    centers: list = field(default_factory=list)  # (B, 2) arrays, (row, col)


def _draw_basis_params(
    params: PhaseModelParams, height: int, width: int, rng: np.random.Generator
) -> _BasisDraw:
    """Draw all random parameters of one phase map.

    Draw order is fixed so a seed reproduces the field exactly:
    no-phase coin; subset count; then per subset: basis count, width,
    amplitude vector (degrees), center rows, center cols.
    """
    if rng.random() < params.no_phase_prob:
        return _BasisDraw(no_phase=True)
    lo = params.center_min if params.center_min is not None else (0.0, 0.0)
    hi = params.center_max if params.center_max is not None else (height - 1.0, width - 1.0)
    n_subsets = int(rng.poisson(params.subset_mean))
    widths, amps, centers = [], [], []
    for _ in range(n_subsets):
        n_bases = int(rng.poisson(params.bases_per_subset_mean))
        z = abs(rng.normal(params.width_mean, params.width_sigma))
        z = max(z, _WIDTH_FLOOR)
        a_rad = np.deg2rad(rng.normal(params.amp_mean_deg, params.amp_sigma_deg, n_bases))
        c_row = rng.uniform(lo[0], hi[0], n_bases)
        c_col = rng.uniform(lo[1], hi[1], n_bases)
        widths.append(z)
        amps.append(a_rad)
        centers.append(np.stack([c_row, c_col], axis=1))
    return _BasisDraw(no_phase=False, widths=widths, amps_rad=amps, centers=centers)


def _render(draw: _BasisDraw, height: int, width: int) -> np.ndarray:
    angles = np.zeros((height, width), dtype=np.float64)
    if draw.no_phase:
        return angles
    rows = np.arange(height, dtype=np.float64)
    cols = np.arange(width, dtype=np.float64)
    for z, amps, centers in zip(draw.widths, draw.amps_rad, draw.centers):
        if len(amps) == 0:
            continue
        # Isotropic Gaussians factor into row and column parts, so each
        # subset renders as one (H, B) x (B, W) matrix product.
        er = np.exp(-((rows[None, :] - centers[:, 0:1]) ** 2) / z)
        ec = np.exp(-((cols[None, :] - centers[:, 1:2]) ** 2) / z)
        angles += (amps[:, None] * er).T @ ec
    return angles


def sample_phase(
    params: PhaseModelParams, height: int, width: int, seed: int
) -> PhaseField:
    """Draw one random phase map at the given size, deterministic per seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return sample_phase_with_rng(params, height, width, rng)


def sample_phase_with_rng(
    params: PhaseModelParams, height: int, width: int, rng: np.random.Generator
) -> PhaseField:
    """Like :func:`sample_phase` but consuming an existing random stream."""
    if height < 1 or width < 1:
        raise DimensionError(f"phase map dims must be >= 1, got ({height}, {width})")
    draw = _draw_basis_params(params, height, width, rng)
    return PhaseField(angles=_render(draw, height, width))


def apply_phase(img: np.ndarray, phase: PhaseField) -> np.ndarray:
    """Modulate a real image by a phase field: ``img * exp(1j * angles)``."""
    img = np.asarray(img)
    if img.shape != phase.angles.shape:
        raise DimensionError(
            f"image shape {img.shape} does not match phase shape {phase.angles.shape}"
        )
    return img * phase.as_complex
