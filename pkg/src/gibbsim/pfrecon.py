"""Phase-corrected partial Fourier (homodyne / Margosian) reconstruction.

Partial Fourier masking keeps only the last ``K = round(f * H)`` rows of
k-space (the high-index side, which contains the center row).  The
classical one-pass reconstruction recovers the missing rows through
approximate conjugate symmetry: estimate a smooth phase map from the
symmetric band around DC, reweight the measured rows so every
mirror-pair of frequencies carries total weight 2, inverse transform,
demodulate the estimated phase and keep the real part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import idft2_centered, magnitude
from .errors import UnsupportedFractionError
from .phase import PhaseField

__all__ = [
    "PfReconConfig",
    "kept_lines",
    "homodyne_weights",
    "estimate_lowres_phase",
    "margosian_recon",
    "zero_filled_recon",
]


@dataclass(frozen=True)
class PfReconConfig:
    """Parameters of the homodyne reconstruction.

    ``transition_width`` is the number of k-space lines over which the
    homodyne step is ramped at the symmetric-band edges; it is clipped
    to the symmetric half-band so DC always keeps weight 1.
    ``phase_window`` apodizes the symmetric band for phase estimation
    ("hamming", "hann" or "boxcar").
    """

    pf_fraction: float
    transition_width: int = 4
    phase_window: str = "hamming"
    phase_support_floor: float = 0.01

    def __post_init__(self):
        if not 0.5 < self.pf_fraction <= 1.0:
            raise UnsupportedFractionError(
                f"pf_fraction must be in (1/2, 1], got {self.pf_fraction}"
            )
        if self.transition_width < 0:
            raise ValueError("transition_width must be nonnegative")
        if self.phase_window not in ("hamming", "hann", "boxcar"):
            raise ValueError(f"unknown phase_window {self.phase_window!r}")
        if not 0.0 <= self.phase_support_floor < 1.0:
            raise ValueError("phase_support_floor must be in [0, 1)")


def kept_lines(n: int, pf_fraction: float) -> int:
    """Number of k-space lines kept by a partial Fourier mask.

    Rounds half up: at ``n = 100``, fraction 5/8 keeps 63 lines.
    """
    if not 0.5 < pf_fraction <= 1.0:
        raise UnsupportedFractionError(
            f"pf_fraction must be in (1/2, 1], got {pf_fraction}"
        )
    return int(np.floor(pf_fraction * n + 0.5))


def homodyne_weights(height: int, pf_fraction: float, transition_width: int = 4) -> np.ndarray:
    """Per-row homodyne weights for a masked grid of the given height.

    Rows measured on both sides of DC get weight 1, rows measured only
    on one side get weight 2, unmeasured rows 0, with a linear ramp of
    ``transition_width`` lines across the symmetric-band edges.  Every
    mirror pair (mod the grid size) sums to 2 and DC keeps weight 1, so
    the real part of the reconstruction is exact for zero-phase images.
    """
    k = kept_lines(height, pf_fraction)
    if k == height:
        return np.ones(height)
    first_kept = height - k
    c = height // 2
    w = np.zeros(height)
    rows = np.arange(first_kept, height)
    mirrors = (2 * c - rows) % height
    w[rows] = np.where(mirrors >= first_kept, 1.0, 2.0)
    sym_lo = first_kept
    sym_hi = (2 * c - first_kept) % height
    t = min(transition_width, c - sym_lo)
    for i in range(t):
        frac = (i + 1) / (t + 1)
        w[sym_lo + i] = frac
        w[sym_hi - i] = 2.0 - frac
    return w


def _band_window(height: int, band: slice, kind: str) -> np.ndarray:
    """Apodization over the symmetric band, symmetric about the DC row."""
    c = height // 2
    idx = np.arange(band.start, band.stop)
    half = max(c - band.start, band.stop - 1 - c)
    if half == 0:
        return np.ones(idx.size)
    x = (idx - c) / half
    if kind == "hamming":
        return 0.54 + 0.46 * np.cos(np.pi * x)
    if kind == "hann":
        return 0.5 + 0.5 * np.cos(np.pi * x)
    return np.ones(idx.size)


def _symmetric_band(height: int, pf_fraction: float) -> slice:
    """Rows measured on both sides of DC (mirror taken mod the grid size).

    This is the contiguous block ``[H - K, 2c - (H - K)]`` inclusive;
    using the full symmetric coverage keeps the band conjugate-pair
    complete, so zero-phase data yields an exactly zero phase estimate.
    """
    k = kept_lines(height, pf_fraction)
    if 2 * k - height <= 0:
        raise UnsupportedFractionError(
            f"pf_fraction {pf_fraction} leaves no symmetric band at height {height}"
        )
    if k == height:
        return slice(0, height)
    first = height - k
    return slice(first, 2 * (height // 2) - first + 1)


def estimate_lowres_phase(ksp_masked: np.ndarray, cfg: PfReconConfig) -> PhaseField:
    """Estimate a smooth phase map from the symmetric band of k-space.

    The band (apodized along the partial Fourier axis) is zero-padded
    back to the full grid and inverse transformed; the phase is the
    angle of that low-resolution image.  Where its magnitude falls
    below ``phase_support_floor`` of the peak the phase is meaningless
    (ringing and noise only) and is set to zero so demodulation leaves
    those pixels alone.
    """
    ksp_masked = np.asarray(ksp_masked)
    h, _ = ksp_masked.shape
    band = _symmetric_band(h, cfg.pf_fraction)
    window = _band_window(h, band, cfg.phase_window)
    lowpass = np.zeros_like(ksp_masked, dtype=np.complex128)
    lowpass[band] = ksp_masked[band] * window[:, None]
    lowres = idft2_centered(lowpass)
    angles = np.angle(lowres)
    supported = np.abs(lowres) >= cfg.phase_support_floor * np.abs(lowres).max()
    return PhaseField(angles=np.where(supported, angles, 0.0))


def margosian_recon(ksp_masked: np.ndarray, cfg: PfReconConfig) -> np.ndarray:
    """One-pass homodyne reconstruction of partial Fourier k-space.

    Returns a real image clamped at zero from below; residual negative
    values only arise from imperfect phase estimates and the output is
    used downstream as a magnitude-like channel.
    """
    ksp_masked = np.asarray(ksp_masked)
    h, _ = ksp_masked.shape
    weights = homodyne_weights(h, cfg.pf_fraction, cfg.transition_width)
    img = idft2_centered(ksp_masked * weights[:, None])
    phase = estimate_lowres_phase(ksp_masked, cfg)
    demodulated = (img * np.conj(phase.as_complex)).real
    return np.maximum(demodulated, 0.0)


def zero_filled_recon(ksp_masked: np.ndarray) -> np.ndarray:
    """Magnitude of the naive inverse transform (missing rows left zero)."""
    return magnitude(idft2_centered(ksp_masked))
