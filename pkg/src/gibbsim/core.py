"""Fundamental 2D image / k-space operations.

Images are plain numpy arrays: real images are 2D float arrays, complex
images are 2D complex arrays, both row-major with ``shape == (height,
width)``.  All Fourier-domain operations use a single *centered*
convention, fixed here once and relied on everywhere else:

* the DC coefficient of an ``H x W`` grid sits at index
  ``(H // 2, W // 2)``;
* the forward transform is unnormalized, the inverse carries the
  ``1 / (H * W)`` factor;
* crops, pads and masks are defined relative to that center index.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError, DimensionError

__all__ = [
    "grayscale_bt601",
    "bilinear_resize",
    "cubic_spline_resize",
    "dft2_centered",
    "idft2_centered",
    "center_crop_kspace",
    "center_pad_kspace",
    "magnitude",
    "fourier_upsample",
    "normalize_by_max_abs",
]


def _check_2d(a: np.ndarray, name: str = "image") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2D array, got shape {a.shape}")
    return a


def grayscale_bt601(rgb: np.ndarray) -> np.ndarray:
    """Convert an ``(H, W, 3)`` RGB image to grayscale with BT.601 weights.

    Parameters
    ----------
    rgb : ndarray
        Real image with three channels in the last axis, values in [0, 1].

    Returns
    -------
    ndarray
        ``(H, W)`` float64 image, ``0.299 R + 0.587 G + 0.114 B``.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise DimensionError(f"expected an (H, W, 3) image, got shape {rgb.shape}")
    return rgb[:, :, 0] * 0.299 + rgb[:, :, 1] * 0.587 + rgb[:, :, 2] * 0.114


def _axis_coords(n_in: int, n_out: int) -> np.ndarray:
    # align-corners-false: pixel centers at (i + 0.5) / N
    return (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5


def _linear_resize_axis(a: np.ndarray, n_out: int, axis: int) -> np.ndarray:
    n_in = a.shape[axis]
    src = np.clip(_axis_coords(n_in, n_out), 0.0, n_in - 1.0)
    i0 = np.floor(src).astype(np.intp)
    i0 = np.minimum(i0, n_in - 2) if n_in > 1 else i0
    w = src - i0
    lo = np.take(a, i0, axis=axis)
    hi = np.take(a, i0 + 1, axis=axis) if n_in > 1 else lo
    shape = [1] * a.ndim
    shape[axis] = n_out
    w = w.reshape(shape)
    return lo * (1.0 - w) + hi * w


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Separable bilinear resampling, align-corners-false, edges clamped.

    Convex interpolation only: output values never leave the input range.
    """
    img = _check_2d(np.asarray(img, dtype=np.float64))
    if out_h < 2 or out_w < 2:
        raise DimensionError(f"output dims must be >= 2, got ({out_h}, {out_w})")
    out = _linear_resize_axis(img, out_h, axis=0)
    return _linear_resize_axis(out, out_w, axis=1)


def _catmull_rom_weights(t: np.ndarray) -> tuple[np.ndarray, ...]:
    # Catmull-Rom kernel, a = -0.5; taps at offsets -1, 0, +1, +2 from floor(src)
    t2 = t * t
    t3 = t2 * t
    w0 = -0.5 * t3 + t2 - 0.5 * t
    w1 = 1.5 * t3 - 2.5 * t2 + 1.0
    w2 = -1.5 * t3 + 2.0 * t2 + 0.5 * t
    w3 = 0.5 * t3 - 0.5 * t2
    return w0, w1, w2, w3


def _cubic_resize_axis(a: np.ndarray, n_out: int, axis: int) -> np.ndarray:
    n_in = a.shape[axis]
    # Virtual padding by linear extrapolation keeps the interpolant exact on
    # linear ramps all the way to the borders.
    first = np.take(a, [0], axis=axis)
    second = np.take(a, [1], axis=axis)
    last = np.take(a, [n_in - 1], axis=axis)
    penult = np.take(a, [n_in - 2], axis=axis)
    padded = np.concatenate(
        [
            3.0 * first - 2.0 * second,
            2.0 * first - second,
            a,
            2.0 * last - penult,
            3.0 * last - 2.0 * penult,
        ],
        axis=axis,
    )
    src = _axis_coords(n_in, n_out)
    base = np.floor(src).astype(np.intp)
    t = src - base
    base += 2  # account for the two padding samples on the low side
    weights = _catmull_rom_weights(t)
    shape = [1] * a.ndim
    shape[axis] = n_out
    out = None
    for k, wk in enumerate(weights):
        term = np.take(padded, base + (k - 1), axis=axis) * wk.reshape(shape)
        out = term if out is None else out + term
    return out


def cubic_spline_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Separable cubic resampling with the Catmull-Rom kernel (a = -0.5).

    Uses the same align-corners-false source mapping as
    :func:`bilinear_resize`.  Requires at least a 4x4 input (kernel
    support).  Unlike bilinear, cubic lobes may over/undershoot.
    """
    img = _check_2d(np.asarray(img, dtype=np.float64))
    if img.shape[0] < 4 or img.shape[1] < 4:
        raise DimensionError(f"input must be at least 4x4 for cubic resize, got {img.shape}")
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"output dims must be >= 1, got ({out_h}, {out_w})")
    out = _cubic_resize_axis(img, out_h, axis=0)
    return _cubic_resize_axis(out, out_w, axis=1)


def dft2_centered(img: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2D DFT with DC at ``(H // 2, W // 2)``.

    Equivalent to the direct sum
    ``X[u, v] = sum_mn x[m, n] exp(-2j pi ((u-cu)(m-cm)/H + (v-cv)(n-cn)/W))``
    with ``cu = H // 2`` etc.; implemented via FFT with pre/post shifts.
    """
    img = _check_2d(np.asarray(img))
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(img)))


def idft2_centered(ksp: np.ndarray) -> np.ndarray:
    """Exact inverse of :func:`dft2_centered` (carries the 1/(H*W) factor)."""
    ksp = _check_2d(np.asarray(ksp))
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(ksp)))


def _crop_window(n_in: int, n_out: int) -> slice:
    start = n_in // 2 - n_out // 2
    return slice(start, start + n_out)


def center_crop_kspace(ksp: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Crop a centered k-space grid so DC maps to the new center index.

    Keeps rows ``[H//2 - out_h//2, H//2 - out_h//2 + out_h)`` and the
    analogous columns.  For even sizes this retains one extra negative
    frequency, mirroring the asymmetry of even-length DFT grids.
    """
    ksp = _check_2d(ksp, "k-space")
    h, w = ksp.shape
    if out_h > h or out_w > w:
        raise DimensionError(f"crop dims ({out_h}, {out_w}) exceed input {ksp.shape}")
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"crop dims must be >= 1, got ({out_h}, {out_w})")
    return ksp[_crop_window(h, out_h), _crop_window(w, out_w)].copy()


def center_pad_kspace(ksp: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Zero-pad a centered k-space grid; inverse of :func:`center_crop_kspace`."""
    ksp = _check_2d(ksp, "k-space")
    h, w = ksp.shape
    if out_h < h or out_w < w:
        raise DimensionError(f"pad dims ({out_h}, {out_w}) smaller than input {ksp.shape}")
    out = np.zeros((out_h, out_w), dtype=np.result_type(ksp.dtype, np.complex128))
    out[_crop_window(out_h, h), _crop_window(out_w, w)] = ksp
    return out


def magnitude(img: np.ndarray) -> np.ndarray:
    """Per-pixel complex modulus, returned as a real image."""
    return np.abs(_check_2d(img))


def fourier_upsample(img: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited upsampling by zero-padding the centered spectrum.

    Original samples are reproduced exactly at indices ``factor * n``;
    in-between values interpolate the underlying trigonometric
    polynomial, which is how sub-pixel structure (e.g. ringing peaks
    between samples) is measured.  Real input yields the real part.
    """
    img = _check_2d(img)
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    h, w = img.shape
    up = idft2_centered(center_pad_kspace(dft2_centered(img), h * factor, w * factor))
    up = up * factor * factor
    return up.real if not np.iscomplexobj(img) else up


def normalize_by_max_abs(
    x: np.ndarray, companions: list[np.ndarray] | tuple[np.ndarray, ...] = ()
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Divide ``x`` and every companion image by ``max(abs(x))``.

    The same scalar is applied to all images so relative scales between
    channels are preserved; afterwards ``max(abs(x)) == 1``.
    """
    x = _check_2d(x)
    scale = float(np.abs(x).max())
    if not scale > 0.0:
        raise DegenerateInputError("cannot normalize: max(abs(x)) is zero")
    return x / scale, [np.asarray(c) / scale for c in companions]
