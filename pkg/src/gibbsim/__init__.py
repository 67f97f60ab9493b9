"""gibbsim: deterministic MRI acquisition simulation and Gibbs/noise analysis.

Simulates k-space acquisitions (truncation ringing, complex noise,
partial Fourier masking, random phase) on ordinary photographs to build
training pairs, provides the classical homodyne partial Fourier
reconstruction, and measures any image-restoration processor with
edge-response (FWHM) and spectral-response experiments.
"""

from .core import (
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
from .errors import (
    DegenerateInputError,
    DimensionError,
    FormatError,
    GibbsimError,
    ProcessorError,
    UnboundedFwhmError,
    UnsupportedFractionError,
)
from .metrics import (
    LogisticFitParams,
    SpectralResponse,
    fit_logistic_sum,
    fwhm,
    logistic_sum,
    lsf_from_fit,
    psd,
    rician_correct,
    sigma_from_background,
    spectral_response,
)
from .pfrecon import (
    PfReconConfig,
    estimate_lowres_phase,
    homodyne_weights,
    kept_lines,
    margosian_recon,
    zero_filled_recon,
)
from .phantom import (
    AngleResult,
    CnrPoint,
    EdgePhantomSpec,
    compose_processor_input,
    make_edge_phantom,
    run_angle_sweep,
    run_cnr_sweep,
)
from .phase import PhaseField, PhaseModelParams, apply_phase, sample_phase
from .seeds import derive_seed, float_key, splitmix64
from .simulate import (
    SampleMeta,
    SamplePair,
    SimConfig,
    add_kspace_noise,
    pf_mask,
    random_ellipsoid_crop,
    random_flip_transpose,
    simulate_pair,
)

__version__ = "0.1.0"
