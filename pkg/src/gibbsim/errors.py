"""Exception types shared across the toolkit."""


class GibbsimError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(GibbsimError, ValueError):
    """Image or grid dimensions are invalid or inconsistent."""


class DegenerateInputError(GibbsimError, ValueError):
    """An input is degenerate for the requested operation (e.g. all-zero)."""


class UnsupportedFractionError(GibbsimError, ValueError):
    """Partial Fourier fraction outside the supported (1/2, 1] range."""


class UnboundedFwhmError(GibbsimError, ValueError):
    """A line-spread function has no half-maximum crossing on one side."""


class FormatError(GibbsimError, ValueError):
    """A tensor file or manifest does not conform to the on-disk format."""


class ProcessorError(GibbsimError, RuntimeError):
    """An external processor command failed or violated its contract."""
