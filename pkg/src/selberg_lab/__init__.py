"""Short-interval prime-sum variances and zero pair-correlation statistics for
Selberg-class L-functions, with the matching closed-form main terms."""

from .lfunc_registry import (
    EULER_GAMMA,
    LOG_2PI,
    DescriptorError,
    GammaFactor,
    LFunctionDescriptor,
    conductor,
    degree,
    make_builtin,
)

__version__ = "0.1.0"

__all__ = [
    "EULER_GAMMA",
    "LOG_2PI",
    "DescriptorError",
    "GammaFactor",
    "LFunctionDescriptor",
    "conductor",
    "degree",
    "make_builtin",
    "__version__",
]
