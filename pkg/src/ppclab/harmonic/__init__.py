from ppclab.harmonic.expsum import exp_sum, vdc_bound
from ppclab.harmonic.kernel import KernelParams, k_hat, k_kernel
from ppclab.harmonic.measure import MeasureSpec, mu_cdf, mu_density, mu_hat, mu_sample
from ppclab.harmonic.selberg import (
    SandwichCheck,
    TrigPolynomial,
    arc_indicator,
    sandwich_check,
    selberg_poly,
    tensor_coefficient,
    tensor_constant,
    tensor_eval,
    tensor_minorant_coefficient,
    tensor_minorant_eval,
    tensor_terms,
)

__all__ = [
    "KernelParams",
    "MeasureSpec",
    "SandwichCheck",
    "TrigPolynomial",
    "arc_indicator",
    "exp_sum",
    "k_hat",
    "k_kernel",
    "mu_cdf",
    "mu_density",
    "mu_hat",
    "mu_sample",
    "sandwich_check",
    "selberg_poly",
    "tensor_coefficient",
    "tensor_constant",
    "tensor_eval",
    "tensor_minorant_coefficient",
    "tensor_minorant_eval",
    "tensor_terms",
    "vdc_bound",
]
