"""Numerical laboratory for sup-norm Poissonian pair correlation on the d-torus."""

__version__ = "0.1.0"

from ppclab.errors import DomainError, PPCError, SequenceFileError
from ppclab.torus import NormKind, dilate_frac, intdist
from ppclab.sequences import (
    SequenceMatrix,
    SpacingCertificate,
    check_spacing,
    gen_nlog,
    gen_power,
    load_sequence,
    save_sequence,
)

__all__ = [
    "DomainError",
    "NormKind",
    "PPCError",
    "SequenceFileError",
    "SequenceMatrix",
    "SpacingCertificate",
    "check_spacing",
    "dilate_frac",
    "gen_nlog",
    "gen_power",
    "intdist",
    "load_sequence",
    "save_sequence",
]
