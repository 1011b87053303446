"""Exact construction and certification of maximal orthoplectic fusion frames."""

__version__ = "0.1.0"

from .designs import BlockFamily, IncidenceMatrix, build_S, is_t_design, to_blocks
from .fusion import FusionFrame, assemble, rankin_certify
from .mub import OrthonormalBasisSet, construct_mubs, verify_unbiased
from .numerics import DenseMatrix, GaussianRational, HermitianProjector

__all__ = [
    "BlockFamily", "DenseMatrix", "FusionFrame", "GaussianRational", "HermitianProjector",
    "IncidenceMatrix", "OrthonormalBasisSet", "assemble", "build_S", "construct_mubs",
    "is_t_design", "rankin_certify", "to_blocks", "verify_unbiased", "__version__",
]
