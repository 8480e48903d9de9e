"""Center of mass and angular momentum at null infinity from Bondi-Sachs data."""

__version__ = "0.1.0"

from .charges import (EmbeddingLevelZero, FrameReport, angular_momentum, bondi_energy,
                      bondi_linear_momentum, center_of_mass, charges, check_com_frame,
                      rotation_fields, solve_embedding)
from .data import BondiData, ChargeSet, kerr_data, random_data, read_data, write_data
from .errors import DataFormatError, FrameError, KernelObstruction
from .limits import (ExpansionCoefficients, angmom_via_limit, com_via_limit,
                     compute_coefficients, lemma_residuals)
from .spectral import (CovectorField, ScalarField, SphereGrid, analyze, curl, divergence,
                       gradient, integrate, invert_helmholtz_plus_two, invert_laplacian,
                       laplacian, synthesize)
from .tensors import (TracelessTensor, contract, decompose_shear, div_tensor,
                      double_divergence, interchange_residuals, r2_scalar, tensor_components)

__all__ = [
    "BondiData", "ChargeSet", "CovectorField", "DataFormatError", "EmbeddingLevelZero",
    "ExpansionCoefficients", "FrameError", "FrameReport", "KernelObstruction", "ScalarField",
    "SphereGrid", "TracelessTensor", "analyze", "angmom_via_limit", "angular_momentum",
    "bondi_energy", "bondi_linear_momentum", "center_of_mass", "charges", "check_com_frame",
    "com_via_limit", "compute_coefficients", "contract", "curl", "decompose_shear",
    "div_tensor", "divergence", "double_divergence", "gradient", "integrate",
    "interchange_residuals", "invert_helmholtz_plus_two", "invert_laplacian", "kerr_data",
    "laplacian", "lemma_residuals", "r2_scalar", "random_data", "read_data",
    "rotation_fields", "solve_embedding", "synthesize", "tensor_components", "write_data",
]
