"""Majorana spectra and stabilizer Renyi entropies of complex SYK states."""

__version__ = "0.1.0"

from ._kernels import BACKEND, available_backends
from .dynamics import QuenchPlan, default_time_grid, product_state, quench_series, spectrum_snapshot
from .eigensolve import eig_hermitian, evolve, ground_state
from .errors import (ConfigError, DimensionError, NumericalConsistencyError, ParameterError, SamplerError,
                     SizeGuardError)
from .fock import PureState, SectorBasis, basis_state, embed_sector_vector, enumerate_sector, half_filling
from .hamiltonians import ModelInstance, build_sector_matrix, derive_seed, sample_model
from .majorana import MajoranaString, dense_oracle, expectation, expectations
from .sampler import ChainConfig, run_chain
from .spectrum import MajoranaSpectrum, exact_spectrum, filtered_sre, fit_both, histogram, sre

__all__ = [
    "BACKEND", "available_backends",
    "QuenchPlan", "default_time_grid", "product_state", "quench_series", "spectrum_snapshot",
    "eig_hermitian", "evolve", "ground_state",
    "ConfigError", "DimensionError", "NumericalConsistencyError", "ParameterError", "SamplerError",
    "SizeGuardError",
    "PureState", "SectorBasis", "basis_state", "embed_sector_vector", "enumerate_sector", "half_filling",
    "ModelInstance", "build_sector_matrix", "derive_seed", "sample_model",
    "MajoranaString", "dense_oracle", "expectation", "expectations",
    "ChainConfig", "run_chain",
    "MajoranaSpectrum", "exact_spectrum", "filtered_sre", "fit_both", "histogram", "sre",
]
