"""Simulation toolkit for simple optical instruments acting on quantum light.

Modules:
    mode_core: quasi-unitary mode transforms, decompositions, effective Hamiltonians.
    dielectric: transfer and scattering matrices of 1D dielectrics.
    fock_engine: truncated Fock-space states and instruments.
    gaussian_engine: Gaussian states as quadrature means and covariances.
    open_systems: absorber/amplifier channels and a phase-space Fokker-Planck solver.
    bell: polarization correlations and CHSH.
    horizon: moving-medium horizons, Hawking spectrum, grey-body factor.
    network_dsl, cli: text network descriptions and the ``photonic`` command.
"""

from .errors import (
    BranchCutError,
    DomainError,
    DSLError,
    EmptyPostselectionError,
    HorizonError,
    NumericalError,
    PhotonicError,
    SingularTransferError,
    StepSizeError,
    StructuralError,
    TruncationError,
    UnsupportedConfigurationError,
    ValidationError,
)
from .mode_core import ModeTransform, EffectiveHamiltonianMatrix, BeamSplitterParams, AmplifierParams
from .dielectric import LayeredProfile, SampledProfile, TransferMatrix, ScatteringMatrix2
from .fock_engine import FockState
from .gaussian_engine import GaussianState
from .open_systems import ReservoirParams, ChannelMap
from .horizon import FlowProfile, HawkingSpectrum
from .network_dsl import network_dsl_parse

__version__ = "0.1.0"

__all__ = [
    "AmplifierParams",
    "BeamSplitterParams",
    "BranchCutError",
    "ChannelMap",
    "DSLError",
    "DomainError",
    "EffectiveHamiltonianMatrix",
    "EmptyPostselectionError",
    "FlowProfile",
    "FockState",
    "GaussianState",
    "HawkingSpectrum",
    "HorizonError",
    "LayeredProfile",
    "ModeTransform",
    "NumericalError",
    "PhotonicError",
    "ReservoirParams",
    "SampledProfile",
    "ScatteringMatrix2",
    "SingularTransferError",
    "StepSizeError",
    "StructuralError",
    "TransferMatrix",
    "TruncationError",
    "UnsupportedConfigurationError",
    "ValidationError",
    "network_dsl_parse",
]
