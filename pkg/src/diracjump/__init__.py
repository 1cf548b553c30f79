"""1D Dirac scattering across a mass jump with a point interaction, and the
Shannon entropies of the scattering state in position and momentum space."""

from .bounds import BBM_CONSTANT, EntropyReport, build_report
from .errors import (AccuracyError, ConfigError, DiracJumpError, DomainError, PoleProximityError,
                     RegularizationError, ResolutionError, SolverError)
from .medium import MediumParams, Regime
from .momentum_entropy import (MomentumAmplitude, MomentumDensity, entropy_momentum,
                               entropy_momentum_normalized, fft_oracle, formal_ft, windowed_ft)
from .position_entropy import (PositionDensity, WindowSpec, entropy_position, entropy_position_normalized,
                               position_density, sx_lower_bound)
from .quadrature import PowerLawTail, QuadSpec, gaussian_calibration, integrate
from .scattering import ScatteringSolution, flux_residual, matching_matrix, solve_amplitudes

__all__ = [
    "AccuracyError", "BBM_CONSTANT", "ConfigError", "DiracJumpError", "DomainError", "EntropyReport",
    "MediumParams", "MomentumAmplitude", "MomentumDensity", "PoleProximityError", "PositionDensity",
    "PowerLawTail", "QuadSpec", "Regime", "RegularizationError", "ResolutionError", "ScatteringSolution",
    "SolverError", "WindowSpec", "build_report", "entropy_momentum", "entropy_momentum_normalized",
    "entropy_position", "entropy_position_normalized", "fft_oracle", "flux_residual", "formal_ft",
    "gaussian_calibration", "integrate", "matching_matrix", "position_density", "solve_amplitudes",
    "sx_lower_bound", "windowed_ft",
]
