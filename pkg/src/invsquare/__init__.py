"""Bound states of the cutoff-regularized -alpha/x^2 potential.

Two independent routes are provided: matching the inner sine solution to
sqrt(rho) K_{ig}(rho) outside the cutoff (:mod:`invsquare.analytic`), and
diagonalizing the Hamiltonian in an infinite-well sine basis
(:mod:`invsquare.matrix`). :mod:`invsquare.harness` compares them.
"""

__version__ = "0.1.0"

from .analytic import (EigenRecord, PotentialSpec, Units, WavefunctionTable, analytic_wavefunction,
                       approx_ground_energy, approx_ladder, effective_strength_2d, matching_residual,
                       normalization_h, solve_spectrum)
from .config import SolverConfig
from .estimators import AnalyticSpectrum, AsymptoticSpectrum, GroundStateDensity, MatrixSpectrum
from .exceptions import (BelowThresholdError, ConvergenceError, DomainError, TruncationWarning,
                         WallContaminationError)
from .harness import collapse_metric, compare_spectra, ladder_check
from .matrix import (BasisConfig, EigenSolution, HamiltonianMatrix, assemble, bound_states,
                     count_nodes, diagonalize, reconstruct_wavefunction)
from .specfun import ImagOrder, QuadratureSpec

__all__ = [
    "AnalyticSpectrum", "AsymptoticSpectrum", "BasisConfig", "BelowThresholdError",
    "ConvergenceError", "DomainError", "EigenRecord", "EigenSolution", "GroundStateDensity",
    "HamiltonianMatrix", "ImagOrder", "MatrixSpectrum", "PotentialSpec", "QuadratureSpec",
    "SolverConfig", "TruncationWarning", "Units", "WallContaminationError", "WavefunctionTable",
    "analytic_wavefunction", "approx_ground_energy", "approx_ladder", "assemble", "bound_states",
    "collapse_metric", "compare_spectra", "count_nodes", "diagonalize", "effective_strength_2d",
    "ladder_check", "matching_residual", "normalization_h", "reconstruct_wavefunction",
    "solve_spectrum",
]
