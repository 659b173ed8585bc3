"""scikit-learn style front ends.

The solvers are parameter-free maps from a potential strength rho0^2 to a
spectrum, so they are exposed as stateless transformers: ``fit`` only
validates, ``transform`` takes a column of rho0^2 values and returns one row
of rho_eps^2 per strength. :class:`GroundStateDensity` is the one stateful
estimator: ``fit`` solves for the eigenstate, ``transform`` samples it.
"""

import math
import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import matrix
from ._validation import check_column, check_eps_over_a, check_positive_int, check_rho0_sq
from .analytic import (AMPLITUDE, ANALYTIC, DENSITY, MATRIX, PotentialSpec, analytic_wavefunction,
                       approx_ground_energy, approx_ladder, normalization_h, solve_spectrum)
from .config import SolverConfig
from .exceptions import DomainError, TruncationWarning


class _SpectrumTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        check_column(X)
        check_positive_int(self.n_states, "n_states")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        rho0_sq = check_column(X)
        out = np.full((rho0_sq.size, self.n_states), np.nan)
        for i, r in enumerate(rho0_sq):
            vals = self._solve(float(r))
            out[i, :len(vals)] = vals
        return out


class AnalyticSpectrum(_SpectrumTransformer):
    """rho_eps^2 of the ``n_states`` deepest states from the matching condition."""

    def __init__(self, n_states=4, root_tol=1e-12):
        self.n_states = n_states
        self.root_tol = root_tol

    def _solve(self, rho0_sq):
        cfg = SolverConfig(root_tol=self.root_tol)
        recs = solve_spectrum(PotentialSpec(rho0_sq), self.n_states, cfg)
        return [r.rho_eps_sq for r in recs]


class AsymptoticSpectrum(_SpectrumTransformer):
    """Small-argument ground state continued by the geometric ladder."""

    def __init__(self, n_states=4):
        self.n_states = n_states

    def _solve(self, rho0_sq):
        e1 = approx_ground_energy(PotentialSpec(rho0_sq))
        out = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            for n in range(1, self.n_states + 1):
                rec = approx_ladder(e1, n)
                if rec is None:
                    break
                out.append(rec.rho_eps_sq)
        return out


class MatrixSpectrum(_SpectrumTransformer):
    """rho_eps^2 from diagonalizing the sine-basis Hamiltonian.

    States the embedding well pushes above zero come back as nan. The wall
    flags of the last transformed batch are kept in ``wall_flags_``.
    """

    def __init__(self, n_states=4, n_max=400, eps_over_a=0.001):
        self.n_states = n_states
        self.n_max = n_max
        self.eps_over_a = eps_over_a

    def fit(self, X, y=None):
        check_positive_int(self.n_max, "n_max", minimum=2)
        check_eps_over_a(self.eps_over_a)
        return super().fit(X, y)

    def transform(self, X):
        self.wall_flags_ = []
        return super().transform(X)

    def _solve(self, rho0_sq):
        k = min(self.n_states, self.n_max)
        sol = matrix.solve(PotentialSpec(rho0_sq, self.eps_over_a), self.n_max, k)
        recs = matrix.bound_states(sol)
        self.wall_flags_.append([matrix.wall_affected(sol, r.n) for r in recs])
        return [r.rho_eps_sq for r in recs]


class GroundStateDensity(BaseEstimator):
    """Scaled eigenfunction of one state, sampled on x/eps.

    ``fit`` solves for the state (analytic or matrix route); ``transform``
    maps an array of x/eps values to sqrt(eps) psi or eps |psi|^2.
    """

    def __init__(self, rho0_sq=50.0, state=1, method=ANALYTIC, kind=DENSITY,
                 eps_over_a=0.001, n_max=400):
        self.rho0_sq = rho0_sq
        self.state = state
        self.method = method
        self.kind = kind
        self.eps_over_a = eps_over_a
        self.n_max = n_max

    def fit(self, X=None, y=None):
        if self.method not in (ANALYTIC, MATRIX):
            raise DomainError(f"method must be {ANALYTIC!r} or {MATRIX!r}")
        if self.kind not in (AMPLITUDE, DENSITY):
            raise DomainError(f"kind must be {AMPLITUDE!r} or {DENSITY!r}")
        state = check_positive_int(self.state, "state")
        spec = PotentialSpec(check_rho0_sq(self.rho0_sq, bound=self.method == ANALYTIC),
                             self.eps_over_a)
        self.spec_ = spec
        if self.method == ANALYTIC:
            self.record_ = solve_spectrum(spec, state)[state - 1]
            self.h_ = normalization_h(spec, self.record_)
        else:
            self.solution_ = matrix.solve(spec, self.n_max, min(state, self.n_max))
            self.wall_affected_ = matrix.wall_affected(self.solution_, state)
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        y = check_column(X, "x_over_eps")
        if self.method == ANALYTIC:
            tab = analytic_wavefunction(self.spec_, self.record_, y, self.kind, h=self.h_)
        else:
            if y.max() * self.eps_over_a > 1.0:
                raise DomainError("x/eps reaches beyond the well wall at x = a")
            tab = matrix.reconstruct_wavefunction(self.solution_, self.state,
                                                  y * self.eps_over_a, self.kind)
        return tab.values

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)

    def captured_probability(self, X):
        """Trapezoid integral of the density over the sample points."""
        y = check_column(X, "x_over_eps")
        vals = self.transform(y)
        dens = vals if self.kind == DENSITY else vals**2
        return float(np.trapezoid(dens, y))


def energies(rho_eps_sq, rho0_sq, eps_over_a=None):
    """Convert rho_eps^2 to E/(alpha/eps^2), or to E/E0 when ``eps_over_a`` is given."""
    rho_eps_sq = np.asarray(rho_eps_sq, dtype=float)
    if eps_over_a is None:
        return -rho_eps_sq / float(rho0_sq)
    return -rho_eps_sq / (math.pi**2 * check_eps_over_a(eps_over_a) ** 2)
