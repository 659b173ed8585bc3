"""Cross-validation of the analytic and matrix routes, and figure datasets."""

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import matrix
from ._validation import check_grid, check_positive_int
from .analytic import (DENSITY, PotentialSpec, analytic_wavefunction, normalization_h,
                       solve_spectrum)
from .config import SolverConfig
from .exceptions import BelowThresholdError, DomainError, TruncationWarning, WallContaminationError


def rel_diff(a, b):
    """|a - b| / max(|a|, |b|); 0 when both vanish, nan if either is nan."""
    if math.isnan(a) or math.isnan(b):
        return math.nan
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


@dataclass(frozen=True)
class SpectrumPair:
    n: int
    rho_eps_sq_analytic: float
    rho_eps_sq_matrix: float
    rel_diff: float
    wall_affected: bool


@dataclass(frozen=True)
class ComparisonReport:
    spec: PotentialSpec
    n_max: int
    pairs: tuple = ()
    error: str = None
    config: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.error is None

    @property
    def flags(self):
        return tuple(p.wall_affected for p in self.pairs)

    def unflagged(self):
        return [p for p in self.pairs if not p.wall_affected]

    def max_rel_diff(self):
        """Worst relative difference over pairs not flagged as wall-affected."""
        diffs = [p.rel_diff for p in self.unflagged()]
        return max(diffs) if diffs else math.nan


def compare_spectra(spec, n_states, n_max, cfg=None):
    """Solve both routes for ``spec`` and pair states by index.

    A below-threshold strength yields a report whose ``error`` field says so
    instead of raising; other solver failures propagate.
    """
    cfg = SolverConfig() if cfg is None else cfg
    n_states = check_positive_int(n_states, "n_states")
    echo = dict(cfg.as_dict(), n_max=n_max, eps_over_a=spec.eps_over_a,
                rho0_sq=spec.rho0_sq, n_states=n_states)
    try:
        exact = solve_spectrum(spec, n_states, cfg)
    except BelowThresholdError as exc:
        return ComparisonReport(spec, n_max, (), str(exc), echo)

    sol = matrix.solve(spec, n_max, min(n_max, max(n_states, 1)))
    numeric = matrix.bound_states(sol)
    pairs = []
    for rec in exact:
        if rec.n <= len(numeric):
            m = numeric[rec.n - 1].rho_eps_sq
            wall = matrix.wall_affected(sol, rec.n)
        else:
            # pushed above zero by the well: no matrix bound state to compare
            m, wall = math.nan, True
        pairs.append(SpectrumPair(rec.n, rec.rho_eps_sq, m, rel_diff(rec.rho_eps_sq, m), wall))
    return ComparisonReport(spec, n_max, tuple(pairs), None, echo)


@dataclass(frozen=True)
class CollapseReport:
    spec: PotentialSpec
    epsilon_list: tuple
    grid: np.ndarray
    curves: np.ndarray  # eps |psi_1|^2, one row per epsilon
    analytic_curve: np.ndarray
    max_pairwise_dev: float
    max_dev_vs_analytic: float
    n_max: int
    config: dict = field(default_factory=dict)


def collapse_metric(spec_base, epsilon_list, grid, n_max, cfg=None):
    """Ground-state density eps |psi_1|^2 against x/eps for several cutoffs.

    Deviations are sup-norms over ``grid`` divided by the peak of the
    analytic curve. A ground state touched by the well wall is refused.
    """
    cfg = SolverConfig() if cfg is None else cfg
    eps_list = tuple(float(e) for e in epsilon_list)
    if len(eps_list) < 2:
        raise DomainError("collapse_metric needs at least two epsilon values")
    y = check_grid(grid, lower=0.0, name="grid (x/eps)")

    exact = solve_spectrum(spec_base, 1, cfg)[0]
    h = normalization_h(spec_base, exact, cfg.quadrature)
    ref = analytic_wavefunction(spec_base, exact, y, DENSITY, cfg.quadrature, h=h).values
    peak = float(ref.max())

    curves = []
    cache = {}
    for eps in eps_list:
        if eps not in cache:
            spec = PotentialSpec(spec_base.rho0_sq, eps)
            if y[-1] * eps > 1.0:
                raise DomainError(f"grid reaches x/a = {y[-1] * eps:.3g} > 1 for eps/a = {eps}")
            sol = matrix.solve(spec, n_max, 1)
            if not matrix.bound_states(sol) or matrix.wall_affected(sol, 1):
                raise WallContaminationError(
                    f"ground state at eps/a={eps}, n_max={n_max} is affected by the well wall; "
                    "use a smaller eps/a or a larger n_max")
            cache[eps] = matrix.reconstruct_wavefunction(sol, 1, y * eps, DENSITY).values
        curves.append(cache[eps])
    curves = np.array(curves)

    pairwise = max(float(np.abs(a - b).max()) for a, b in itertools.combinations(curves, 2))
    vs_analytic = float(np.abs(curves - ref[None, :]).max())
    echo = dict(cfg.as_dict(), n_max=n_max, rho0_sq=spec_base.rho0_sq)
    return CollapseReport(spec_base, eps_list, y, curves, ref, pairwise / peak,
                          vs_analytic / peak, n_max, echo)


@dataclass(frozen=True)
class LadderRow:
    n: int
    ratio: float
    asymptotic_ratio: float
    deviation: float


def ladder_check(spec, n_from, n_to, cfg=None):
    """Ratios rho_{n+1}^2 / rho_n^2 for n = n_from..n_to-1 against exp(-2 pi / g).

    If the ladder underflows first, the available rows are returned and the
    :class:`TruncationWarning` from the solver is re-issued.
    """
    n_from = check_positive_int(n_from, "n_from")
    n_to = check_positive_int(n_to, "n_to")
    if n_to <= n_from:
        raise DomainError("ladder_check needs n_to > n_from")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        records = solve_spectrum(spec, n_to, cfg)
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)
    asym = math.exp(-2.0 * math.pi / spec.g)
    rows = []
    for n in range(n_from, min(n_to, len(records))):
        ratio = records[n].rho_eps_sq / records[n - 1].rho_eps_sq
        rows.append(LadderRow(n, ratio, asym, abs(ratio / asym - 1.0)))
    return rows
