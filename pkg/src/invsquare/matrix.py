"""Matrix route: the truncated potential embedded in an infinite well of width a.

The wavefunction is expanded in the well's sine basis sqrt(2/a) sin(n pi x/a),
n = 1..N_max, and the dimensionless Hamiltonian h = H/E0 is diagonalized.
Internally a = 1, so x/a is the coordinate and eps/a the cutoff.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import specfun
from ._validation import check_grid, check_positive_int
from .analytic import (AMPLITUDE, DENSITY, MATRIX, EigenRecord, PotentialSpec, Units,
                       WavefunctionTable, _sign_first_antinode)
from .exceptions import ConvergenceError, DomainError

# Relative amplitude on the last 1% of the well above which a state "feels" the wall.
WALL_THRESHOLD = 1e-3
WALL_FRACTION = 0.01
# Samples below this fraction of max|psi| are ignored when counting nodes.
NODE_NOISE = 1e-9


@dataclass(frozen=True)
class BasisConfig:
    n_max: int
    spec: PotentialSpec

    def __post_init__(self):
        object.__setattr__(self, "n_max", check_positive_int(self.n_max, "n_max", minimum=2))


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    config: BasisConfig

    @property
    def dim(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class EigenSolution:
    energies: np.ndarray  # E/E0, ascending
    vectors: np.ndarray  # column k is c^(k)
    config: BasisConfig
    diagnostics: dict = field(default_factory=dict)


def _l2_table(max_index, rho):
    """L2(k, rho) for k = 0..max_index."""
    return np.array([specfun.l2_integral(k, rho) for k in range(max_index + 1)])


def assemble(config):
    """Dimensionless sine-basis Hamiltonian h_nm = H_nm / E0.

    h_nm = n^2 delta_nm - (rho0^2/pi^2) { (a/eps) [delta_nm + (1 - delta_nm) Sinc((n-m) pi eps/a)
           - Sinc((n+m) pi eps/a)] + L2(n+m, eps/a) - L2(n-m, eps/a) }

    Off the delta terms every entry depends on n+m and |n-m| only, so Sinc
    and L2 are tabulated once over k = 0..2 N_max.
    """
    n_max = config.n_max
    rho0_sq = config.spec.rho0_sq
    r = config.spec.eps_over_a

    k = np.arange(2 * n_max + 1)
    sinc_k = specfun.sinc(k * math.pi * r)
    l2_k = _l2_table(2 * n_max, r)

    n = np.arange(1, n_max + 1)
    plus = n[:, None] + n[None, :]
    minus = np.abs(n[:, None] - n[None, :])
    diag = minus == 0
    # at n = m the (1 - delta) Sinc term drops and delta_nm = 1 takes its place;
    # Sinc(0) = 1, so sinc_k[minus] already has the right value on the diagonal.
    bracket = (sinc_k[minus] - sinc_k[plus]) / r + l2_k[plus] - l2_k[minus]
    h = -(rho0_sq / math.pi**2) * bracket
    h[diag] += n.astype(float) ** 2
    h = 0.5 * (h + h.T)
    return HamiltonianMatrix(h, config)


def diagonalize(h, k_lowest=None):
    """Lowest ``k_lowest`` eigenpairs of the dense symmetric matrix (LAPACK).

    Orthonormality and eigen-residuals are checked after the solve; a
    violation raises :class:`ConvergenceError` with the measured values.
    """
    dim = h.dim
    k_lowest = dim if k_lowest is None else check_positive_int(k_lowest, "k_lowest")
    if k_lowest > dim:
        raise DomainError(f"k_lowest={k_lowest} exceeds matrix dimension {dim}")
    try:
        w, v = scipy.linalg.eigh(h.entries, subset_by_index=(0, k_lowest - 1), driver="evr")
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc

    scale = max(1.0, float(np.abs(h.entries).max()))
    ortho = float(np.abs(v.T @ v - np.eye(k_lowest)).max())
    resid = float(np.abs(h.entries @ v - v * w[None, :]).max()) / scale
    if ortho > 1e-8 or resid > 1e-8:
        raise ConvergenceError(
            f"eigenpairs failed post-checks (orthonormality {ortho:.3g}, residual {resid:.3g})",
            estimates=(ortho, resid))
    # fix the sign of each vector deterministically: largest component positive
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(k_lowest)])
    v = v * signs[None, :]
    return EigenSolution(w, v, h.config, {"orthonormality": ortho, "residual": resid})


def bound_states(sol):
    """Negative-energy states as records; rho_eps^2 = -(E/E0) pi^2 (eps/a)^2."""
    spec = sol.config.spec
    out = []
    for e in sol.energies:
        if e >= 0:
            break
        rho_sq = Units.rho_sq_from_e0(float(e), spec.eps_over_a)
        out.append(EigenRecord.from_rho_sq(len(out) + 1, rho_sq, spec.rho0_sq, MATRIX))
    return out


def _evaluate(vec, x_over_a):
    n = np.arange(1, vec.size + 1)
    return math.sqrt(2.0) * (np.sin(math.pi * np.outer(x_over_a, n)) @ vec)


def reconstruct_wavefunction(sol, state, grid, kind=AMPLITUDE):
    """psi_state on a grid of x/a, returned in the x/eps, sqrt(eps) psi convention.

    ``state`` is 1-based (1 = ground state). The table's ``meta`` carries the
    wall-contamination flag and the raw x/a grid.
    """
    n_avail = sol.vectors.shape[1]
    if isinstance(state, bool) or int(state) != state or not 1 <= state <= n_avail:
        raise DomainError(f"state must be in 1..{n_avail}, got {state!r}")
    x = check_grid(grid, lower=0.0, upper=1.0, name="grid (x/a)")
    r = sol.config.spec.eps_over_a
    psi = _sign_first_antinode(_evaluate(sol.vectors[:, int(state) - 1], x))
    values = math.sqrt(r) * psi
    meta = {"x_over_a": x, "wall_affected": wall_affected(sol, int(state)), "n_max": sol.config.n_max}
    if kind == DENSITY:
        values = values**2
    elif kind != AMPLITUDE:
        raise DomainError(f"unknown table kind {kind!r}")
    return WavefunctionTable(x / r, values, int(state), sol.config.spec, kind, MATRIX, meta)


def wall_affected(sol, state, n_samples=4000):
    """True when |psi| on the last 1% of the well exceeds 1e-3 max|psi|."""
    x = np.linspace(0.0, 1.0, n_samples + 1)
    psi = np.abs(_evaluate(sol.vectors[:, state - 1], x))
    edge = psi[x >= 1.0 - WALL_FRACTION]
    return bool(edge.max() > WALL_THRESHOLD * psi.max())


def count_nodes(table):
    """Strict sign changes between consecutive samples, ignoring near-zero samples."""
    if table.kind != AMPLITUDE:
        raise DomainError("node counting needs an amplitude table")
    v = table.values
    keep = np.abs(v) > NODE_NOISE * np.abs(v).max()
    s = np.sign(v[keep])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def solve(spec, n_max, k_lowest=None):
    """assemble + diagonalize in one call."""
    return diagonalize(assemble(BasisConfig(n_max, spec)), k_lowest)
