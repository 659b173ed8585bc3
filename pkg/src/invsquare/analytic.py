"""Analytic route: matching inner sine and outer sqrt(rho) K_{ig}(rho) solutions.

Eigenvalues are returned as the dimensionless rho_eps^2 = -E rho0^2 eps^2 / alpha,
which depends on rho0^2 only. The cutoff eps enters only through unit
conversions (see :class:`Units`).
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import specfun
from ._validation import check_eps_over_a, check_grid, check_positive_int, check_rho0_sq
from .config import SolverConfig
from .exceptions import DomainError, TruncationWarning

ANALYTIC = "analytic"
MATRIX = "matrix"
ASYMPTOTIC = "asymptotic"
METHODS = (ANALYTIC, MATRIX, ASYMPTOTIC)

AMPLITUDE = "amplitude"
DENSITY = "density"

# Smallest rho_eps^2 reported; deeper ladder members underflow.
UNDERFLOW_RHO_SQ = 1e-280

_SCAN_BATCH = 48


@dataclass(frozen=True)
class PotentialSpec:
    """Truncated potential: strength rho0^2 = 2 m alpha / hbar^2 and cutoff ratio eps/a."""

    rho0_sq: float
    eps_over_a: float = 0.001

    def __post_init__(self):
        object.__setattr__(self, "rho0_sq", check_rho0_sq(self.rho0_sq, bound=False))
        object.__setattr__(self, "eps_over_a", check_eps_over_a(self.eps_over_a))

    @property
    def rho0(self):
        return math.sqrt(self.rho0_sq)

    @property
    def order(self):
        return specfun.ImagOrder.from_rho0_sq(self.rho0_sq)

    @property
    def g(self):
        return self.order.g


class Units:
    """Conversions between rho_eps^2 and energies.

    Two energy units are used: alpha/eps^2 (natural for the analytic route)
    and E0 = hbar^2 pi^2 / (2 m a^2), the ground level of the embedding well.
    """

    @staticmethod
    def alpha_units(rho_eps_sq, rho0_sq):
        """E / (alpha / eps^2)."""
        return -rho_eps_sq / rho0_sq

    @staticmethod
    def e0_units(rho_eps_sq, eps_over_a):
        """E / E0."""
        return -rho_eps_sq / (math.pi**2 * eps_over_a**2)

    @staticmethod
    def rho_sq_from_e0(e_over_e0, eps_over_a):
        return -e_over_e0 * math.pi**2 * eps_over_a**2

    @staticmethod
    def rho_sq_from_alpha(e_over_alpha, rho0_sq):
        return -e_over_alpha * rho0_sq


@dataclass(frozen=True)
class EigenRecord:
    n: int
    rho_eps_sq: float
    q_eps: float
    g: float
    method: str = ANALYTIC

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")

    @classmethod
    def from_rho_sq(cls, n, rho_eps_sq, rho0_sq, method):
        g = math.sqrt(rho0_sq - 0.25) if rho0_sq > 0.25 else 0.0
        q_eps = math.sqrt(max(rho0_sq - rho_eps_sq, 0.0))
        return cls(int(n), float(rho_eps_sq), q_eps, g, method)

    @property
    def rho0_sq(self):
        return self.g * self.g + 0.25

    @property
    def rho_eps(self):
        return math.sqrt(self.rho_eps_sq)

    def energy_alpha_units(self):
        return Units.alpha_units(self.rho_eps_sq, self.rho0_sq)

    def energy_e0_units(self, eps_over_a):
        return Units.e0_units(self.rho_eps_sq, eps_over_a)


@dataclass(frozen=True)
class WavefunctionTable:
    """Sampled wavefunction in cutoff-scaled units.

    ``grid`` holds x/eps; ``values`` holds sqrt(eps) psi (amplitude) or
    eps |psi|^2 (density). Both are independent of eps for a given rho0^2.
    """

    grid: np.ndarray
    values: np.ndarray
    n: int
    spec: PotentialSpec
    kind: str = AMPLITUDE
    method: str = ANALYTIC
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (AMPLITUDE, DENSITY):
            raise DomainError(f"unknown table kind {self.kind!r}")
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.shape != values.shape or grid.ndim != 1:
            raise DomainError("grid and values must be 1-d arrays of equal length")
        if not np.all(np.isfinite(values)):
            raise DomainError("wavefunction values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def density(self):
        if self.kind == DENSITY:
            return self
        return WavefunctionTable(self.grid, self.values**2, self.n, self.spec,
                                 DENSITY, self.method, dict(self.meta))

    def captured_probability(self):
        """Trapezoid integral of the density over the table (in x/eps)."""
        return float(np.trapezoid(self.density().values, self.grid))


def _config(cfg):
    return SolverConfig() if cfg is None else cfg


def _q_eps(rho0_sq, rho_eps):
    return math.sqrt(rho0_sq - rho_eps * rho_eps)


def matching_residual(spec, rho_eps, q=None):
    """Cross-multiplied matching condition at x = eps.

    G = q_eps cos(q_eps) K - sin(q_eps) (K/2 + rho_eps K'), evaluated at
    rho_eps with q_eps = sqrt(rho0^2 - rho_eps^2). Its zeros are the bound
    state eigenvalues; unlike the tan form it has no poles.
    """
    rho0_sq = check_rho0_sq(spec.rho0_sq)
    rho_eps = float(rho_eps)
    if not 0.0 < rho_eps < math.sqrt(rho0_sq):
        raise DomainError(f"rho_eps must lie in (0, rho0), got {rho_eps!r}")
    k, dk = specfun.bessel_k_im_pair(spec.order, rho_eps, q)
    qe = _q_eps(rho0_sq, rho_eps)
    return qe * math.cos(qe) * k - math.sin(qe) * (0.5 * k + rho_eps * dk)


def _reduced_residual(g, rho0_sq, rho, q):
    """e^rho G / q_eps, vectorized over rho.

    Dividing by q_eps removes the trivial zero at rho = rho0 (where the
    inner solution vanishes identically); the e^rho scaling keeps values
    representable for large rho0. Neither changes the sign of G.
    """
    rho = np.asarray(rho, dtype=float)
    k, dk = specfun.bessel_k_im_scaled(g, rho, q, with_deriv=True)
    qe = np.sqrt(rho0_sq - rho * rho)
    # sin(q)/q evaluated stably near q = 0
    return np.cos(qe) * k - specfun.sinc(qe) * (0.5 * k + rho * dk)


def _scan_points(rho0_sq, g):
    """Descending rho values that bracket every root of the residual.

    Two grids are merged: steps of pi/(8g) in ln rho (eight samples per
    asymptotic root period) and steps of pi/16 in q_eps, which resolves the
    inner sine near rho0 where ln rho barely moves.
    """
    rho0 = math.sqrt(rho0_sq)
    top = rho0 * (1.0 - 1e-9)
    q_top = math.sqrt(rho0_sq - top * top)
    n_q = int(math.ceil((rho0 - q_top) / (math.pi / 16.0))) + 1
    q_grid = np.linspace(q_top, rho0, n_q, endpoint=False)
    rho_q = np.sqrt(rho0_sq - q_grid**2)

    step = math.pi / (8.0 * g)
    s = math.log(top)
    s_floor = 0.5 * math.log(UNDERFLOW_RHO_SQ)
    head = rho_q[rho_q > 0]
    lowest_q = head.min()
    s_points = []
    while s > math.log(lowest_q):
        s_points.append(math.exp(s))
        s -= step
    merged = np.unique(np.concatenate([head, s_points]))[::-1]
    yield from merged
    while s >= s_floor:
        yield math.exp(s)
        s -= step


def _batched(iterable, size):
    batch = []
    for item in iterable:
        batch.append(item)
        if len(batch) == size:
            yield batch
            batch = []
    if batch:
        yield batch


def solve_spectrum(spec, n_states, cfg=None):
    """The ``n_states`` deepest bound states, n = 1 (largest rho_eps) first.

    Roots of the matching residual are bracketed by a downward scan in
    ln rho_eps and refined with Brent's method to ``cfg.root_tol`` relative
    in rho_eps^2. If the ladder reaches rho_eps^2 < 1e-280 before
    ``n_states`` roots are found, the representable prefix is returned and a
    :class:`TruncationWarning` is issued.
    """
    cfg = _config(cfg)
    rho0_sq = check_rho0_sq(spec.rho0_sq)
    n_states = check_positive_int(n_states, "n_states")
    g = specfun.ImagOrder.from_rho0_sq(rho0_sq).g
    q = cfg.quadrature

    def f(s):
        return float(_reduced_residual(g, rho0_sq, math.exp(s), q))

    records = []
    prev_rho, prev_val = None, None
    for batch in _batched(_scan_points(rho0_sq, g), _SCAN_BATCH):
        vals = _reduced_residual(g, rho0_sq, np.array(batch), q)
        for rho, val in zip(batch, vals):
            if prev_val is not None and (val == 0.0 or np.sign(val) != np.sign(prev_val)):
                if val == 0.0:
                    root_s = math.log(rho)
                else:
                    root_s = brentq(f, math.log(rho), math.log(prev_rho),
                                    xtol=0.5 * cfg.root_tol, rtol=4 * np.finfo(float).eps)
                rho_sq = math.exp(2.0 * root_s)
                records.append(EigenRecord.from_rho_sq(len(records) + 1, rho_sq, rho0_sq, ANALYTIC))
                if len(records) == n_states:
                    return records
                # restart sign tracking just below an exact zero
                if val == 0.0:
                    prev_rho, prev_val = None, None
                    continue
            prev_rho, prev_val = rho, val
    warnings.warn(
        f"only {len(records)} of {n_states} states representable for rho0_sq={rho0_sq} "
        f"(rho_eps^2 < {UNDERFLOW_RHO_SQ:g})", TruncationWarning, stacklevel=2)
    return records


def _ground_phase(rho0, g, phi0):
    """Branch of arctan(g t / (1 - t/2)), t = tan(rho0)/rho0, for the ground state.

    Every branch (principal value + m pi) solves the small-argument matching
    condition; successive m give successive ladder members. The ground state
    is the deepest one that still lies above the potential floor, i.e. the
    largest m with rho_eps^2 < rho0^2. Just above threshold this is m = -1,
    and on rho0 < pi/2 -> rho0 > pi/2 the choice steps to m = 0 exactly where
    the principal value jumps by -pi, so the result is continuous there.
    """
    t = math.tan(rho0) / rho0
    principal = math.atan2(g * t, 1.0 - 0.5 * t)
    # 4 exp(2 (phi0 + principal + m pi) / g) < rho0^2
    bound = 0.5 * g * math.log(rho0 * rho0 / 4.0) - phi0 - principal
    m = math.ceil(bound / math.pi) - 1
    return principal + m * math.pi


def approx_ground_energy(spec):
    """Small-argument estimate of the ground state.

    rho_eps,1^2 = 4 exp{(2/g) [phi(0) + arctan(g t / (1 - t/2))]} with
    t = tan(rho0)/rho0. See :func:`_ground_phase` for the branch choice.
    """
    rho0_sq = check_rho0_sq(spec.rho0_sq)
    g = specfun.ImagOrder.from_rho0_sq(rho0_sq).g
    phi0 = specfun.arg_gamma(0, g)
    phase = phi0 + _ground_phase(math.sqrt(rho0_sq), g, phi0)
    rho_sq = 4.0 * math.exp(2.0 * phase / g)
    return EigenRecord.from_rho_sq(1, rho_sq, rho0_sq, ASYMPTOTIC)


def approx_ladder(e1, n):
    """Geometric continuation E_n = E_1 exp(-2 pi (n-1) / g)."""
    if e1.n != 1:
        raise DomainError("approx_ladder needs the ground-state record (n=1)")
    n = check_positive_int(n, "n")
    if n == 1:
        return e1
    log_ratio = -2.0 * math.pi * (n - 1) / e1.g
    rho_sq = e1.rho_eps_sq * math.exp(log_ratio)
    if rho_sq < UNDERFLOW_RHO_SQ:
        warnings.warn(f"ladder state n={n} underflows (rho_eps^2 < {UNDERFLOW_RHO_SQ:g})",
                      TruncationWarning, stacklevel=2)
        return None
    return EigenRecord.from_rho_sq(n, rho_sq, e1.rho0_sq, ASYMPTOTIC)


def _check_record(spec, record, method=ANALYTIC):
    if record.method != method:
        raise DomainError(f"expected a {method} eigen record, got {record.method!r}")
    if not math.isclose(record.rho0_sq, spec.rho0_sq, rel_tol=1e-12):
        raise DomainError(
            f"record belongs to rho0_sq={record.rho0_sq!r}, spec has {spec.rho0_sq!r}")


def _inner_norm(qe):
    # int_0^1 sin^2(q y) dy / sin^2(q)
    return (0.5 - math.sin(2.0 * qe) / (4.0 * qe)) / math.sin(qe) ** 2


def _outer_integrand(g, rho, y, q):
    """y K^2(rho y) / K^2(rho) in a form free of underflow."""
    k_ref = specfun.bessel_k_im_scaled(g, rho, q)
    k = specfun.bessel_k_im_scaled(g, rho * y, q)
    return y * (k / k_ref) ** 2 * np.exp(-2.0 * rho * (y - 1.0))


def normalization_h(spec, record, q=None):
    """h_n(rho0): squared norm of the unnormalized piecewise wavefunction (in x/eps).

    The outer integral int_1^inf y K^2(rho y) / K^2(rho) dy is done in
    ln y on Gauss-Legendre panels, truncated where the bound
    |K_{ig}(x)| <= sqrt(pi / 2x) e^{-x} puts the remaining tail below
    rel_tol of the inner part.
    """
    _check_record(spec, record)
    q = specfun.DEFAULT_QUADRATURE if q is None else q
    g, rho, qe = record.g, record.rho_eps, record.q_eps
    inner = _inner_norm(qe)

    k_ref = specfun.bessel_k_im_scaled(g, rho, q)
    target = q.rel_tol * inner
    # pi e^{-2 rho (Y-1)} / (4 rho^2 Ks^2) <= target
    excess = 0.5 * math.log(math.pi / (4.0 * rho * rho * k_ref * k_ref * target))
    y_max = 1.0 + max(excess, 1.0) / rho
    y_max = min(y_max, 740.0 / rho)
    u_max = math.log(y_max)

    width = min(0.25, math.pi / (8.0 * g))
    n_panels = max(4, int(math.ceil(u_max / width)))

    def panel_sum(n_panels):
        u, w = specfun._panel_nodes(n_panels)
        y = np.exp(u * u_max)
        return float(np.sum(_outer_integrand(g, rho, y, q) * y * w) * u_max)

    prev = panel_sum(n_panels)
    for _ in range(int(q.max_subdivisions)):
        n_panels *= 2
        cur = panel_sum(n_panels)
        if abs(cur - prev) <= q.rel_tol * abs(cur) + q.abs_tol:
            return inner + cur
        prev = cur
    raise specfun.ConvergenceError("normalization integral did not converge", estimates=(prev, cur))


def _sign_first_antinode(values):
    """Flip the sign so the first interior local maximum of |psi| is positive."""
    mag = np.abs(values)
    if mag.size == 0 or mag.max() == 0:
        return values
    floor = 1e-6 * mag.max()
    for i in range(mag.size):
        if mag[i] > floor and (i + 1 == mag.size or mag[i] >= mag[i + 1]):
            return values if values[i] > 0 else -values
    return values


def analytic_wavefunction(spec, record, grid, kind=AMPLITUDE, q=None, h=None):
    """Normalized eigenfunction sqrt(eps) psi_n (or eps |psi_n|^2) on a grid of x/eps.

    Inner region: sin(q_eps y)/sin(q_eps); outer region: sqrt(y) K(rho y)/K(rho),
    both divided by sqrt(h_n). ``h`` may be passed to skip recomputing it.
    """
    _check_record(spec, record)
    if kind not in (AMPLITUDE, DENSITY):
        raise DomainError(f"unknown table kind {kind!r}")
    y = check_grid(grid, lower=0.0, name="grid (x/eps)")
    if h is None:
        h = normalization_h(spec, record, q)
    g, rho, qe = record.g, record.rho_eps, record.q_eps

    vals = np.empty_like(y)
    inside = y < 1.0
    vals[inside] = np.sin(qe * y[inside]) / math.sin(qe)
    out = ~inside
    if out.any():
        yo = y[out]
        k_ref = specfun.bessel_k_im_scaled(g, rho, q)
        k = specfun.bessel_k_im_scaled(g, rho * yo, q)
        vals[out] = np.sqrt(yo) * (k / k_ref) * np.exp(-rho * (yo - 1.0))
    vals = _sign_first_antinode(vals / math.sqrt(h))
    if kind == DENSITY:
        vals = vals**2
    return WavefunctionTable(y, vals, record.n, spec, kind, ANALYTIC, {"h_n": h})


def effective_strength_2d(ell):
    """Coefficient (l^2 - 1/4) of (hbar^2/2m)/r^2 in the 2-d radial equation."""
    ell = int(ell)
    return ell * ell - 0.25
