"""Special functions for the cutoff inverse-square problem.

Everything here is double precision and written from scratch: the modified
Bessel function of imaginary order K_{ig}(x) and its derivatives (via the
real integral representation), its small-argument form, arg Gamma(1+k+ig),
Sinc, the sine integral Si, and the potential integral L2(n, rho) that
appears in the sine-basis matrix elements.

All functions are pure; nothing is cached between calls.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import BelowThresholdError, ConvergenceError, DomainError

EULER_GAMMA = 0.57721566490153286061

# Gauss-Legendre rule on [0, 1] used for every quadrature panel.
_GL_NODES = 16
_gl_x, _gl_w = np.polynomial.legendre.leggauss(_GL_NODES)
_GL_U = 0.5 * (_gl_x + 1.0)
_GL_W = 0.5 * _gl_w
del _gl_x, _gl_w

# Rows of x evaluated together; bounds the size of the node matrix.
_X_CHUNK = 128


@dataclass(frozen=True)
class ImagOrder:
    """Imaginary Bessel order nu = i*g, stored as g >= 0."""

    g: float

    def __post_init__(self):
        g = float(self.g)
        if not math.isfinite(g) or g < 0.0:
            raise DomainError(f"imaginary order g must be finite and >= 0, got {self.g!r}")
        object.__setattr__(self, "g", g)

    @classmethod
    def from_rho0_sq(cls, rho0_sq):
        """g = sqrt(rho0^2 - 1/4); only defined above the critical strength."""
        rho0_sq = float(rho0_sq)
        if not rho0_sq > 0.25:
            raise BelowThresholdError(
                f"rho0_sq={rho0_sq!r} is below critical strength 1/4; no imaginary order")
        return cls(math.sqrt(rho0_sq - 0.25))

    @property
    def rho0_sq(self):
        return self.g * self.g + 0.25


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_subdivisions: int = 60

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be > 0")
        if not self.abs_tol >= 0:
            raise DomainError("abs_tol must be >= 0")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def _as_order(order):
    if isinstance(order, ImagOrder):
        return order.g
    return ImagOrder(order).g


def _truncation_point(x, abs_tol):
    # e^{-x cosh T} < abs_tol, plus a safety margin of 5 in t.
    log_inv = -math.log(max(abs_tol, np.finfo(float).tiny))
    return np.arccosh(np.maximum(2.0, log_inv / x)) + 5.0


def _panel_nodes(n_panels):
    edges = np.arange(n_panels, dtype=float)[:, None]
    u = ((edges + _GL_U[None, :]) / n_panels).ravel()
    w = np.tile(_GL_W / n_panels, n_panels)
    return u, w


def _k_panel_sums(g, x, T, n_panels, powers, scaled):
    """Gauss-Legendre sums of e^{-x cosh t} cosh^p(t) cos(g t) over [0, T(x)].

    Returns (values, l1) with shape (len(powers), len(x)); ``l1`` is the same
    rule applied to the absolute integrand, used as the error scale.
    """
    u, w = _panel_nodes(n_panels)
    out = np.empty((len(powers), x.size))
    l1 = np.empty_like(out)
    for lo in range(0, x.size, _X_CHUNK):
        xs = x[lo:lo + _X_CHUNK, None]
        Ts = T[lo:lo + _X_CHUNK, None]
        t = Ts * u[None, :]
        ch = np.cosh(t)
        expo = -xs * (ch - 1.0) if scaled else -xs * ch
        base = np.exp(expo) * (Ts * w[None, :])
        osc = np.cos(g * t)
        for i, p in enumerate(powers):
            f = base * ch**p if p else base
            out[i, lo:lo + _X_CHUNK] = (f * osc).sum(axis=1)
            l1[i, lo:lo + _X_CHUNK] = f.sum(axis=1)
    return out, l1


def _k_integrals(g, x, q, powers=(0,), scaled=False):
    """Adaptive evaluation of int_0^inf e^{-x cosh t} cosh^p t cos(g t) dt.

    The panel count is doubled until two successive estimates agree to
    rel_tol relative to the L1 norm of the integrand (K itself passes through
    zero, so a pure relative test on the value cannot be met near its zeros).
    ``scaled`` multiplies the result by e^x.
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    if flat.size == 0:
        return np.empty((len(powers),) + x.shape)
    if not np.all(flat > 0) or not np.all(np.isfinite(flat)):
        raise DomainError("Bessel argument x must be finite and > 0")
    q = DEFAULT_QUADRATURE if q is None else q
    T = _truncation_point(flat, q.abs_tol)
    width = 0.5 if g <= 0 else min(0.5, math.pi / (8.0 * g))
    n_panels = max(4, int(math.ceil(T.max() / width)))

    prev, _ = _k_panel_sums(g, flat, T, n_panels, powers, scaled)
    for _ in range(int(q.max_subdivisions)):
        n_panels *= 2
        cur, l1 = _k_panel_sums(g, flat, T, n_panels, powers, scaled)
        err = np.abs(cur - prev)
        if np.all(err <= q.rel_tol * l1 + q.abs_tol):
            return cur.reshape((len(powers),) + x.shape)
        prev = cur
    bad = int(np.argmax(err - q.rel_tol * l1))
    raise ConvergenceError(
        f"K_ig quadrature did not converge (g={g}, x={flat[bad]}) after "
        f"{q.max_subdivisions} refinements",
        estimates=(float(prev[0, bad]), float(cur[0, bad])),
    )


def _scalar_or_array(value, x):
    return float(value) if np.ndim(x) == 0 else value


def bessel_k_im(order, x, q=None):
    """Modified Bessel function K_{ig}(x) for real g >= 0 and x > 0.

    Uses K_{ig}(x) = int_0^inf exp(-x cosh t) cos(g t) dt, which is real for
    real g. Accepts scalar or array ``x``.
    """
    g = _as_order(order)
    return _scalar_or_array(_k_integrals(g, x, q, (0,))[0], x)


def bessel_k_im_deriv(order, x, q=None, n=1):
    """n-th derivative of K_{ig} in x by differentiating under the integral.

    d^n/dx^n K_{ig}(x) = (-1)^n int_0^inf exp(-x cosh t) cosh^n(t) cos(g t) dt.
    """
    if n not in (1, 2):
        raise DomainError("only first and second derivatives are provided")
    g = _as_order(order)
    val = _k_integrals(g, x, q, (n,))[0]
    return _scalar_or_array(-val if n == 1 else val, x)


def bessel_k_im_scaled(order, x, q=None, with_deriv=False):
    """e^x K_{ig}(x) (and e^x K'_{ig}(x) when ``with_deriv``), free of underflow."""
    g = _as_order(order)
    if with_deriv:
        k, d = _k_integrals(g, x, q, (0, 1), scaled=True)
        return _scalar_or_array(k, x), _scalar_or_array(-d, x)
    return _scalar_or_array(_k_integrals(g, x, q, (0,), scaled=True)[0], x)


def bessel_k_im_pair(order, x, q=None):
    """(K_{ig}(x), K'_{ig}(x)) from a single pass over the quadrature nodes."""
    g = _as_order(order)
    k, d = _k_integrals(g, x, q, (0, 1))
    return _scalar_or_array(k, x), _scalar_or_array(-d, x)


def digamma_int(m):
    """psi(m) for integer m >= 1: -gamma + H_{m-1}."""
    m = int(m)
    if m < 1:
        raise DomainError("digamma_int needs a positive integer")
    return -EULER_GAMMA + math.fsum(1.0 / j for j in range(1, m))


def arg_gamma(k, order):
    """Continuous argument of Gamma(1 + k + i g).

    phi(k) = g psi(1+k) + sum_{n>=0} [g/(1+k+n) - arctan(g/(1+k+n))]

    The sum is done explicitly up to a cutoff M and the remainder is added as
    its integral plus Euler-Maclaurin end corrections, which keeps the
    truncation error well below 1e-12 for the g values of interest.
    """
    k = int(k)
    if k < 0:
        raise DomainError("arg_gamma needs k >= 0")
    g = _as_order(order)
    if g == 0.0:
        return 0.0
    start = 1 + k
    M = start + 200 + int(20 * g)
    m = np.arange(start, M, dtype=float)
    head = math.fsum(g / m - np.arctan(g / m))

    c = g / M
    # int_M^inf (g/m - arctan(g/m)) dm in closed form; the series form
    # avoids cancellation when c is small.
    if c < 1e-2:
        integral = g * (c**2 / 6.0 - c**4 / 20.0 + c**6 / 42.0)
    else:
        integral = g * (math.atan(c) / c + 0.5 * math.log1p(c * c) - 1.0)
    f_M = g / M - math.atan(c)
    df_M = -(g**3) / (M * M * (M * M + g * g))
    tail = integral + 0.5 * f_M - df_M / 12.0
    return g * digamma_int(start) + head + tail


def bessel_k_im_smallx(order, x):
    """Leading small-argument form of K_{ig}(x).

    -sqrt(2 pi g e^{-pi g} / (1 - e^{-2 pi g})) (1/g) sin(g ln(x/2) - phi(0)).
    At g = 0 the g -> 0 limit -(ln(x/2) + gamma) is returned.
    """
    g = _as_order(order)
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        raise DomainError("x must be > 0")
    if g == 0.0:
        val = -(np.log(x / 2.0) + EULER_GAMMA)
    else:
        amp = math.sqrt(2.0 * math.pi * g * math.exp(-math.pi * g) / -math.expm1(-2.0 * math.pi * g)) / g
        val = -amp * np.sin(g * np.log(x / 2.0) - arg_gamma(0, g))
    return float(val) if val.ndim == 0 else val


def sinc(z):
    """sin(z)/z with Sinc(0) = 1."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    z2 = z * z
    out = np.where(small, 1.0 - z2 / 6.0 + z2 * z2 / 120.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def _si_series(z):
    term = z
    total = z
    z2 = z * z
    k = 0
    while True:
        k += 1
        term *= -z2 / ((2 * k) * (2 * k + 1))
        add = term / (2 * k + 1)
        total += add
        if abs(add) <= 1e-17 * abs(total):
            return total


def _si_auxiliary(z):
    """Auxiliary functions (f, g) with Si(z) = pi/2 - f cos z - g sin z.

    Evaluated from the continued fraction for E1(iz) with the modified Lentz
    algorithm; converges to full precision for z > 2.
    """
    tiny = 1e-300
    b = complex(1.0, z)
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < 1e-16:
            return -h.imag, h.real
    raise ConvergenceError(f"Si continued fraction failed at z={z}")


def _sine_integral_scalar(z):
    z = float(z)
    if z < 0 or not math.isfinite(z):
        raise DomainError("sine_integral needs finite z >= 0")
    if z == 0.0:
        return 0.0
    if z <= 6.0:
        return _si_series(z)
    f, g = _si_auxiliary(z)
    return math.pi / 2.0 - f * math.cos(z) - g * math.sin(z)


def sine_integral(z):
    """Si(z) = int_0^z sin(t)/t dt for z >= 0 (series to 6, auxiliary functions beyond)."""
    if np.ndim(z) == 0:
        return _sine_integral_scalar(z)
    return np.vectorize(_sine_integral_scalar, otypes=[float])(z)


def l2_integral(n, rho):
    """L2(n, rho) = int_rho^1 (1 - cos(n pi y)) / y^2 dy, via the sine integral."""
    rho = float(rho)
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho must lie in (0, 1], got {rho!r}")
    n = abs(int(n))
    if n == 0:
        return 0.0
    a = n * math.pi
    # 1 - cos(a rho) = 2 sin^2(a rho / 2) avoids cancellation for small a rho.
    inner = 2.0 * math.sin(0.5 * a * rho) ** 2 / rho
    outer = 1.0 - (-1.0) ** n
    return inner - outer + a * (_sine_integral_scalar(a) - _sine_integral_scalar(a * rho))
