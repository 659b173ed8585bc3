"""Solver configuration: the single home of every numeric knob."""

import dataclasses
from dataclasses import dataclass, field

from .exceptions import DomainError
from .specfun import QuadratureSpec

OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class SolverConfig:
    root_tol: float = 1e-12
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    n_max: int = 400
    eps_over_a: float = 0.001
    rho0_sq: float = 50.0
    n_states: int = 4
    grid_points: int = 2000
    grid_max_x_over_eps: float = 10.0
    output_format: str = "csv"

    def __post_init__(self):
        if not 0 < self.root_tol < 1:
            raise DomainError("root_tol must lie in (0, 1)")
        if int(self.n_max) < 2:
            raise DomainError("n_max must be >= 2")
        if not 0 < self.eps_over_a < 1:
            raise DomainError("eps_over_a must lie in (0, 1)")
        if int(self.n_states) < 1:
            raise DomainError("n_states must be >= 1")
        if int(self.grid_points) < 2:
            raise DomainError("grid_points must be >= 2")
        if not self.grid_max_x_over_eps > 0:
            raise DomainError("grid_max_x_over_eps must be > 0")
        if self.output_format not in OUTPUT_FORMATS:
            raise DomainError(f"output_format must be one of {OUTPUT_FORMATS}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        """Flat, ordered mapping used for CSV/JSON headers."""
        d = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, QuadratureSpec):
                for qf in dataclasses.fields(v):
                    d[f"quadrature.{qf.name}"] = getattr(v, qf.name)
            else:
                d[f.name] = v
        return d


_INT_KEYS = {"n_max", "n_states", "grid_points", "quadrature.max_subdivisions"}
_STR_KEYS = {"output_format"}


def parse_config_text(text):
    """Parse ``key = value`` lines (``#`` comments allowed) into typed overrides.

    Keys use the same names as :meth:`SolverConfig.as_dict`; dashes are
    accepted in place of underscores.
    """
    known = set(SolverConfig().as_dict())
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise DomainError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _STR_KEYS:
                out[key] = value
            else:
                out[key] = float(value)
        except ValueError:
            raise DomainError(f"config line {lineno}: bad value for {key!r}: {value!r}") from None
    return out


def build_config(overrides=None, base=None):
    """Apply flat overrides (as produced by :func:`parse_config_text`) to a config."""
    base = SolverConfig() if base is None else base
    overrides = dict(overrides or {})
    quad = {k.split(".", 1)[1]: overrides.pop(k) for k in list(overrides) if k.startswith("quadrature.")}
    if quad:
        overrides["quadrature"] = dataclasses.replace(base.quadrature, **quad)
    return dataclasses.replace(base, **overrides)
