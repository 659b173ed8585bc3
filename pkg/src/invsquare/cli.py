"""Command-line front end.

    invsquare spectrum   --rho0-sq-range 1:50:1 --format json
    invsquare wavefunction --rho0-sq 50 --eps-over-a 0.1 --n-states 3
    invsquare scaling    --rho0-sq-list 50 --eps-list 0.02,0.01,0.005
    invsquare ladder     --rho0-sq-range 0.5:3:0.1 --n-states 2
    invsquare converge   --n-max-list 100,200,400,800

Exit codes: 0 success, 2 usage or invalid configuration, 3 computation failure.
"""

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__, matrix
from .analytic import (AMPLITUDE, DENSITY, PotentialSpec, analytic_wavefunction, approx_ground_energy,
                       approx_ladder, normalization_h, solve_spectrum)
from .config import build_config, parse_config_text
from .exceptions import DomainError, TruncationWarning
from .harness import collapse_metric, compare_spectra, rel_diff

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("range must be lo:hi:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("range needs step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


# flag dest -> SolverConfig key
_CONFIG_FLAGS = {
    "rho0_sq": "rho0_sq",
    "eps_over_a": "eps_over_a",
    "n_max": "n_max",
    "n_states": "n_states",
    "grid_points": "grid_points",
    "grid_max": "grid_max_x_over_eps",
    "format": "output_format",
}


def _common(p):
    p.add_argument("--rho0-sq", type=float, help="potential strength 2 m alpha / hbar^2 (default 50)")
    p.add_argument("--eps-over-a", type=float, help="cutoff ratio eps/a (default 0.001)")
    p.add_argument("--n-max", type=int, help="sine-basis size N_max (default 400)")
    p.add_argument("--n-states", type=int, help="number of bound states (default 4)")
    p.add_argument("--grid-points", type=int, help="samples per wavefunction (default 2000)")
    p.add_argument("--grid-max", type=float, help="largest x/eps sampled (default 10)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--config", metavar="PATH", help="key=value file; flags override it")
    p.add_argument("--out", metavar="PATH", help="write here instead of standard output")


def build_parser():
    parser = _Parser(prog="invsquare", description="Bound states of the cutoff -alpha/x^2 potential.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", help="analytic vs matrix rho_eps^2 over a strength sweep")
    _common(p)
    p.add_argument("--rho0-sq-range", type=_range, metavar="LO:HI:STEP")
    p.add_argument("--rho0-sq-list", type=_float_list, metavar="A,B,...")

    p = sub.add_parser("wavefunction", help="eigenfunctions from both routes")
    _common(p)
    p.add_argument("--kind", choices=(AMPLITUDE, DENSITY), default=AMPLITUDE)
    p.add_argument("--axis", choices=("x_over_eps", "x_over_a"), default="x_over_eps")

    p = sub.add_parser("scaling", help="eps-collapse of the ground-state density")
    _common(p)
    p.add_argument("--eps-list", type=_float_list, metavar="E1,E2,...")
    p.add_argument("--rho0-sq-list", type=_float_list, metavar="A,B,...")

    p = sub.add_parser("ladder", help="exact vs asymptotic energies")
    _common(p)
    p.add_argument("--rho0-sq-range", type=_range, metavar="LO:HI:STEP")
    p.add_argument("--rho0-sq-list", type=_float_list, metavar="A,B,...")

    p = sub.add_parser("converge", help="matrix results against basis size")
    _common(p)
    p.add_argument("--n-max-list", type=_int_list, metavar="N1,N2,...")
    return parser


def resolve_config(args):
    """Defaults < --config file < flags."""
    overrides = {}
    if args.config:
        try:
            with open(args.config) as fh:
                overrides.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise DomainError(f"cannot read config file: {exc}") from None
    for dest, key in _CONFIG_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = value
    return build_config(overrides)


def _strengths(args, cfg):
    for name in ("rho0_sq_range", "rho0_sq_list"):
        values = getattr(args, name, None)
        if values:
            return values
    return [cfg.rho0_sq]


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return v


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def render(columns, rows, cfg, extra=None):
    """Serialize a table: CSV with a '#' config header, or JSON {config, rows}."""
    header = dict(cfg.as_dict())
    header.update(extra or {})
    if cfg.output_format == "json":
        payload = {
            "config": {"version": __version__, **{k: _json_value(v) for k, v in header.items()}},
            "rows": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows],
        }
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# invsquare {__version__} config={json.dumps(header, default=_json_value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_num(v) for v in row])
    return buf.getvalue()


def cmd_spectrum(args, cfg):
    columns = ["rho0_sq", "n", "rho_eps_sq_analytic", "rho_eps_sq_matrix", "rel_diff", "wall_flag"]
    rows = []
    for r0 in _strengths(args, cfg):
        report = compare_spectra(PotentialSpec(r0, cfg.eps_over_a), cfg.n_states, cfg.n_max, cfg)
        if not report.ok:
            raise DomainError(report.error)
        for p in report.pairs:
            rows.append([r0, p.n, p.rho_eps_sq_analytic, p.rho_eps_sq_matrix, p.rel_diff, p.wall_affected])
    return render(columns, rows, cfg)


def cmd_wavefunction(args, cfg):
    spec = PotentialSpec(cfg.rho0_sq, cfg.eps_over_a)
    y = np.linspace(0.0, cfg.grid_max_x_over_eps, cfg.grid_points)
    records = solve_spectrum(spec, cfg.n_states, cfg)
    sol = matrix.solve(spec, cfg.n_max, min(cfg.n_states, cfg.n_max))
    columns = [args.axis]
    series = []
    flags = {}
    for rec in records:
        h = normalization_h(spec, rec, cfg.quadrature)
        series.append(analytic_wavefunction(spec, rec, y, args.kind, cfg.quadrature, h=h).values)
        columns.append(f"analytic_{rec.n}")
        tab = matrix.reconstruct_wavefunction(sol, rec.n, y * cfg.eps_over_a, args.kind)
        series.append(tab.values)
        columns.append(f"matrix_{rec.n}")
        flags[f"wall_affected_{rec.n}"] = tab.meta["wall_affected"]
    x = y if args.axis == "x_over_eps" else y * cfg.eps_over_a
    rows = [[x[i]] + [s[i] for s in series] for i in range(y.size)]
    return render(columns, rows, cfg, dict(kind=args.kind, **flags))


def cmd_scaling(args, cfg):
    eps_list = args.eps_list or [0.02, 0.01, 0.005]
    strengths = args.rho0_sq_list or [cfg.rho0_sq]
    y = np.linspace(0.0, cfg.grid_max_x_over_eps, cfg.grid_points)
    columns = ["rho0_sq", "series", "x_over_eps", "value"]
    rows = []
    for r0 in strengths:
        rep = collapse_metric(PotentialSpec(r0, eps_list[0]), eps_list, y, cfg.n_max, cfg)
        for i, xv in enumerate(y):
            rows.append([r0, "analytic", xv, rep.analytic_curve[i]])
        for eps, curve in zip(rep.epsilon_list, rep.curves):
            label = f"eps_over_a={format(eps, '.17g')}"
            rows.extend([r0, label, xv, curve[i]] for i, xv in enumerate(y))
        rows.append([r0, "max_pairwise_dev", "", rep.max_pairwise_dev])
        rows.append([r0, "max_dev_vs_analytic", "", rep.max_dev_vs_analytic])
    return render(columns, rows, cfg, {"eps_list": eps_list})


def cmd_ladder(args, cfg):
    columns = ["rho0_sq", "n", "rho_eps_sq_exact", "rho_eps_sq_asymptotic", "rel_diff",
               "ratio_exact", "ratio_asymptotic"]
    rows = []
    for r0 in _strengths(args, cfg):
        spec = PotentialSpec(r0, cfg.eps_over_a)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            exact = solve_spectrum(spec, cfg.n_states, cfg)
            e1 = approx_ground_energy(spec)
            approx = [approx_ladder(e1, rec.n) for rec in exact]
        asym_ratio = math.exp(-2.0 * math.pi / spec.g)
        for i, (rec, ap) in enumerate(zip(exact, approx)):
            a = ap.rho_eps_sq if ap is not None else math.nan
            ratio = rec.rho_eps_sq / exact[i - 1].rho_eps_sq if i else math.nan
            rows.append([r0, rec.n, rec.rho_eps_sq, a, rel_diff(rec.rho_eps_sq, a), ratio,
                         asym_ratio if i else math.nan])
    return render(columns, rows, cfg)


def cmd_converge(args, cfg):
    n_list = args.n_max_list or [100, 200, 400, 800]
    if any(n < 2 for n in n_list):
        raise UsageError("--n-max-list entries must be >= 2")
    spec = PotentialSpec(cfg.rho0_sq, cfg.eps_over_a)
    k = cfg.n_states
    columns = ["n_max", "e_over_e0_1"]
    columns += [f"rho_eps_sq_{i}" for i in range(1, k + 1)]
    columns += [f"rel_change_{i}" for i in range(1, k + 1)]
    rows = []
    prev = None
    for n in n_list:
        sol = matrix.solve(spec, n, min(k, n))
        vals = [math.nan] * k
        for rec in matrix.bound_states(sol):
            vals[rec.n - 1] = rec.rho_eps_sq
        change = [rel_diff(a, b) for a, b in zip(vals, prev)] if prev else [math.nan] * k
        rows.append([n, float(sol.energies[0])] + vals + change)
        prev = vals
    return render(columns, rows, cfg, {"n_max_list": n_list})


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "scaling": cmd_scaling,
    "ladder": cmd_ladder,
    "converge": cmd_converge,
}


def _validate(args, cfg):
    if args.command == "wavefunction":
        eps_values = [cfg.eps_over_a]
    elif args.command == "scaling":
        eps_values = args.eps_list or [0.02, 0.01, 0.005]
        if len(eps_values) < 2 or not all(0 < e < 1 for e in eps_values):
            raise UsageError("--eps-list needs at least two values in (0, 1)")
    else:
        return
    if cfg.grid_max_x_over_eps * max(eps_values) > 1.0:
        raise UsageError("--grid-max times eps/a must not exceed 1 (the well wall)")


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args)
        _validate(args, cfg)
    except (DomainError, UsageError, TypeError) as exc:
        print(f"invsquare: error: {exc}", file=stderr)
        return EXIT_USAGE
    try:
        text = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"invsquare: error: {exc}", file=stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - any solver failure maps to exit 3
        print(f"invsquare: computation failed: {exc}", file=stderr)
        return EXIT_FAILURE
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
