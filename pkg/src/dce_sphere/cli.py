"""Command-line front end.

Subcommands
-----------
map        sweep frequency-map curves (w r_i/pi vs w r_o/pi) over an abscissa grid
resonance  resonance positions and normalized intensities N/(eps varpi T)^2
particles  particle numbers for one motion specification (JSON record)
selftest   run the fast invariant suite

Data goes to ``--out`` (or stdout) as CSV with columns
``config,l,s,s_prime,x,y`` or as the equivalent JSON; floats carry 12
significant digits so identical runs produce byte-identical files.  A flat
``key = value`` config file can pre-set any flag; explicit flags win.

Exit codes: 0 success, 1 validation error, 2 numerical failure.  Set
``DCE_SPHERE_LOG`` to debug/info/warning to control log verbosity.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .bessel import evaluate as bessel_evaluate
from .coupling import _coupling_row, coupling_matrix
from .dynamics import (
    GeneralMotion,
    ResolutionError,
    SinusoidalMotion,
    detuning,
    multiplicity,
    particles_general,
    sinusoidal_spectrum,
)
from .modes import QuadratureConvergenceError, mode_inner_product, radial_modes
from .spectrum import (
    DEFAULT_TOL,
    BoundaryConfig,
    CavityGeometry,
    DegenerateRootError,
    MovingShell,
    RootSearchError,
    map_ordinate,
    solve_frequencies,
)

log = logging.getLogger(__name__)

_NUMERICAL_ERRORS = (
    RootSearchError,
    DegenerateRootError,
    QuadratureConvergenceError,
    ResolutionError,
)


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise ValidationError(message)


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"


def _parse_grid(spec: str) -> list[float]:
    try:
        a, b, step = (float(p) for p in spec.split(":"))
    except ValueError as exc:
        raise ValidationError(f"--grid expects a:b:step, got {spec!r}") from exc
    if step <= 0.0 or b < a:
        raise ValidationError("--grid needs step > 0 and b >= a")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + k * step for k in range(n)]


def make_config(bc: str, moving: str | None) -> BoundaryConfig:
    """Build a BoundaryConfig from the flag encoding, inferring the only
    admissible moving shell for mixed conditions when not given."""
    bc = bc.lower()
    if bc not in ("dd", "nd", "dn"):
        raise ValidationError(f"unknown --bc {bc!r} (choose dd, nd or dn)")
    if moving is None:
        moving = {"dd": "outer", "nd": "outer", "dn": "inner"}[bc]
    try:
        shell = MovingShell(moving.lower())
    except ValueError as exc:
        raise ValidationError(f"unknown --moving {moving!r}") from exc
    try:
        if bc == "dd":
            return BoundaryConfig.dirichlet_dirichlet(shell)
        if bc == "nd":
            if shell is not MovingShell.OUTER:
                raise ValueError
            return BoundaryConfig.neumann_inner()
        if shell is not MovingShell.INNER:
            raise ValueError
        return BoundaryConfig.neumann_outer()
    except ValueError as exc:
        raise ValidationError(
            f"bc={bc} with moving={moving} puts the Neumann condition on the "
            "moving shell; the Neumann shell must stay at rest"
        ) from exc


def _add_common(p: _Parser):
    p.add_argument("--bc", default="dd", help="boundary conditions inner->outer: dd, nd or dn")
    p.add_argument("--moving", default=None, help="which shell moves: inner or outer")
    p.add_argument("--ri", type=float, default=1.0, help="inner radius")
    p.add_argument("--ro", type=float, default=2.0, help="outer radius")
    p.add_argument("--lmax", type=int, default=0, help="largest angular index l")
    p.add_argument("--smax", type=int, default=1, help="largest radial index s")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="root-refinement tolerance")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--config", default=None, help="flat key=value file with flag defaults")


def build_parser() -> _Parser:
    parser = _Parser(prog="dce-sphere", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="frequency-map curves over an abscissa grid")
    _add_common(p_map)
    p_map.add_argument("--grid", default="0.1:3:0.1", help="abscissa grid a:b:step in w r_i/pi")

    p_res = sub.add_parser("resonance", help="resonance positions and intensities")
    _add_common(p_res)

    p_par = sub.add_parser("particles", help="particle numbers for one motion")
    _add_common(p_par)
    p_par.add_argument("--eps", type=float, default=None, help="drive amplitude epsilon")
    p_par.add_argument("--varpi", type=float, default=None, help="drive angular frequency")
    p_par.add_argument("--duration", type=float, default=None, help="drive duration T")
    p_par.add_argument("--trajectory", default=None, help="CSV file t,r,rdot for a general motion")
    p_par.add_argument("--sprime-max", type=int, default=12, help="truncation of the s' sum")

    p_self = sub.add_parser("selftest", help="run the fast invariant suite")
    p_self.add_argument("--tol", type=float, default=DEFAULT_TOL)
    # subparsers re-apply their own defaults into a fresh namespace, so config
    # file values must be installed on them directly
    parser._command_parsers = {"map": p_map, "resonance": p_res, "particles": p_par, "selftest": p_self}
    return parser


_FILE_KEYS = {
    "bc": str,
    "moving": str,
    "ri": float,
    "ro": float,
    "lmax": int,
    "smax": int,
    "tol": float,
    "format": str,
    "out": str,
    "workers": int,
    "grid": str,
    "eps": float,
    "varpi": float,
    "duration": float,
    "trajectory": str,
    "sprime_max": int,
}


def _load_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValidationError(f"{path}:{lineno}: expected key = value")
                key, _, val = line.partition("=")
                key = key.strip().replace("-", "_")
                if key not in _FILE_KEYS:
                    raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _FILE_KEYS[key](val.strip())
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    return values


def _emit(rows: list[dict], fmt: str, out_path: str | None):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["config", "l", "s", "s_prime", "x", "y"])
        for row in rows:
            writer.writerow(
                [
                    row["config"],
                    row["l"],
                    row["s"],
                    "" if row["s_prime"] is None else row["s_prime"],
                    _fmt(row["x"]),
                    _fmt(row["y"]),
                ]
            )
        text = buf.getvalue()
    else:
        clean = [
            {**row, "x": float(_fmt(row["x"])), "y": float(_fmt(row["y"]))} for row in rows
        ]
        text = json.dumps(clean, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _map_point_worker(task):
    bc, moving, l, s, x, tol = task
    config = make_config(bc, moving)
    try:
        return l, s, x, map_ordinate(config, l, s, x, tol=tol)
    except _NUMERICAL_ERRORS as exc:
        log.warning("map point l=%d s=%d x=%g failed: %s", l, s, x, exc)
        return l, s, x, None


def cmd_map(args) -> int:
    if args.smax < 1 or args.lmax < 0:
        raise ValidationError("need lmax >= 0 and smax >= 1")
    config = make_config(args.bc, args.moving)
    grid = _parse_grid(args.grid)
    tasks = [
        (args.bc, args.moving, l, s, x, args.tol)
        for l in range(args.lmax + 1)
        for s in range(1, args.smax + 1)
        for x in grid
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_map_point_worker, tasks, chunksize=8))
    else:
        results = [_map_point_worker(t) for t in tasks]
    rows = [
        {"config": config.label, "l": l, "s": s, "s_prime": None, "x": x, "y": y}
        for l, s, x, y in results
        if y is not None
    ]
    if not rows:
        raise RootSearchError("every map point failed")
    _emit(rows, args.format, args.out)
    return 0


def _resonance_series_worker(task):
    bc, moving, l, s, smax, ri, ro, tol = task
    config = make_config(bc, moving)
    geom = CavityGeometry(ri, ro)
    omegas, kernel = _coupling_row(config, l, s, smax, geom, tol=tol)
    r_b = geom.moving_radius(config)
    gap = geom.gap
    points = []
    for sp in range(1, smax + 1):
        x = (omegas[s - 1] + omegas[sp - 1]) * gap / math.pi
        y = (r_b * kernel[sp - 1]) ** 2 / 4.0
        points.append((sp, x, y))
    return l, s, points


def cmd_resonance(args) -> int:
    if args.smax < 1:
        raise ValidationError("smax must be >= 1 (0 selects no radial modes)")
    if args.lmax < 0:
        raise ValidationError("lmax must be >= 0")
    config = make_config(args.bc, args.moving)
    CavityGeometry(args.ri, args.ro)  # validate early
    tasks = [
        (args.bc, args.moving, l, s, args.smax, args.ri, args.ro, args.tol)
        for l in range(args.lmax + 1)
        for s in range(1, args.smax + 1)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_resonance_series_worker, tasks, chunksize=1))
    else:
        results = [_resonance_series_worker(t) for t in tasks]
    rows = [
        {"config": config.label, "l": l, "s": s, "s_prime": sp, "x": x, "y": y}
        for l, s, points in results
        for sp, x, y in points
    ]
    _emit(rows, args.format, args.out)
    return 0


def _load_trajectory(path: str) -> GeneralMotion:
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise ValidationError(f"cannot read trajectory {path}: {exc}") from exc
    for col in ("t", "r", "rdot"):
        if data.dtype.names is None or col not in data.dtype.names:
            raise ValidationError(f"trajectory file needs columns t,r,rdot (missing {col})")
    return GeneralMotion(t=data["t"], r=data["r"], rdot=data["rdot"])


def cmd_particles(args) -> int:
    if args.smax < 1 or args.lmax < 0:
        raise ValidationError("need lmax >= 0 and smax >= 1")
    config = make_config(args.bc, args.moving)
    geom = CavityGeometry(args.ri, args.ro)
    l_values = list(range(args.lmax + 1))
    s_values = list(range(1, args.smax + 1))
    params = {
        "command": "particles",
        "bc": args.bc,
        "moving": args.moving or config.moving_shell.value,
        "ri": args.ri,
        "ro": args.ro,
        "lmax": args.lmax,
        "smax": args.smax,
        "tol": args.tol,
        "sprime_max": args.sprime_max,
    }
    diagnostics: dict = {}
    if args.trajectory:
        motion = _load_trajectory(args.trajectory)
        params["trajectory"] = args.trajectory
        method = "general"
        values = {
            (l, s): particles_general(
                config, l, s, motion, geom, s_max=args.sprime_max, tol=args.tol
            )
            for l in l_values
            for s in s_values
        }
    else:
        for name in ("eps", "varpi", "duration"):
            if getattr(args, name) is None:
                raise ValidationError(f"--{name} is required for a sinusoidal motion")
        params.update(eps=args.eps, varpi=args.varpi, duration=args.duration)
        motion = SinusoidalMotion(
            epsilon=args.eps,
            varpi=args.varpi,
            duration=args.duration,
            r_beta0=geom.moving_radius(config),
        )
        method = "perturbative"
        spectrum = sinusoidal_spectrum(
            config, l_values, s_values, motion, geom, s_max=args.sprime_max, tol=args.tol
        )
        values = dict(spectrum.values)
        diagnostics = spectrum.diagnostics
    record = {
        "params": params,
        "method": method,
        "results": [
            {
                "l": l,
                "s": s,
                "n_per_mode": float(_fmt(values[(l, s)])),
                "n_times_multiplicity": float(_fmt(multiplicity(l) * values[(l, s)])),
            }
            for l in l_values
            for s in s_values
        ],
        "diagnostics": diagnostics,
    }
    text = json.dumps(record, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ----------------------------------------------------------------------
# selftest


def _check_wronskian():
    rng = np.random.default_rng(7)
    worst = 0.0
    for l in (0, 3, 12, 30):
        for x in 10.0 ** rng.uniform(-3, 4, 40):
            be = bessel_evaluate(l, x)
            worst = max(worst, abs((be.j * be.np - be.jp * be.n) * x * x - 1.0))
    return worst < 1e-12, f"max Wronskian deviation {worst:.2e}"


def _check_dd_spacing():
    geom = CavityGeometry(1.0, 2.0)
    config = BoundaryConfig.dirichlet_dirichlet()
    freqs = solve_frequencies(config, 0, 6, geom)
    worst = max(abs(f.omega / (f.s * math.pi) - 1.0) for f in freqs)
    return worst < 1e-10, f"max deviation from s*pi/gap: {worst:.2e}"


def _check_map_points():
    pts = [
        (make_config("dd", None), 1, 1, 1.0, 2.04904),
        (make_config("nd", None), 0, 1, 1.0, 1.59809),
        (make_config("dn", None), 0, 1, 1.0, 1.43030),
    ]
    worst = max(abs(map_ordinate(c, l, s, x) - y) for c, l, s, x, y in pts)
    return worst < 2e-3, f"max map deviation {worst:.2e}"


def _check_orthonormality():
    worst = 0.0
    geom = CavityGeometry(1.0, 2.0)
    for config, l in ((make_config("dd", None), 2), (make_config("nd", None), 1)):
        modes = radial_modes(config, l, 4, geom)
        for a in modes:
            for b in modes:
                target = 1.0 if a.s == b.s else 0.0
                worst = max(worst, abs(mode_inner_product(a, b) - target))
    return worst < 1e-8, f"max orthonormality deviation {worst:.2e}"


def _check_domega_fd():
    worst = 0.0
    for config in (make_config("dd", None), make_config("dn", None)):
        geom = CavityGeometry(1.0, 2.0)
        mode = solve_frequencies(config, 1, 2, geom)[1]
        h = 1e-6 * geom.moving_radius(config)
        w_p = solve_frequencies(config, 1, 2, geom.with_moving_radius(config, geom.moving_radius(config) + h))[1].omega
        w_m = solve_frequencies(config, 1, 2, geom.with_moving_radius(config, geom.moving_radius(config) - h))[1].omega
        fd = (w_p - w_m) / (2.0 * h)
        worst = max(worst, abs(mode.domega_dr_beta / fd - 1.0))
    return worst < 1e-6, f"max implicit-vs-FD deviation {worst:.2e}"


def _check_detuning():
    config = make_config("dd", None)
    geom = CavityGeometry(1.0, 2.0)
    w_sum = 2.0 * math.pi  # l=0, s=s'=1
    T = 4.0 * math.pi / w_sum  # w_sum*T = 4*pi: counter-rotating term vanishes
    f_res = detuning(0, 1, 1, w_sum, T, config, geom).value
    f_zero = detuning(0, 1, 1, 0.0, 2.0 * math.pi / w_sum, config, geom).value
    ok = abs(f_res - 1.0) < 1e-12 and abs(f_zero) < 1e-12
    return ok, f"f(resonance)={f_res:.3g}, f(varpi=0)={abs(f_zero):.3g}"


def _check_resonance_values():
    config = make_config("dd", None)
    geom = CavityGeometry(1.0, 2.0)
    _, kernel = _coupling_row(config, 0, 1, 2, geom)
    vals = (geom.r_o * kernel) ** 2 / 4.0
    worst = max(abs(vals[0] - 0.25), abs(vals[1] - 2.0 / 9.0))
    return worst < 1e-9, f"first DD intensities off by {worst:.2e}"


def _check_scaling():
    lam = 3.7
    config = make_config("nd", None)
    g1 = CavityGeometry(1.0, 2.0)
    g2 = CavityGeometry(lam, 2.0 * lam)
    w1 = solve_frequencies(config, 1, 1, g1)[0].omega
    w2 = solve_frequencies(config, 1, 1, g2)[0].omega
    c1 = coupling_matrix(config, 1, 2, g1).symmetrized(1, 2)
    c2 = coupling_matrix(config, 1, 2, g2).symmetrized(1, 2)
    ok = abs(w2 * lam / w1 - 1.0) < 1e-10 and abs(c2 / c1 - 1.0) < 1e-8
    return ok, f"omega scale dev {abs(w2 * lam / w1 - 1.0):.2e}, C dev {abs(c2 / c1 - 1.0):.2e}"


_SELFTESTS = [
    ("bessel-wronskian", _check_wronskian),
    ("dd-equal-spacing", _check_dd_spacing),
    ("frequency-map-points", _check_map_points),
    ("mode-orthonormality", _check_orthonormality),
    ("frequency-derivative-fd", _check_domega_fd),
    ("detuning-limits", _check_detuning),
    ("resonance-intensities", _check_resonance_values),
    ("dimensional-scaling", _check_scaling),
]


def cmd_selftest(_args) -> int:
    failures = 0
    for name, check in _SELFTESTS:
        try:
            ok, detail = check()
        except Exception as exc:  # selftest must report, not crash
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1
    return 0 if failures == 0 else 2


def main(argv=None) -> int:
    level = os.environ.get("DCE_SPHERE_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            defaults = _load_config_file(args.config)
            for sub in parser._command_parsers.values():
                sub.set_defaults(**defaults)
            args = parser.parse_args(argv)
        handler = {
            "map": cmd_map,
            "resonance": cmd_resonance,
            "particles": cmd_particles,
            "selftest": cmd_selftest,
        }[args.command]
        return handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
