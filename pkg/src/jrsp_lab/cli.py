"""Command-line front end: ``jrsp-lab {fidelity,optimize,sweep,fig5,verify}``.

Precedence is flags > ``--config`` file (``key = value`` lines) > defaults.
Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from . import __version__, analytic, averaging, optimize
from .analytic import NoisePair
from .averaging import McSpec, QuadratureSpec
from .noise import NoiseKind, NoiseScenario
from .protocol import ControlParams
from .verify import run_checks

PROG = "jrsp-lab"
# light to dark over [2/5, 1]; classical cells stay white
RAMP_LIGHT = (222, 235, 247)
RAMP_DARK = (8, 48, 107)
_BOOL_FLAGS = ("pre_x", "deg")
_PATH_KEYS = ("out", "svg", "config")


class UsageError(Exception):
    pass


# --- config handling -------------------------------------------------------------


def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def flags_hash(command: str, args: argparse.Namespace) -> str:
    """Short digest of every resolved flag except file locations."""
    items = {k: v for k, v in vars(args).items() if k not in _PATH_KEYS and k != "func"}
    items["command"] = command
    blob = json.dumps(items, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def header_line(command: str, args: argparse.Namespace) -> str:
    return f"# {PROG} v{__version__} {command} {flags_hash(command, args)}"


# --- output helpers ---------------------------------------------------------------


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def atomic_write(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".jrsp-", dir=directory)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise UsageError(f"cannot write {path}: {exc}") from exc


def ramp_color(f: float) -> str:
    if f <= analytic.CLASSICAL_LIMIT:
        return "#ffffff"
    t = min(1.0, (f - analytic.CLASSICAL_LIMIT) / (1 - analytic.CLASSICAL_LIMIT))
    rgb = (round(lo + t * (hi - lo)) for lo, hi in zip(RAMP_LIGHT, RAMP_DARK))
    return "#" + "".join(f"{c:02x}" for c in rgb)


def sweep_svg(grid: optimize.SweepGrid, header: str, cell_px: int = 6) -> str:
    """pa runs left to right, pc bottom to top."""
    n = grid.n
    size = n * cell_px
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f"<!-- {header[2:]} -->",
        f"<title>{grid.pair} pre_x={str(grid.pre_x).lower()}</title>",
    ]
    for i in range(n):
        for j in range(n):
            cell = grid.cell(i, j)
            color = ramp_color(cell.f_opt) if cell.quantum else "#ffffff"
            y = (n - 1 - j) * cell_px
            parts.append(
                f'<rect x="{i * cell_px}" y="{y}" width="{cell_px}" height="{cell_px}" fill="{color}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def sweep_csv(grid: optimize.SweepGrid, header: str) -> str:
    lines = [header, "pa,pc,f_opt,theta_opt,xi_opt,quantum"]
    for c in grid.cells:
        lines.append(
            ",".join(
                [fmt(c.pa), fmt(c.pc), fmt(c.f_opt), fmt(c.theta_opt), fmt(c.xi_opt), str(c.quantum).lower()]
            )
        )
    return "\n".join(lines) + "\n"


# --- argument validation ------------------------------------------------------------


def _strength(name, value):
    if not 0.0 <= value <= 1.0:
        raise UsageError(f"--{name} must lie in [0, 1], got {value}")


def _angles(args):
    theta, xi = args.theta, args.xi
    if args.deg:
        theta, xi = math.radians(theta), math.radians(xi)
    for name, v in (("theta", theta), ("xi", xi)):
        if not math.isfinite(v):
            raise UsageError(f"--{name} must be finite")
    return theta, xi


def _pair(args) -> NoisePair:
    try:
        return NoisePair(NoiseKind.parse(args.alpha), NoiseKind.parse(args.gamma))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _positive(name, value, minimum=1):
    if value < minimum:
        raise UsageError(f"--{name.replace('_', '-')} must be at least {minimum}")


# --- commands -------------------------------------------------------------------------


def cmd_fidelity(args) -> int:
    pair = _pair(args)
    _strength("pa", args.pa)
    _strength("pc", args.pc)
    _positive("n_eta", args.n_eta)
    _positive("n_phi", args.n_phi)
    _positive("samples", args.samples, 2)
    theta, xi = _angles(args)
    engines = ("analytic", "quadrature", "mc") if args.engine == "all" else (args.engine,)
    if "analytic" in engines and pair.alpha is not NoiseKind.BitFlip:
        raise UsageError("the analytic engine covers alpha = B only at arbitrary (theta, xi)")

    scenario = NoiseScenario(pair.alpha, args.pa, pair.gamma, args.pc, args.pre_x)
    controls = ControlParams(theta, xi)
    qspec = QuadratureSpec(args.n_eta, args.n_phi)
    start = time.perf_counter()
    results = {}
    if "analytic" in engines:
        a, c = analytic.effective_strengths(pair, args.pa, args.pc, args.pre_x)
        results["analytic"] = analytic.general_fidelity_B_row(pair.gamma, a, c, theta, xi)
    if "quadrature" in engines:
        results["quadrature"] = averaging.averaged_fidelity_quadrature(scenario, controls, qspec)
    if "mc" in engines:
        mean, se = averaging.averaged_fidelity_mc(scenario, controls, McSpec(args.samples, args.seed))
        results["mc"] = mean
        results["mc_stderr"] = se
    record = {
        "schema": header_line("fidelity", args)[2:],
        "pair": str(pair),
        "pa": args.pa,
        "pc": args.pc,
        "theta": theta,
        "xi": xi,
        "pre_x": args.pre_x,
        "engine": args.engine,
        "fidelity": results,
        "orders": {"n_eta": args.n_eta, "n_phi": args.n_phi, "eta_rule": qspec.eta_rule},
        "seed": args.seed,
        "samples": args.samples,
        "rng": averaging.RNG_NAME,
        "wall_time_s": time.perf_counter() - start,
    }
    print(json.dumps(record, indent=2))
    return 0


def cmd_optimize(args) -> int:
    pair = _pair(args)
    _strength("pa", args.pa)
    _strength("pc", args.pc)
    _positive("grid", args.grid, 2)
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    start = time.perf_counter()
    config = optimize.OptimizerConfig(grid=args.grid, tol=args.tol)
    record = {"schema": header_line("optimize", args)[2:], "pair": str(pair), "pa": args.pa,
              "pc": args.pc, "pre_x": args.pre_x, "engine": args.engine}
    if args.engine in ("analytic", "both"):
        a, c = analytic.effective_strengths(pair, args.pa, args.pc, args.pre_x)
        params = analytic.optimal_params(pair, a, c)
        record["analytic"] = {
            "f_opt": analytic.optimal_fidelity(pair, a, c),
            "theta_opt": params.theta_opt,
            "xi_opt": params.xi_opt,
            "branch": params.branch_note.value,
        }
    if args.engine in ("numeric", "both"):
        scen = NoiseScenario(pair.alpha, args.pa, pair.gamma, args.pc, args.pre_x)
        res = optimize.numeric_optimize(scen, config)
        record["numeric"] = {"f_opt": res.fidelity, "theta_opt": res.theta, "xi_opt": res.xi}
    best = max(v["f_opt"] for k, v in record.items() if k in ("analytic", "numeric"))
    record["quantum"] = best > analytic.CLASSICAL_LIMIT
    record["wall_time_s"] = time.perf_counter() - start
    print(json.dumps(record, indent=2))
    return 0


def _run_sweep(pair, args) -> optimize.SweepGrid:
    config = optimize.OptimizerConfig(grid=args.grid, tol=args.tol)
    ps = optimize.lattice(args.n)
    cells = [(float(a), float(c)) for a in ps for c in ps]
    job = partial(_cell_job, pair, args.pre_x, args.engine, config)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            # map preserves submission order, so rows stay pa-major
            results = list(pool.map(job, cells, chunksize=max(1, len(cells) // (4 * args.workers))))
    else:
        results = [job(pc) for pc in cells]
    return optimize.SweepGrid(pair, args.pre_x, args.n, args.engine, results)


def _cell_job(pair, pre_x, engine, config, point):
    return optimize.sweep_cell(pair, point[0], point[1], pre_x, engine, config)


def cmd_sweep(args) -> int:
    pair = _pair(args)
    _positive("n", args.n, 2)
    _positive("workers", args.workers)
    header = header_line("sweep", args)
    grid = _run_sweep(pair, args)
    text = sweep_csv(grid, header)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        atomic_write(args.out, text)
    if args.svg:
        atomic_write(args.svg, sweep_svg(grid, header))
    return 0


def cmd_fig5(args) -> int:
    _positive("n", args.n, 2)
    header = header_line("fig5", args)
    curves = optimize.fig5_curves(args.n)
    lines = [header, "pA,f_A0_opt,f_AA_opt,f_AA_fixed"]
    for row in zip(curves.p, curves.f_a0_opt, curves.f_aa_opt, curves.f_aa_fixed):
        lines.append(",".join(fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    sidecar = {
        "schema": header[2:],
        "crossing_pA": curves.crossing,
        "description": "f_AA_opt > f_A0_opt for every pA beyond crossing_pA",
        "f_AA_fixed_le_f_AA_opt": bool(all(curves.f_aa_fixed <= curves.f_aa_opt + 1e-12)),
        "f_AA_opt_min": float(curves.f_aa_opt.min()),
    }
    if args.out == "-":
        sys.stdout.write(text)
        print(json.dumps(sidecar, indent=2))
        return 0
    atomic_write(args.out, text)
    atomic_write(sidecar_path(args.out), json.dumps(sidecar, indent=2) + "\n")
    return 0


def sidecar_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".crossing.json"


def cmd_verify(args) -> int:
    results = run_checks(seed=args.seed)
    print(header_line("verify", args))
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failing checks: " + ", ".join(failed))
        return 1
    return 0


# --- parser ---------------------------------------------------------------------------


def _add_pair(p):
    p.add_argument("--alpha", default="B", help="noise on Alice's route: B, P, A or D")
    p.add_argument("--gamma", default="B", help="noise on Charlie's route: B, P, A or D")
    p.add_argument("--pa", type=float, default=0.0, help="strength on Alice's route")
    p.add_argument("--pc", type=float, default=0.0, help="strength on Charlie's route")
    p.add_argument("--pre-x", action="store_true", help="apply X before bit-flip routes")


def _add_optimizer(p):
    p.add_argument("--grid", type=int, default=25, help="coarse grid points per axis")
    p.add_argument("--tol", type=float, default=1e-6, help="parameter tolerance of the refinement")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="ensemble-averaged fidelity at given (theta, xi)")
    p.add_argument("--config", help="key = value file; flags take precedence")
    _add_pair(p)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--xi", type=float, default=math.pi / 4)
    p.add_argument("--deg", action="store_true", help="read --theta and --xi in degrees")
    p.add_argument("--engine", choices=("analytic", "quadrature", "mc", "all"), default="quadrature")
    p.add_argument("--n-eta", type=int, default=10, help="quadrature order per amplitude angle")
    p.add_argument("--n-phi", type=int, default=10, help="quadrature order per phase")
    p.add_argument("--samples", type=int, default=20000, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("optimize", help="optimal fidelity and control parameters")
    p.add_argument("--config")
    _add_pair(p)
    _add_optimizer(p)
    p.add_argument("--engine", choices=optimize.ENGINES, default="both")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="phase diagram over the (pa, pc) lattice as CSV")
    p.add_argument("--config")
    p.add_argument("--alpha", default="B")
    p.add_argument("--gamma", default="B")
    p.add_argument("--pre-x", action="store_true")
    p.add_argument("--n", type=int, default=101, help="lattice points per axis")
    p.add_argument("--engine", choices=optimize.ENGINES, default="analytic")
    _add_optimizer(p)
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--svg", help="optional SVG heatmap path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fig5", help="amplitude-damping comparison curves as CSV")
    p.add_argument("--config")
    p.add_argument("--n", type=int, default=101, help="points on [0, 1]")
    p.add_argument("--out", default="-", help="CSV path; the crossing goes to <stem>.crossing.json")
    p.set_defaults(func=cmd_fig5)

    p = sub.add_parser("verify", help="run the cross-check suite")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def _apply_config(parser, argv):
    """Re-parse with config values installed as subcommand defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        if key not in known or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        choices = known[key].choices
        if choices is not None and value not in choices:
            raise UsageError(f"config {key} = {value!r} is not one of {', '.join(choices)}")
        defaults[key] = _parse_bool(value) if key in _BOOL_FLAGS else value
    sub.set_defaults(**defaults)
    try:
        return parser.parse_args(argv)
    finally:
        sub.set_defaults(**{k: known[k].default for k in defaults})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
