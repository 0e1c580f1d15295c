"""Command-line interface.

    pitchfork equilibria --model normal2d --param a=3 --box=-2,5,-2,5
    pitchfork sweep --model normal2d --param-name a --range 0.5:1.5:0.01 \\
        --box=-1.5,1.5,-1.5,1.5 --format svg --out pitchfork.svg
    pitchfork toggle-compare --m 2 --grid=-1,1,-1,1 --density 21

Exit status: 0 on success, 1 when an analysis fails (the report is still
written), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .bifurcation import (
    analyse,
    assemble_branches,
    family,
    isocline_sample,
    param_grid,
    sweep,
)
from .emit import emit_csv, emit_json, emit_svg_diagram, emit_svg_isoclines
from .equilibria import closed_form_equilibria
from .fields import MODEL_IDS, Box, DomainError, ModelError, make_model
from .flow import integrate, uniformity_probe
from .index import verify_ph
from .stability import classify, complex_transition_threshold, spectrum
from .toggle import correspondence_residual


TRANSITION_NOTE = (
    "bisection on the discriminant of the flanking Jacobian; exact value sqrt(5) - 1. "
    "The eigenvalue formula -1 +/- sqrt(1 - (a - 1)(a + 3)) is the consistent one; "
    "writing +3 where -3 belongs would move the threshold to sqrt(7) - 1"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- argument types --------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("values must be finite")
    return vals


def _box(text: str) -> Box:
    try:
        return Box.from_flat(_floats(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("range must be lo:hi:step")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if not (lo < hi and step > 0):
        raise argparse.ArgumentTypeError("range needs lo < hi and step > 0")
    return lo, hi, step


def _assignment(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {name} needs a numeric value") from None


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


# --- parser ----------------------------------------------------------------


def _model_flags(p, params=True):
    p.add_argument("--model", required=True, choices=MODEL_IDS, help="registry model id")
    if params:
        p.add_argument(
            "--param", action="append", type=_assignment, default=[], metavar="NAME=VALUE",
            help="model parameter (repeatable)",
        )


def _output_flags(p, formats, default):
    p.add_argument("--format", choices=formats, default=default, help=f"output format (default {default})")
    p.add_argument("--out", type=Path, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pitchfork", description="Pitchfork bifurcation analysis toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="key=value file pre-populating flags (argv wins)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("equilibria", help="locate and classify equilibria in a box")
    _model_flags(p)
    p.add_argument("--box", type=_box, required=True, help="xlo,xhi[,ylo,yhi]")
    p.add_argument("--grid", type=int, default=25, help="Newton seeds per axis (default 25)")
    p.add_argument("--tol", type=_positive, default=1e-10, help="residual tolerance (default 1e-10)")
    p.add_argument("--nonnegative", action="store_true", help="drop equilibria with a negative coordinate")
    _output_flags(p, ("csv", "json"), "csv")

    p = sub.add_parser("stability", help="spectrum and class of the Jacobian at a point")
    _model_flags(p)
    p.add_argument("--point", type=_floats, help="x[,y]")
    p.add_argument("--hyperbolicity-tol", type=_positive, default=1e-9)
    p.add_argument(
        "--threshold", action="store_true",
        help="report where the flanking normal-form eigenvalues become complex",
    )
    _output_flags(p, ("csv", "json"), "csv")

    p = sub.add_parser("index", help="Poincare-Hopf index sum vs winding number on a box")
    _model_flags(p)
    p.add_argument("--box", type=_box, required=True, help="xlo,xhi,ylo,yhi")
    p.add_argument("--samples", type=int, default=64, help="boundary samples per edge (default 64)")
    p.add_argument("--grid", type=int, default=25)
    p.add_argument("--tol", type=_positive, default=1e-10)
    _output_flags(p, ("json", "csv"), "json")

    p = sub.add_parser("sweep", help="equilibria over a parameter range, assembled into branches")
    _model_flags(p)
    p.add_argument("--param-name", required=True, help="parameter to sweep")
    p.add_argument("--range", type=_range, required=True, help="lo:hi:step")
    p.add_argument("--box", type=_box, required=True, help="xlo,xhi[,ylo,yhi]")
    p.add_argument("--grid", type=int, default=25)
    p.add_argument("--tol", type=_positive, default=1e-10)
    p.add_argument("--coord", type=int, default=0, help="state coordinate drawn in the SVG (default 0)")
    _output_flags(p, ("csv", "json", "svg"), "csv")

    p = sub.add_parser("simulate", help="integrate one trajectory with RK4")
    _model_flags(p)
    p.add_argument("--x0", type=_floats, required=True, help="initial point x[,y]")
    p.add_argument("--t-end", type=_positive, default=50.0)
    p.add_argument("--dt", type=_positive, default=0.01)
    _output_flags(p, ("csv", "json"), "csv")

    p = sub.add_parser("isoclines", help="the two isoclines of the normal form")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--range", type=_floats, default=[-1.5, 2.5], help="lo,hi for both axes")
    p.add_argument("--count", type=int, default=201)
    _output_flags(p, ("svg", "csv", "json"), "svg")

    p = sub.add_parser("toggle-compare", help="shifted quadratic toggle surrogate vs normal form")
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--grid", type=_box, default=Box((-1.0, -1.0), (1.0, 1.0)), help="ulo,uhi,vlo,vhi")
    p.add_argument("--density", type=int, default=21)
    p.add_argument("--threshold", type=_positive, default=1e-12, help="residual regarded as zero")
    _output_flags(p, ("text", "json"), "text")

    p = sub.add_parser("uniformity", help="probe a fixed ball around an equilibrium branch")
    _model_flags(p)
    p.add_argument("--param-name", required=True)
    p.add_argument("--values", type=_floats, required=True, help="comma-separated parameter values")
    p.add_argument("--branch", type=_floats, required=True, help="branch equilibrium x[,y]")
    p.add_argument("--radius", type=_positive, default=0.25)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--tol", type=_positive, default=1e-3)
    p.add_argument("--t-max", type=_positive, default=200.0)
    p.add_argument("--dt", type=_positive, default=0.01)
    _output_flags(p, ("json",), "json")
    return parser


# --- config file -------------------------------------------------------------


def _split_config(argv: list[str]) -> tuple[list[str], Path | None]:
    rest, path = [], None
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            path = Path(next(it, ""))
        elif tok.startswith("--config="):
            path = Path(tok.split("=", 1)[1])
        else:
            rest.append(tok)
    return rest, path


def read_config(path: Path) -> list[str]:
    """``key = value`` lines as ``--key=value`` tokens; ``#`` starts a comment."""
    tokens = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}: expected key=value, got {line!r}")
        key, value = key.strip(), value.strip()
        tokens.append(f"--{key}" if value.lower() == "true" else f"--{key}={value}")
    return tokens


def _inject_config(argv: list[str]) -> list[str]:
    argv, path = _split_config(argv)
    if path is None:
        return argv
    try:
        tokens = read_config(path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for i, tok in enumerate(argv):
        if not tok.startswith("-"):
            return argv[: i + 1] + tokens + argv[i + 1:]
    return argv + tokens


# --- commands ------------------------------------------------------------------


def _model(args):
    return make_model(args.model, dict(args.param))


def _primary_param(model) -> float:
    return next(iter(model.params.values()))


def _eq_row(param, point, cls, eigs):
    row = [param, *point, cls.kind]
    for ev in eigs:
        row += [ev.real, ev.imag]
    return row + [cls.sign_det]


def _eq_header(dim):
    coords = ["x", "y"][:dim] if dim <= 2 else [f"x{i}" for i in range(dim)]
    eig = [f"eig{i + 1}_{part}" for i in range(dim) for part in ("re", "im")]
    return ["param", *coords, "class", *eig, "sign_det"]


def _eq_json(point, cls, eigs):
    return {
        "point": list(point),
        "class": cls.kind,
        "unstable_count": cls.unstable_count,
        "sign_det": cls.sign_det,
        "eigenvalues": [[ev.real, ev.imag] for ev in eigs],
    }


def cmd_equilibria(args):
    model = _model(args)
    if args.box.dim != model.dim:
        raise UsageError(f"--box has dimension {args.box.dim}, model {args.model} needs {model.dim}")
    recs = analyse(model, args.box, args.grid, args.tol, args.nonnegative)
    p = _primary_param(model)
    if args.format == "csv":
        return emit_csv(_eq_header(model.dim), (_eq_row(p, r.point, r.classification, r.eigenvalues) for r in recs)), 0
    return emit_json({
        "command": "equilibria",
        "model": args.model,
        "params": dict(model.params),
        "box": list(args.box.flat()),
        "equilibria": [_eq_json(r.point, r.classification, r.eigenvalues) for r in recs],
    }), 0


def cmd_stability(args):
    model = _model(args)
    if args.threshold:
        value = complex_transition_threshold()
        payload = {
            "command": "stability",
            "complex_transition_threshold": value,
            "golden_form": math.sqrt(5.0) - 1.0,
            "note": TRANSITION_NOTE,
        }
        if args.format == "csv":
            return emit_csv(["complex_transition_threshold", "sqrt5_minus_1"], [[value, math.sqrt(5.0) - 1.0]]), 0
        return emit_json(payload), 0
    if args.point is None:
        raise UsageError("stability needs --point (or --threshold)")
    jac = model.jacobian(args.point)
    cls = classify(jac, args.hyperbolicity_tol)
    eigs = spectrum(jac).eigenvalues
    if args.format == "csv":
        header = _eq_header(model.dim) + ["unstable_count"]
        return emit_csv(header, [_eq_row(_primary_param(model), args.point, cls, eigs) + [cls.unstable_count]]), 0
    return emit_json({
        "command": "stability",
        "model": args.model,
        "params": dict(model.params),
        "jacobian": jac.tolist(),
        **_eq_json(args.point, cls, eigs),
    }), 0


def cmd_index(args):
    model = _model(args)
    if model.dim != 2 or args.box.dim != 2:
        raise UsageError("index needs a 2D model and a 2D box")
    report = verify_ph(model, args.box, args.samples, args.grid, args.tol)
    status = 0 if report.ok else 1
    d = report.to_dict()
    if args.format == "csv":
        header = ["inward", "violations", "ph_sum", "winding", "agree"]
        return emit_csv(header, [[d[k] for k in header]]), status
    return emit_json({"command": "index", "model": args.model, "params": dict(model.params), **d}), status


def cmd_sweep(args):
    fixed = dict(args.param)
    fixed.pop(args.param_name, None)
    fam = family(args.model, args.param_name, **fixed)
    probe = fam(args.range[0])
    if args.box.dim != probe.dim:
        raise UsageError(f"--box has dimension {args.box.dim}, model {args.model} needs {probe.dim}")
    records = sweep(fam, param_grid(*args.range), args.box, args.grid, args.tol)
    branches = assemble_branches(records)
    if args.format == "svg":
        if not 0 <= args.coord < probe.dim:
            raise UsageError("--coord out of range")
        title = f"{args.model}: equilibria vs {args.param_name}"
        return emit_svg_diagram(branches, args.param_name, args.coord, title), 0
    branch_of = {}
    for bi, br in enumerate(branches):
        for p, pt in zip(br.params, br.points):
            branch_of[(p, pt)] = bi
    if args.format == "csv":
        header = _eq_header(probe.dim) + ["branch"]
        rows = (
            _eq_row(rec.param, eq.point, eq.classification, eq.eigenvalues) + [branch_of[(rec.param, eq.point)]]
            for rec in records
            for eq in rec.equilibria
        )
        return emit_csv(header, rows), 0
    return emit_json({
        "command": "sweep",
        "model": args.model,
        "param_name": args.param_name,
        "fixed_params": fixed,
        "records": [
            {
                "param": rec.param,
                "equilibria": [
                    {**_eq_json(eq.point, eq.classification, eq.eigenvalues), "branch": branch_of[(rec.param, eq.point)]}
                    for eq in rec.equilibria
                ],
            }
            for rec in records
        ],
        "branches": [
            {"params": br.params, "points": [list(p) for p in br.points], "classes": br.kinds, "ambiguous": br.ambiguous}
            for br in branches
        ],
    }), 0


def cmd_simulate(args):
    model = _model(args)
    if len(args.x0) != model.dim:
        raise UsageError(f"--x0 needs {model.dim} coordinates")
    traj = integrate(model, args.x0, args.t_end, args.dt)
    status = 1 if traj.diverged else 0
    if args.format == "csv":
        header = ["t", *(["x", "y"][: model.dim])]
        return emit_csv(header, ([float(t), *map(float, s)] for t, s in zip(traj.times, traj.states))), status
    return emit_json({
        "command": "simulate",
        "model": args.model,
        "params": dict(model.params),
        "diverged": traj.diverged,
        "times": [float(t) for t in traj.times],
        "states": traj.states.tolist(),
    }), status


def cmd_isoclines(args):
    if len(args.range) != 2 or not args.range[0] < args.range[1]:
        raise UsageError("--range needs lo,hi with lo < hi")
    if args.count < 2:
        raise UsageError("--count must be >= 2")
    lo, hi = args.range
    x_iso, y_iso = isocline_sample(args.a, (lo, hi), (lo, hi), args.count)
    model = make_model("normal2d", {"a": args.a})
    marks = []
    for eq in closed_form_equilibria(args.a):
        if all(lo <= c <= hi for c in eq.location):
            kind = "degenerate" if eq.degenerate else classify(model.jacobian(eq.location)).kind
            marks.append((eq.location, kind))
    if args.format == "svg":
        return emit_svg_isoclines(x_iso, y_iso, marks, f"isoclines, a = {args.a:g}"), 0
    if args.format == "csv":
        rows = [["dx=0", float(x), float(y)] for x, y in x_iso] + [["dy=0", float(x), float(y)] for x, y in y_iso]
        return emit_csv(["curve", "x", "y"], rows), 0
    return emit_json({
        "command": "isoclines",
        "a": args.a,
        "x_isocline": x_iso.tolist(),
        "y_isocline": y_iso.tolist(),
        "equilibria": [{"point": list(p), "class": k} for p, k in marks],
    }), 0


def cmd_toggle_compare(args):
    if args.density < 2:
        raise UsageError("--density must be >= 2")
    if args.m < 0:
        raise UsageError("--m must be >= 0")
    res = correspondence_residual(args.grid, args.density, args.m, args.a)
    status = 0 if res <= args.threshold else 1
    if args.format == "json":
        return emit_json({
            "command": "toggle-compare",
            "m": args.m,
            "a": args.a,
            "grid": list(args.grid.flat()),
            "density": args.density,
            "max_residual": res,
            "within_threshold": res <= args.threshold,
        }), status
    return f"max_residual={res:.17g}\n".encode("ascii"), status


def cmd_uniformity(args):
    fixed = dict(args.param)
    fixed.pop(args.param_name, None)
    report = uniformity_probe(
        args.model, fixed, args.param_name, args.values, args.branch,
        args.radius, args.samples, args.tol, args.t_max, args.dt,
    )
    return emit_json({"command": "uniformity", "model": args.model, **report.to_dict()}), 0


COMMANDS = {
    "equilibria": cmd_equilibria,
    "stability": cmd_stability,
    "index": cmd_index,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "isoclines": cmd_isoclines,
    "toggle-compare": cmd_toggle_compare,
    "uniformity": cmd_uniformity,
}


def run(argv: list[str] | None = None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout if stdout is not None else sys.stdout.buffer
    try:
        args = build_parser().parse_args(_inject_config(argv))
        payload, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"pitchfork: error: {exc}", file=sys.stderr)
        return 2
    except (ModelError, DomainError) as exc:
        print(f"pitchfork: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"pitchfork: analysis failed: {exc}", file=sys.stderr)
        return 1
    if args.out is not None:
        try:
            args.out.write_bytes(payload)
        except OSError as exc:
            print(f"pitchfork: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        stdout.write(payload)
        stdout.flush()
    return status


def main() -> None:
    sys.exit(run())
