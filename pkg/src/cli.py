from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Sequence, TextIO

import numpy as np

from src import geometry, symmetry, witness
from src.config import MIN_CURVE_SAMPLES, Config
from src.errors import DomainError, MatrixFileError, ValidationError
from src.linalg import DIM, expectation, make_density_matrix
from src.models import DensityMatrix, MixingLine, SloccClass, SymCoords, Witness
from src.plot import PlotOverlays, area_self_check, render_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DOMAIN = 2
EXPECTATION_TOLERANCE = 1e-12

_CLASS_BY_OPTION = {
    "entanglement": SloccClass.BISEPARABLE,
    "genuine": SloccClass.W,
    "ghz": SloccClass.GHZ,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise ValidationError(f"{self.prog}: {message}")


# MatrixFile I/O


def load_matrix_file(path: Path) -> tuple[DensityMatrix, str | None]:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(document, dict) or "matrix" not in document:
        raise MatrixFileError(f"{path}: expected an object with key 'matrix'")
    label = document.get("label")
    if label is not None and not isinstance(label, str):
        raise MatrixFileError(f"{path}: 'label' must be a string")

    rows = document["matrix"]
    if not isinstance(rows, list) or len(rows) != DIM or any(not isinstance(r, list) or len(r) != DIM for r in rows):
        raise MatrixFileError(f"{path}: 'matrix' must be an 8x8 array of [re, im] pairs")
    entries = np.empty((DIM, DIM), dtype=np.complex128)
    for i, row in enumerate(rows):
        for j, pair in enumerate(row):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or any(isinstance(part, bool) or not isinstance(part, (int, float)) for part in pair)
            ):
                raise MatrixFileError(f"{path}: entry [{i}][{j}] must be a [re, im] pair of numbers, got {pair!r}")
            entries[i, j] = complex(pair[0], pair[1])
    return make_density_matrix(entries), label


def write_matrix_file(path: Path, rho: DensityMatrix, label: str | None = None) -> None:
    document: dict[str, Any] = {
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix],
    }
    if label is not None:
        document["label"] = label
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")


# argument types


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected decimal X,Y, got {text!r}") from None


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected A,B,C, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), float(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected decimal A,B,C, got {text!r}") from None


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghz-witness", description="GHZ-symmetric three-qubit states: classes and optimal witnesses")
    sub = parser.add_subparsers(dest="command", required=True)

    twirl = sub.add_parser("twirl", help="coordinates and class of the GHZ-symmetrized state")
    twirl.add_argument("input", type=Path, help="MatrixFile (JSON)")
    twirl.add_argument("--samples", type=_non_negative_int, default=None, help="Monte-Carlo group elements (0 = exact)")
    twirl.add_argument("--seed", type=_non_negative_int, default=None)

    classify = sub.add_parser("classify", help="SLOCC class of a point of the triangle")
    classify.add_argument("--x", type=float, required=True)
    classify.add_argument("--y", type=float, required=True)

    optimal = sub.add_parser("witness-optimal", help="optimal witness for a noise/target mixing line")
    noise = optimal.add_mutually_exclusive_group()
    noise.add_argument("--noise", type=Path, help="noise MatrixFile (default: white noise)")
    noise.add_argument("--noise-x", type=float)
    optimal.add_argument("--noise-y", type=float)
    target = optimal.add_mutually_exclusive_group()
    target.add_argument("--target", type=Path, help="target MatrixFile (default: GHZ+ corner)")
    target.add_argument("--target-x", type=float)
    optimal.add_argument("--target-y", type=float)
    optimal.add_argument("--class", dest="target_class", choices=sorted(_CLASS_BY_OPTION), default="ghz")

    evaluate = sub.add_parser("witness-eval", help="expectation value of a GHZ-symmetric witness")
    evaluate.add_argument("--a", type=float, required=True)
    evaluate.add_argument("--b", type=float, required=True)
    evaluate.add_argument("--c", type=float, required=True)
    state = evaluate.add_mutually_exclusive_group(required=True)
    state.add_argument("--state", type=Path, help="MatrixFile (JSON)")
    state.add_argument("--x", type=float)
    evaluate.add_argument("--y", type=float)

    boundary = sub.add_parser("boundary", help="sample the GHZ/W boundary curve")
    boundary.add_argument("--samples", type=_non_negative_int, default=101)
    boundary.add_argument("--format", choices=("csv", "json"), default="csv")
    boundary.add_argument("--out", type=Path, default=None)

    plot = sub.add_parser("plot", help="SVG diagram of the triangle and its class regions")
    plot.add_argument("--out", type=Path, required=True)
    plot.add_argument("--state", type=Path, action="append", default=[], help="MatrixFile marker (repeatable)")
    plot.add_argument("--point", type=_pair, action="append", default=[], metavar="X,Y")
    plot.add_argument("--witness", type=_triple, action="append", default=[], metavar="A,B,C")
    plot.add_argument("--pseudo-pure", action="store_true", help="draw the white-noise line to GHZ+")
    plot.add_argument("--curve-samples", type=_non_negative_int, default=None)
    return parser


# helpers


def _coords(x: float | None, y: float | None, flag: str, config: Config) -> SymCoords:
    if (x is None) != (y is None):
        raise ValidationError(f"--{flag}-x and --{flag}-y must be given together")
    return geometry.snap_to_triangle(SymCoords(float(x), float(y)), config.coord_snap)  # type: ignore[arg-type]


def _coords_from_file(path: Path, config: Config) -> tuple[SymCoords, str | None]:
    rho, label = load_matrix_file(path)
    return geometry.snap_to_triangle(symmetry.twirl_coordinates(rho), config.coord_snap), label


def _point_report(c: SymCoords | None) -> dict[str, float] | None:
    return None if c is None else {"x": c.x, "y": c.y}


def _witness_report(w: Witness) -> dict[str, float]:
    return {"a": w.a, "b": w.b, "c": w.c}


def _class_report(c: SymCoords) -> dict[str, Any]:
    return {
        "x": c.x,
        "y": c.y,
        "class": geometry.classify(c).label,
        "ppt": geometry.is_ppt(c),
        "full_rank": geometry.is_full_rank(c),
    }


# commands


def cmd_twirl(args: argparse.Namespace, config: Config) -> dict[str, Any]:
    rho, label = load_matrix_file(args.input)
    samples = config.twirl_samples if args.samples is None else args.samples
    seed = config.seed if args.seed is None else args.seed
    if samples:
        coords = symmetry.twirl_coordinates(symmetry.sampled_twirl(rho, samples, seed))
    else:
        coords = symmetry.twirl_coordinates(rho)
    snapped = geometry.snap_to_triangle(coords, config.coord_snap)
    # twirling keeps the coordinates, so the bound never depends on the sample count
    lower = symmetry.class_lower_bound(rho) if snapped == coords else geometry.classify(snapped)
    report = {"label": label, "samples": samples, "seed": seed, **_class_report(snapped)}
    report["class_lower_bound"] = f"at least {lower.label}"
    return report


def cmd_classify(args: argparse.Namespace, config: Config) -> dict[str, Any]:
    return _class_report(geometry.snap_to_triangle(SymCoords(args.x, args.y), config.coord_snap))


def cmd_witness_optimal(args: argparse.Namespace, config: Config) -> dict[str, Any]:
    if args.noise is not None and args.noise_y is not None:
        raise ValidationError("--noise-y cannot be combined with --noise")
    if args.target is not None and args.target_y is not None:
        raise ValidationError("--target-y cannot be combined with --target")
    if args.noise is not None:
        noise, _ = _coords_from_file(args.noise, config)
    elif args.noise_x is not None or args.noise_y is not None:
        noise = _coords(args.noise_x, args.noise_y, "noise", config)
    else:
        noise = geometry.ORIGIN
    if args.target is not None:
        target, _ = _coords_from_file(args.target, config)
    elif args.target_x is not None or args.target_y is not None:
        target = _coords(args.target_x, args.target_y, "target", config)
    else:
        target = geometry.GHZ_PLUS_CORNER

    target_class = _CLASS_BY_OPTION[args.target_class]
    bound = SloccClass(target_class - 1)
    line = MixingLine(noise, target)
    result = witness.solve_optimal_witness(line, target_class)
    zero = witness.zero_line(result.witness)
    return {
        "class": target_class.label,
        "noise": _point_report(noise),
        "target": _point_report(target),
        "witness": _witness_report(result.witness),
        "threshold": result.threshold,
        "zero_line": {"alpha": zero.alpha, "beta": zero.beta, "gamma": zero.gamma},
        "v0": result.crossing_v,
        "mirrored": result.mirrored,
        "full_rank_zero_point": _point_report(witness.full_rank_zero_point(result.witness)),
        "optimal_for_symmetric": witness.is_optimal_for_symmetric(result.witness, bound),
        "optimal_on_line": witness.is_optimal_on_line(result.witness, line, bound),
    }


def cmd_witness_eval(args: argparse.Namespace, config: Config) -> dict[str, Any]:
    w = Witness(args.a, args.b, args.c)
    report: dict[str, Any] = {"witness": _witness_report(w)}
    if args.state is not None:
        if args.y is not None:
            raise ValidationError("--y cannot be combined with --state")
        rho, label = load_matrix_file(args.state)
        value = expectation(witness.to_matrix(w), rho)
        report["label"] = label
    else:
        if args.y is None:
            raise ValidationError("--x and --y must be given together")
        c = geometry.snap_to_triangle(SymCoords(args.x, args.y), config.coord_snap)
        value = witness.expectation_sym(w, c)
        report.update(x=c.x, y=c.y)
    report["expectation"] = value
    # states on the zero-line stay undetected under rounding
    report["detected"] = value < -EXPECTATION_TOLERANCE
    return report


def cmd_boundary(args: argparse.Namespace, config: Config) -> str:
    v, xs, ys = geometry.boundary_samples(args.samples)
    if args.format == "json":
        text = json.dumps(
            {"command": "boundary", "rows": [{"v": float(a), "x": float(b), "y": float(c)} for a, b, c in zip(v, xs, ys)]},
            indent=2,
        ) + "\n"
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["v", "x", "y"])
        for row in zip(v, xs, ys):
            writer.writerow([f"{float(value):.15g}" for value in row])
        text = buffer.getvalue()
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
        logger.info("boundary written: path=%s samples=%d", args.out, args.samples)
        return ""
    return text


def cmd_plot(args: argparse.Namespace, config: Config) -> dict[str, Any]:
    curve_samples = config.curve_samples if args.curve_samples is None else args.curve_samples
    if curve_samples < MIN_CURVE_SAMPLES:
        raise ValidationError(f"--curve-samples must be >= {MIN_CURVE_SAMPLES}, got {curve_samples}")

    overlays = PlotOverlays(pseudo_pure=args.pseudo_pure)
    for path in args.state:
        c, label = _coords_from_file(path, config)
        overlays.states.append((label or path.stem, c))
    for x, y in args.point:
        c = geometry.snap_to_triangle(SymCoords(x, y), config.coord_snap)
        overlays.states.append((f"({x:g}, {y:g})", c))
    for a, b, c in args.witness:
        overlays.witnesses.append(Witness(a, b, c))

    check = area_self_check(curve_samples)
    if not check.ok:
        logger.warning(
            "area self-check failed: coverage_error=%.3e max_discrepancy=%.3e", check.coverage_error, check.max_discrepancy
        )
    render_svg(args.out, overlays, curve_samples)
    return {
        "out": str(args.out),
        "curve_samples": curve_samples,
        "area_check": {
            "ok": check.ok,
            "coverage_error": check.coverage_error,
            "max_discrepancy": check.max_discrepancy,
            "regions": {
                k.label: {"polygon": check.polygon_areas[k], "raster": check.raster_areas[k]} for k in SloccClass
            },
        },
    }


_COMMANDS: dict[str, Callable[[argparse.Namespace, Config], Any]] = {
    "twirl": cmd_twirl,
    "classify": cmd_classify,
    "witness-optimal": cmd_witness_optimal,
    "witness-eval": cmd_witness_eval,
    "boundary": cmd_boundary,
    "plot": cmd_plot,
}


def _emit(report: dict[str, Any], stdout: TextIO) -> None:
    stdout.write(json.dumps(report, indent=2) + "\n")


def run(
    argv: Sequence[str] | None,
    config: Config,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        result = _COMMANDS[command](args, config)
    except ValidationError as exc:
        return _fail(command, exc, EXIT_VALIDATION, stdout, stderr)
    except OSError as exc:
        return _fail(command, exc, EXIT_VALIDATION, stdout, stderr)
    except DomainError as exc:
        return _fail(command, exc, EXIT_DOMAIN, stdout, stderr)

    if isinstance(result, str):
        stdout.write(result)
    else:
        _emit({"command": command, **result}, stdout)
    return EXIT_OK


def _fail(command: str | None, exc: Exception, code: int, stdout: TextIO, stderr: TextIO) -> int:
    name = type(exc).__name__
    logger.info("command failed: command=%s error=%s exit=%d", command, name, code)
    stderr.write(f"{name}: {exc}\n")
    _emit({"command": command, "error": name, "message": str(exc)}, stdout)
    return code
