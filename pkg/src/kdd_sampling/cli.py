"""Command-line interface: ``kdd <command> [options]``.

Every command prints a JSON summary on stdout and writes a run manifest
next to its main output. Errors map to distinct exit codes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from ._version import __version__
from .config import DesignArm, ReconSection, load_config
from .const import (
    CAIPI_OUTLIER_FACTOR,
    DEFAULT_CG_MAX_ITER,
    DEFAULT_CG_TOL,
    DEFAULT_LAMBDA,
    DEFAULT_REPLICAS,
    EXIT_CONFIG,
    EXIT_CONSISTENCY,
    EXIT_CONVERGENCE,
    EXIT_DIMENSION,
    EXIT_ERROR,
    EXIT_FORMAT,
    EXIT_NOT_FOUND,
    EXIT_OK,
    EXIT_SIZE_LIMIT,
    EXIT_VALIDATION,
    Algorithm,
    TieBreak,
)
from .design import (
    DeltaJMap,
    approx_best_candidate,
    caipi_enumerate,
    delta_j_from_pattern,
    evaluate_periodic,
)
from .exceptions import (
    KddConfigError,
    KddConsistencyError,
    KddConvergenceError,
    KddDimensionError,
    KddError,
    KddFormatError,
    KddSizeLimitError,
    KddValidationError,
)
from .formats import (
    container_paths,
    emit_csv,
    emit_map,
    load_sensitivity,
    load_weight,
    read_pattern,
    read_sparse_weight,
    save_sensitivity,
    save_weight,
    write_array,
    write_pattern,
)
from .grid import dd_fft
from .grid.models import Sample
from .kernel import power_function, spearman
from .manifest import RunRecorder
from .pipelines import (
    build_sensitivity,
    check_objective,
    design_config,
    model_weights,
    pattern_gfactor,
    run_design,
    run_report,
)
from .recon import analytic_gfactor, gfactor_stats
from .sensitivity import SensitivitySet
from .spectral import trace_moment2, variance_bound
from .weighting import WeightFunction, collapse_readout, compute_w

_LOGGER = logging.getLogger(__name__)

Summary = dict[str, Any]
Handler = Callable[[argparse.Namespace, RunRecorder], tuple[Summary, Path]]

_EXIT_CODES: tuple[tuple[type[BaseException], int], ...] = (
    (KddConfigError, EXIT_CONFIG),
    (FileNotFoundError, EXIT_NOT_FOUND),
    (KddDimensionError, EXIT_DIMENSION),
    (KddFormatError, EXIT_FORMAT),
    (KddConsistencyError, EXIT_CONSISTENCY),
    (KddSizeLimitError, EXIT_SIZE_LIMIT),
    (KddConvergenceError, EXIT_CONVERGENCE),
    (KddValidationError, EXIT_VALIDATION),
    (KddError, EXIT_ERROR),
)


def exit_code(error: BaseException) -> int:
    """Exit code reported for an error raised by a command."""
    for kind, code in _EXIT_CODES:
        if isinstance(error, kind):
            return code
    return EXIT_ERROR


def _record_container(recorder: RunRecorder, base: Path) -> None:
    for path in container_paths(base):
        recorder.add_input(path)


def _sensitivity(path: Path, recorder: RunRecorder) -> SensitivitySet:
    _record_container(recorder, path)
    return load_sensitivity(path)


def _weights(path: Path, recorder: RunRecorder) -> WeightFunction:
    _record_container(recorder, path)
    w = load_weight(path)
    return collapse_readout(w) if w.readout_axis is not None else w


def _rank_correlation(x: Any, y: Any, what: str) -> float | None:
    """Spearman correlation, or None when either side has no spread."""
    try:
        return spearman(x, y)
    except KddValidationError as err:
        _LOGGER.warning("No rank correlation for %s: %s", what, err.message)
        return None


def _quotas(entries: Sequence[str] | None, frames: int) -> tuple[int, ...] | None:
    """Parse repeated ``t:count`` options into a per-frame tuple."""
    if not entries:
        return None
    quotas = [0] * frames
    for entry in entries:
        try:
            frame, count = (int(part) for part in entry.split(":"))
        except ValueError as err:
            raise KddConfigError(f"Quota {entry!r} is not of the form t:count") from err
        if not 0 <= frame < frames:
            raise KddConfigError(f"Quota frame {frame} outside 0..{frames - 1}")
        quotas[frame] = count
    return tuple(quotas)


def _arm(args: argparse.Namespace, frames: int) -> DesignArm:
    """Design arm assembled from ``design`` flags."""
    quotas = _quotas(args.quota, frames)
    total = args.n
    if total is None and quotas is not None:
        total = sum(quotas)
    fields = {
        "name": "cli",
        "algorithm": args.algo,
        "total": total,
        "acceleration": args.acceleration,
        "quotas": quotas,
        "even_quotas": args.even_quotas,
        "sparse_keep": args.sparse_keep,
        "tie_break": args.tie_break,
        "allow_repeats": not args.no_repeats,
        "seed": args.seed,
        "r_y": args.r_y,
        "r_z": args.r_z,
        "shift": args.shift,
        "r_min": args.r_min,
    }
    try:
        return DesignArm.model_validate({k: v for k, v in fields.items() if v is not None})
    except ValidationError as err:
        raise KddConfigError(f"Invalid design options: {err}") from err


def _recon(args: argparse.Namespace) -> ReconSection:
    try:
        return ReconSection(
            lam=args.lam,
            replicas=args.replicas,
            tol=args.tol,
            max_iter=args.max_iter,
            seed=args.seed,
            analytic=args.analytic,
        )
    except ValidationError as err:
        raise KddConfigError(f"Invalid reconstruction options: {err}") from err


def cmd_synth(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """Write the sensitivity model of a configuration as an array container."""
    recorder.add_input(args.config)
    config = load_config(args.config)
    recorder.add_seed("model", config.model.seed)
    sens = build_sensitivity(config.model)
    header, payload = save_sensitivity(args.out, sens)
    recorder.add_output(header)
    recorder.add_output(payload)
    return {"sensitivity": str(header), "shape": list(sens.values.shape)}, payload


def cmd_compute_w(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """Compute the weighting function of a stored or configured model."""
    if args.sens is not None:
        sens = _sensitivity(args.sens, recorder)
    else:
        recorder.add_input(args.config)
        sens = build_sensitivity(load_config(args.config).model)
    w = compute_w(sens, workers=args.workers)
    if w.readout_axis is not None and not args.keep_readout:
        w = collapse_readout(w)
    header, payload = save_weight(args.out, w)
    recorder.add_output(header)
    recorder.add_output(payload)
    return {"weights": str(header), "shape": list(w.values.shape)}, payload


def cmd_design(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """Design a pattern with one of the generators."""
    recorder.add_seed("design", args.seed)
    if args.sparse_w is not None:
        recorder.add_input(args.sparse_w)
        w_hat = read_sparse_weight(args.sparse_w)
        arm = _arm(args, w_hat.grid.frames)
        if arm.algorithm is not Algorithm.APPROX:
            raise KddConfigError("A sparse weight file can only drive --algo approx")
        tracked: list[float] = [0.0]

        def record(_step: int, _sample: Sample, state: DeltaJMap) -> None:
            tracked[0] = state.objective

        pattern = approx_best_candidate(w_hat, design_config(arm, w_hat.grid), on_step=record)
        objective = check_objective(w_hat.to_dense(), pattern, tracked[0])
        seconds: float | None = None
    else:
        w = _weights(Path(args.w), recorder)
        arm = _arm(args, w.grid.frames)
        sens = None
        if args.sens is not None:
            sens = _sensitivity(args.sens, recorder)
        outcome = run_design(arm, w, sens=sens, lam=args.lam)
        pattern, objective, seconds = outcome

    target = write_pattern(args.out, pattern)
    recorder.add_output(target)
    recorder.add_result("objective", objective)
    _LOGGER.info("Designed %d samples, J=%.12g", pattern.total, objective)
    summary = {
        "pattern": str(target),
        "samples": pattern.total,
        "objective": objective,
        "seconds": seconds,
    }
    return summary, target


def cmd_evaluate(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """Report J = ⟨w, p⟩ of a pattern and optionally its ΔJ map."""
    w = _weights(Path(args.w), recorder)
    recorder.add_input(args.pattern)
    pattern = read_pattern(args.pattern)
    if not 0 <= args.frame < pattern.grid.frames:
        raise KddValidationError(f"Frame {args.frame} outside 0..{pattern.grid.frames - 1}")
    objective = trace_moment2(w, dd_fft(pattern))
    recorder.add_result("objective", objective)
    summary: Summary = {"samples": pattern.total, "objective": objective}

    if args.sens is not None:
        bound = variance_bound(_sensitivity(args.sens, recorder), pattern, w)
        summary.update(bound._asdict())
    main_output = Path(args.pattern)
    if args.deltaj_map is not None:
        state = delta_j_from_pattern(w, pattern)
        window = emit_map(state.values[args.frame], args.deltaj_map)
        recorder.add_output(args.deltaj_map)
        summary["deltaj_map"] = {"path": str(args.deltaj_map), "window": list(window)}
        main_output = Path(args.deltaj_map)
    return summary, main_output


def cmd_gfactor(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """g-factor map of a pattern by pseudo replicas or the dense model."""
    sens = _sensitivity(args.sens, recorder)
    recorder.add_input(args.pattern)
    pattern = read_pattern(args.pattern)
    recorder.add_seed("replicas", args.seed)
    gmap = pattern_gfactor(sens, pattern, _recon(args), workers=args.workers)
    header, payload = write_array(
        args.out,
        gmap.values,
        labels=("l", *(f"r{i}" for i in range(len(sens.spatial_dims)))),
        metadata={"acceleration": gmap.acceleration, "replicas": gmap.replicas},
    )
    recorder.add_output(header)
    recorder.add_output(payload)
    stats = gfactor_stats(gmap)
    summary: Summary = {"gfactor": str(header), **stats.model_dump()}
    if args.pgm is not None:
        window = emit_map(gmap.combined(), args.pgm)
        recorder.add_output(args.pgm)
        summary["pgm"] = {"path": str(args.pgm), "window": list(window)}
    return summary, payload


def cmd_caipi(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """Enumerate and rank the CAIPIRINHA cells of an acceleration factor."""
    w = _weights(Path(args.w), recorder)
    scores = evaluate_periodic(w, caipi_enumerate(args.R, w.grid))
    sens = _sensitivity(args.sens, recorder) if args.sens is not None else None

    rows: list[Summary] = []
    for rank, (cell, objective) in enumerate(scores):
        row: Summary = {"rank": rank, "cell": cell.label, "objective": objective}
        if sens is not None:
            row["max_g"] = gfactor_stats(analytic_gfactor(sens, cell.tile(), args.lam)).max
        rows.append(row)
    if sens is not None:
        # cells far above the typical max g are reported but flagged
        typical = float(np.median([row["max_g"] for row in rows]))
        for row in rows:
            row["outlier"] = bool(row["max_g"] > CAIPI_OUTLIER_FACTOR * typical)
    target = emit_csv(rows, args.report)
    recorder.add_output(target)

    summary: Summary = {"cells": len(rows), "best": rows[0]["cell"], "report": str(target)}
    if sens is not None:
        summary["outliers"] = sum(bool(row["outlier"]) for row in rows)
        if len(rows) > 1:
            summary["spearman"] = _rank_correlation(
                [row["objective"] for row in rows],
                [row["max_g"] for row in rows],
                "CAIPIRINHA cells",
            )
    return summary, target


def cmd_power(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """Power function of a pattern and its rank correlation with ΔJ."""
    sens = _sensitivity(args.sens, recorder)
    recorder.add_input(args.pattern)
    pattern = read_pattern(args.pattern)
    power = power_function(sens, pattern)
    labels = ("t", "ky", "kz")[: 1 + pattern.grid.ndim]
    header, payload = write_array(args.out, power.combined, labels=labels)
    recorder.add_output(header)
    recorder.add_output(payload)

    w = _weights(Path(args.w), recorder) if args.w is not None else model_weights(sens)
    deltaj = delta_j_from_pattern(w, pattern).values
    unsampled = pattern.counts == 0
    summary: Summary = {
        "power": str(header),
        "condition": power.condition,
        "max_sampled": float(np.abs(power.combined[~unsampled]).max(initial=0.0)),
    }
    if np.count_nonzero(unsampled) > 1:
        summary["spearman"] = _rank_correlation(
            deltaj[unsampled], power.clipped()[unsampled], "unsampled locations"
        )
    if args.csv is not None:
        rows = [
            {
                "t": int(index[0]),
                "k": " ".join(str(int(i)) for i in index[1:]),
                "deltaj": float(deltaj[tuple(index)]),
                "p2": float(power.combined[tuple(index)]),
            }
            for index in np.argwhere(unsampled)
        ]
        recorder.add_output(emit_csv(rows, args.csv))
    return summary, payload


def cmd_report(args: argparse.Namespace, recorder: RunRecorder) -> tuple[Summary, Path]:
    """Run every design arm of a configuration and tabulate the comparison."""
    recorder.add_input(args.config)
    config = load_config(args.config)
    recorder.add_seed("model", config.model.seed)
    recorder.add_seed("recon", config.recon.seed)
    for arm in config.designs:
        recorder.add_seed(f"design.{arm.name}", arm.seed)
    rows, written = run_report(config, args.out, workers=args.workers)
    for path in written:
        recorder.add_output(path)
    table = written[-1]
    return {"report": str(table), "rows": [row.model_dump() for row in rows]}, table


def _add_recon_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    parser.add_argument("--replicas", type=int, default=DEFAULT_REPLICAS)
    parser.add_argument("--tol", type=float, default=DEFAULT_CG_TOL)
    parser.add_argument("--max-iter", type=int, default=DEFAULT_CG_MAX_ITER)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--analytic", action="store_true", help="exact g from the dense model")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(prog="kdd", description="k-space sampling design toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--manifest", type=Path, help="default: <output>.manifest.json")
    parser.add_argument("--workers", type=int, help="worker threads (capped by KDD_THREADS)")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="write a synthetic sensitivity model")
    synth.add_argument("--config", type=Path, required=True)
    synth.add_argument("--out", type=Path, required=True)
    synth.set_defaults(handler=cmd_synth)

    weights = commands.add_parser("compute-w", help="compute the weighting function")
    source = weights.add_mutually_exclusive_group(required=True)
    source.add_argument("--sens", type=Path)
    source.add_argument("--config", type=Path)
    weights.add_argument("--keep-readout", action="store_true", help="do not collapse the readout")
    weights.add_argument("--out", type=Path, required=True)
    weights.set_defaults(handler=cmd_compute_w)

    design = commands.add_parser("design", help="design a sampling pattern")
    inputs = design.add_mutually_exclusive_group(required=True)
    inputs.add_argument("--w", type=Path, help="weighting function container")
    inputs.add_argument("--sparse-w", type=Path, help="sparse weight file (approx only)")
    design.add_argument("--algo", choices=[a.value for a in Algorithm], default="exact")
    count = design.add_mutually_exclusive_group()
    count.add_argument("--n", type=int, help="total sample count")
    count.add_argument("--acceleration", type=float)
    design.add_argument("--quota", action="append", metavar="T:COUNT")
    design.add_argument("--even-quotas", action="store_true")
    design.add_argument("--sparse-keep", type=_keep, help="retained entries, or a fraction")
    design.add_argument("--seed", type=int, default=0)
    design.add_argument("--tie-break", choices=[t.value for t in TieBreak], default="lexicographic")
    design.add_argument("--no-repeats", action="store_true")
    design.add_argument("--r-y", type=int)
    design.add_argument("--r-z", type=int)
    design.add_argument("--shift", type=int)
    design.add_argument("--r-min", type=float)
    design.add_argument("--sens", type=Path, help="sensitivity container (mse only)")
    design.add_argument("--lambda", dest="lam", type=float, help="MSE regularization")
    design.add_argument("--out", type=Path, required=True)
    design.set_defaults(handler=cmd_design)

    evaluate = commands.add_parser("evaluate", help="objective of a pattern")
    evaluate.add_argument("--w", type=Path, required=True)
    evaluate.add_argument("--pattern", type=Path, required=True)
    evaluate.add_argument("--sens", type=Path, help="also report the variance bound")
    evaluate.add_argument("--deltaj-map", type=Path, help="PGM of the ΔJ map")
    evaluate.add_argument("--frame", type=int, default=0, help="frame of the ΔJ map")
    evaluate.set_defaults(handler=cmd_evaluate)

    gfactor = commands.add_parser("gfactor", help="g-factor map of a pattern")
    gfactor.add_argument("--sens", type=Path, required=True)
    gfactor.add_argument("--pattern", type=Path, required=True)
    _add_recon_options(gfactor)
    gfactor.add_argument("--pgm", type=Path, help="PGM of the coefficient-averaged map")
    gfactor.add_argument("--out", type=Path, required=True)
    gfactor.set_defaults(handler=cmd_gfactor)

    caipi = commands.add_parser("caipi", help="rank CAIPIRINHA cells")
    caipi.add_argument("--R", type=int, required=True)
    caipi.add_argument("--w", type=Path, required=True)
    caipi.add_argument("--sens", type=Path, help="also rank by analytic max g")
    caipi.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    caipi.add_argument("--report", type=Path, required=True)
    caipi.set_defaults(handler=cmd_caipi)

    power = commands.add_parser("power", help="power function of a pattern")
    power.add_argument("--sens", type=Path, required=True)
    power.add_argument("--pattern", type=Path, required=True)
    power.add_argument("--w", type=Path, help="weights for ΔJ (computed when omitted)")
    power.add_argument("--out", type=Path, required=True)
    power.add_argument("--csv", type=Path, help="ΔJ against P² per unsampled location")
    power.set_defaults(handler=cmd_power)

    report = commands.add_parser("report", help="compare the design arms of an experiment")
    report.add_argument("--config", type=Path, required=True)
    report.add_argument("--out", type=Path, help="output directory (default: config output_dir)")
    report.set_defaults(handler=cmd_report)
    return parser


def _keep(text: str) -> int | float:
    """``--sparse-keep`` value: an integer count or a fraction."""
    try:
        return int(text)
    except ValueError:
        return float(text)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handler: Handler = args.handler
    arguments = {k: v for k, v in vars(args).items() if k != "handler"}
    recorder = RunRecorder(args.command, arguments)
    try:
        summary, output = handler(args, recorder)
        manifest = args.manifest or output.with_name(output.name + ".manifest.json")
        recorder.write(manifest)
    except (KddError, FileNotFoundError) as err:
        message = err.message if isinstance(err, KddError) else str(err)
        print(f"kdd {args.command}: {message}", file=sys.stderr)
        return exit_code(err)

    summary["manifest"] = str(manifest)
    print(json.dumps(summary, indent=2, default=str))
    return EXIT_OK
