"""``ecodyn`` command-line interface.

Subcommands ``equilibria``, ``stability``, ``persistence``, ``simulate`` and
``report`` share the scenario flags (``--preset`` or ``--config``) and the
numerical overrides. Exit status is 0 unless the configuration or an output
file could not be handled.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import load_config, load_preset
from .dynamics import IntegratorOptions
from .errors import ParseError, ValidationError
from .model import PopulationState
from .report import (
    dumps_json,
    render,
    report_to_dict,
    run_analysis,
    run_simulation,
    simulation_to_dict,
)

log = logging.getLogger("ecodyn")

SUBCOMMANDS = {
    "equilibria": {"equilibria"},
    "stability": {"equilibria", "stability", "global"},
    "persistence": {"equilibria", "persistence"},
    "simulate": {"equilibria", "stability", "simulate"},
    "report": {"equilibria", "stability", "global", "persistence", "simulate"},
}


def _triple(text: str) -> tuple[float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="built-in (S1..S4) or $ECODYN_PRESET_DIR preset name")
    src.add_argument("--config", type=Path, help="key = value scenario file")
    common.add_argument("--out", type=Path, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--t-end", type=float)
    common.add_argument("--rtol", type=float)
    common.add_argument("--atol", type=float)
    common.add_argument("--x-max", type=float)
    common.add_argument("--samples", type=int)
    common.add_argument("--gamma", type=_triple, metavar="G1,G2,G3")
    common.add_argument("--init", type=_triple, action="append", metavar="X,Y,Z",
                        help="initial condition (repeatable); replaces the scenario's")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ecodyn", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _scenario(args):
    cfg = load_config(args.config) if args.config else load_preset(args.preset)
    changes = {"analyses": frozenset(SUBCOMMANDS[args.command])}
    if args.init:
        changes["initial_conditions"] = tuple(PopulationState(*ic) for ic in args.init)
    if args.gamma:
        changes["gammas"] = args.gamma
    if args.x_max is not None:
        changes["x_max"] = args.x_max
    if args.samples is not None:
        changes["n_samples"] = args.samples
    overrides = {k: v for k, v in (("t_end", args.t_end), ("rel_tol", args.rtol),
                                   ("abs_tol", args.atol)) if v is not None}
    if overrides:
        base = cfg.integrator or IntegratorOptions()
        kwargs = dataclasses.asdict(base)
        if "t_end" in overrides and cfg.integrator is None:
            kwargs.update(max_step=None, output_stride=None)
        kwargs.update(overrides)
        try:
            changes["integrator"] = IntegratorOptions(**kwargs)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
    if "simulate" in changes["analyses"] and not (changes.get("initial_conditions") or cfg.initial_conditions):
        raise ValidationError("simulate requires at least one initial condition (use --init)")
    return dataclasses.replace(cfg, **changes)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _indexed(out: Path, i: int, n: int) -> Path:
    return out if n == 1 else out.with_name(f"{out.stem}_{i + 1}{out.suffix}")


def run(args) -> int:
    cfg = _scenario(args)
    report = run_analysis(cfg)
    for note in report.notes:
        log.warning("%s", note)

    if args.command == "simulate":
        sims = run_simulation(cfg, report)
        for s in sims:
            if s.error:
                log.warning("trajectory from %s failed: %s", tuple(s.initial), s.error)
        if args.format == "csv":
            if args.out is None:
                for s in sims:
                    sys.stdout.write(render(s, "csv"))
            else:
                for i, s in enumerate(sims):
                    _emit(render(s, "csv"), _indexed(args.out, i, len(sims)))
        else:
            _emit(dumps_json({"scenario": cfg.name,
                              "simulations": [simulation_to_dict(s, True) for s in sims]}),
                  args.out)
        return 0

    if args.command == "report":
        doc = report_to_dict(report)
        if cfg.initial_conditions:
            doc["simulations"] = [simulation_to_dict(s) for s in run_simulation(cfg, report)]
        if args.format == "csv":
            _emit(render(report, "csv"), args.out)
        else:
            _emit(dumps_json(doc), args.out)
        return 0

    _emit(render(report, args.format), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return run(args)
    except (ValidationError, ParseError) as exc:
        print(f"ecodyn: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ecodyn: I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
