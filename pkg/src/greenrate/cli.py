"""Batch command-line front end.

Commands:
    greenrate run <scenario.toml> -o <out.csv> [--rel-tol X] [--threads N]
    greenrate run --preset NAME -o <out.csv> [...]
    greenrate validate <scenario.toml>
    greenrate list-presets

Exit codes: 0 success, 2 parse/validation error, 3 numerical convergence
failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConvergenceError, ScenarioError
from .scenarios import (
    list_presets,
    load_scenario,
    load_scenario_text,
    preset_text,
    run_scenario,
    validate_scenario,
    write_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenrate",
        description="Medium-assisted Green tensors and energy-transfer rate sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario sweep and write a CSV")
    run_p.add_argument("scenario", nargs="?", help="scenario TOML file")
    run_p.add_argument("-o", "--output", required=True, help="output CSV path")
    run_p.add_argument("--preset", help="run a bundled preset instead of a file")
    run_p.add_argument("--rel-tol", type=float, default=None, help="quadrature relative tolerance")
    run_p.add_argument("--threads", type=int, default=1, help="worker processes for sweep points")

    val_p = sub.add_parser("validate", help="validate a scenario without running it")
    val_p.add_argument("scenario", help="scenario TOML file")

    sub.add_parser("list-presets", help="list bundled figure presets")
    return parser


def _load_for_run(args):
    if args.preset and args.scenario:
        raise ScenarioError("give either a scenario file or --preset, not both")
    if args.preset:
        return load_scenario_text(preset_text(args.preset))
    if not args.scenario:
        raise ScenarioError("a scenario file or --preset is required")
    return load_scenario(args.scenario)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list-presets":
        for name, desc in sorted(list_presets().items()):
            print(f"{name:14s} {desc}")
        return EXIT_OK

    if args.command == "validate":
        try:
            data = load_scenario(args.scenario)
        except (ScenarioError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        violations = validate_scenario(data)
        if violations:
            print(f"{args.scenario}: {len(violations)} violation(s)")
            for msg in violations:
                print(f"  - {msg}")
            return EXIT_VALIDATION
        print(f"{args.scenario}: OK (no violations)")
        return EXIT_OK

    # run
    try:
        data = _load_for_run(args)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        result = run_scenario(data, rel_tol=args.rel_tol, workers=max(1, args.threads))
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    with open(args.output, "w") as fh:
        write_csv(result, fh)
    print(result.summary)
    print(f"wrote {args.output}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
