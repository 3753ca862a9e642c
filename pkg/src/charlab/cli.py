"""charlab command line: ``charlab <experiment> [--key value]...``, ``charlab list``, ``charlab selftest``."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import CharlabError, InvariantError, ParamError, UnknownExperimentError
from .experiments import REGISTRY, ExperimentConfig, get_experiment, list_experiments, run_experiment
from .report import write_report


def _split_params(tokens: list[str]) -> dict[str, str]:
    """``--key value`` and ``--key=value`` pairs into a dict."""
    params: dict[str, str] = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or tok == "--":
            raise ParamError(tok, "expected --key value")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ParamError(key, "missing value")
            value = tokens[i + 1]
            i += 2
        key = key.replace("-", "_") if key.replace("-", "_") in _all_param_names() else key
        params[key] = value
    return params


def _all_param_names() -> set[str]:
    return {p.name for e in REGISTRY.values() for p in e.params}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="charlab", allow_abbrev=False, description="experiments on character sums and smooth numbers")
    ap.add_argument("--version", action="version", version=f"charlab {__version__}")
    ap.add_argument("experiment", help="experiment name, 'list' or 'selftest'")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--format", default="csv", choices=("csv", "json", "both"))
    ap.add_argument("--quiet", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = _parser()
    try:
        args, rest = ap.parse_known_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 3
    try:
        if args.experiment == "list":
            for name, desc, req in list_experiments():
                print(f"{name:18s} {desc}  [required: {', '.join(req) or '-'}]")
            return 0
        if args.experiment == "selftest":
            from .selftest import run_selftest

            return 0 if run_selftest() else InvariantError.exit_code
        get_experiment(args.experiment)
        params = _split_params(rest)
        if not 0 <= args.seed < 2**64:
            raise ParamError("seed", "must lie in [0, 2**64)")
        config = ExperimentConfig(args.experiment, params, args.seed, args.out, args.format)
        report = run_experiment(config)
        paths = write_report(report, args.out, args.format)
        if not args.quiet:
            for p in paths:
                print(p)
        return 0
    except UnknownExperimentError as exc:
        print(f"charlab: {exc}", file=sys.stderr)
        return exc.exit_code
    except ParamError as exc:
        print(f"charlab: {exc}", file=sys.stderr)
        return exc.exit_code
    except CharlabError as exc:
        print(f"charlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
