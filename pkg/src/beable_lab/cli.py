"""``beable-lab`` command-line entry point.

Exit codes: 0 success, 2 validation or precondition failure, 3 numerical
failure, 4 theorem-suite failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import scenarios
from .errors import NumericalError, PreconditionError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_THEOREMS = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="beable-lab",
        description="Segalgebras, dispersion-free states and beable subalgebras of Hermitian matrices.",
    )
    p.add_argument("target", nargs="?", help=f"command ({', '.join(scenarios.COMMANDS)}) or a scenario file")
    p.add_argument("scenario", nargs="?", help="scenario JSON file")
    p.add_argument("--corpus", metavar="NAME", help="run a bundled scenario ('list' to show names)")
    p.add_argument("--tol", type=float, help="override Hermiticity, eigen and subspace tolerances")
    p.add_argument("--seed", type=int, help="RNG seed (overrides params.seed)")
    p.add_argument("--json", action="store_true", help="print the JSON report only")
    p.add_argument("--out", metavar="PATH", help="also write the JSON report to PATH")
    p.add_argument("--max-dim", type=int, default=8, help="largest dimension verify-theorems accepts (default 8)")
    p.add_argument("--dims", type=int, nargs="+", help="verify-theorems: dimensions")
    p.add_argument("--trials", type=int, help="verify-theorems: trials per suite and dimension")
    return p


def _resolve(args) -> "scenarios.Scenario | dict":
    if args.corpus:
        if args.target or args.scenario:
            raise ValidationError("--corpus takes no positional arguments")
        return scenarios.load_corpus(args.corpus)
    command, path = args.target, args.scenario
    if command is not None and command not in scenarios.COMMANDS:
        if path is not None:
            raise ValidationError(f"unknown command {command!r}")
        command, path = None, command
    if path is None:
        if command != "verify-theorems":
            raise ValidationError("a scenario file is required (or use --corpus NAME)")
        params = {}
        if args.dims:
            params["dims"] = args.dims
        if args.trials:
            params["trials"] = args.trials
        return {"command": "verify-theorems", "params": params}
    scen = scenarios.load_scenario(path)
    if command is not None and command != scen.command:
        raise ValidationError(f"scenario {path} runs {scen.command!r}, not {command!r}")
    if scen.command == "verify-theorems" and (args.dims or args.trials):
        raw = dict(scen.raw)
        raw["params"] = dict(scen.params, **({"dims": args.dims} if args.dims else {}),
                             **({"trials": args.trials} if args.trials else {}))
        return raw
    return scen


def _summary(report: dict) -> list[str]:
    lines = [f"{report['command']}  (seed {report['seed']})"]
    res = report["results"]
    if report["command"] == "verify-theorems":
        for name, s in res["suites"].items():
            mark = "PASS" if s["ok"] else "FAIL"
            lines.append(f"  {mark} {name:7s} {s['passed']}/{s['total']}  worst residual {s['worst_residual']:.2e}")
            for note in s.get("failures", []):
                lines.append(f"        {note}")
    else:
        for key in sorted(res):
            val = res[key]
            if isinstance(val, (bool, int, float, str)):
                lines.append(f"  {key}: {val}")
    lines.append("  residuals: " + ", ".join(f"{k}={v:.2e}" for k, v in sorted(report["residuals"].items())))
    return lines


def _fail(args, code: int, kind: str, message: str, contract: str | None = None) -> int:
    if args.json:
        err = {"kind": kind, "message": message}
        if contract:
            err["contract"] = contract
        print(json.dumps({"schema": scenarios.SCHEMA, "error": err}, sort_keys=True))
    print(f"beable-lab: {kind}: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.corpus == "list":
        print("\n".join(scenarios.corpus_names()))
        return EXIT_OK
    try:
        scen = _resolve(args)
        report = scenarios.run_scenario(scen, seed=args.seed, tol=args.tol, max_dim=args.max_dim)
    except PreconditionError as exc:
        return _fail(args, EXIT_VALIDATION, "precondition", str(exc), exc.contract)
    except ValidationError as exc:
        return _fail(args, EXIT_VALIDATION, "validation", str(exc))
    except NumericalError as exc:
        return _fail(args, EXIT_NUMERICAL, "numerical", str(exc))
    text = scenarios.report_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print("\n".join(_summary(report)))
    if report["command"] == "verify-theorems" and not report["results"]["all_passed"]:
        return EXIT_THEOREMS
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
