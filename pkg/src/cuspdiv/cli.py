"""Command-line front-end: run a named experiment from a config file, write
JSON/CSV reports and print one PASS/FAIL line per declared assertion.

Exit codes: 0 all assertions pass, 1 assertion failure, 2 config error,
3 numerical failure (non-finite values in the report).

Thread cap: --threads (default 1) is applied to the BLAS/OpenMP pools before
numpy is imported; fixed thread counts keep eigensolves bit-reproducible.
"""

import argparse
import math
import os
import sys


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cuspdiv",
        description="Divergence, Hardy, inf-sup and Korn experiments on "
                    "external-cusp domains.")
    parser.add_argument("command",
                        choices=["divsolve", "hardy", "infsup", "korn",
                                 "counterexample", "apcheck", "scan-beta",
                                 "lift-check"])
    parser.add_argument("-c", "--config", default=None,
                        help="JSON config file (defaults are documented in "
                             "cuspdiv.config.DEFAULTS)")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="override a config leaf via its dotted path")
    parser.add_argument("--out", default=None,
                        help="output directory (overrides output.dir)")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap worker threads (default 1, reproducible)")
    return parser


def _apply_thread_cap(threads):
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(threads)


def _has_nonfinite(obj):
    if isinstance(obj, dict):
        return any(_has_nonfinite(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return any(_has_nonfinite(v) for v in obj)
    if isinstance(obj, float):
        return not math.isfinite(obj)
    return False


def main(argv=None):
    args = _build_parser().parse_args(argv)

    threads = args.threads
    if threads is None:
        threads = 1
    if threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 2
    _apply_thread_cap(threads)

    # heavy imports only after the thread cap is in place
    from .config import ConfigError, load_config
    from .experiments import run_experiment
    from .reports import ensure_dir, write_csv, write_json

    try:
        cfg = load_config(args.config, args.overrides)
        if args.out is not None:
            cfg["output"]["dir"] = args.out
        cfg["threads"] = threads
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_experiment(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = ensure_dir(cfg["output"]["dir"])
    slug = args.command.replace("-", "_")
    report_path = os.path.join(out_dir, f"{slug}_report.json")
    write_json(report_path, result.report)
    for tname, (header, rows) in result.tables.items():
        write_csv(os.path.join(out_dir, f"{slug}_{tname}.csv"), header, rows)

    for a in result.assertions:
        print(f"{'PASS' if a.passed else 'FAIL'} {a.name}: {a.detail}")
    print(f"report: {report_path}")

    if _has_nonfinite(result.report.get("results", {})):
        print("numerical failure: non-finite values in report", file=sys.stderr)
        return 3
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
