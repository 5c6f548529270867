"""Run every experiment through the CLI and write one CSV per run into --outdir.

    python3 scripts/run_experiments.py --outdir results [--quick]

--quick shrinks prime counts and sample sizes for a smoke run.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from zetascope.cli import main as cli

ZEROS = Path(__file__).resolve().parent.parent / "tests" / "data" / "zeros_1e5.txt"


def experiments(quick: bool) -> dict[str, list[str]]:
    primes = "20000" if quick else "5000000"
    return {
        "table1_1e21": ["scan", "--from", "10^21-1", "--count", "3", "--primes", primes],
        "table1_1e22": ["scan", "--from", "10^22-1", "--count", "3", "--primes", primes],
        "googol": ["scan", "--from", "10^100", "--count", "2", "--primes", primes],
        "rn_sigma075": ["rn", "--sigma", "0.75", "--tmin", "10", "--tmax", "100", "--step", "0.5"],
        "argscan": ["argscan", "--tmin", "10", "--tmax", "80", "--delta", "0.01", "--primes", "100000",
                    "--step", "0.05"],
        "delta_hist": ["deltastats", "--zeros-file", str(ZEROS)],
        "delta_summary": ["deltastats", "--zeros-file", str(ZEROS), "--summary"],
        "paircorr_model": ["paircorr", "--model", "--count", "10000" if quick else "100000",
                           "--sigma", "0.274", "--seed", "7"],
        "paircorr_true": ["paircorr", "--zeros-file", str(ZEROS)],
        "kac": ["kac", "--primes", "1000" if quick else "10000", "--t", "1e6",
                "--samples", "1000" if quick else "10000", "--seed", "7"],
    }


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--only", nargs="*", help="subset of experiment names")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.outdir.mkdir(parents=True, exist_ok=True)
    failed = []
    for name, cmd in experiments(args.quick).items():
        if args.only and name not in args.only:
            continue
        out = args.outdir / f"{name}.csv"
        logging.info("%s: zetascope %s", name, " ".join(cmd))
        if cli([*cmd, "--out", str(out)]) != 0:
            failed.append(name)
    if failed:
        logging.error("failed: %s", ", ".join(failed))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
