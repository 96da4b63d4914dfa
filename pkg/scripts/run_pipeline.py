"""Run every CLI experiment for one config, then bundle the report.

    python scripts/run_pipeline.py scripts/configs/tight_L8.json [--only flow,classify]

Commands that fail are reported and the rest still run; the exit code is
the largest code seen.
"""

import argparse
import sys

from horolab.cli import COMMANDS, run_command


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--only", help="comma-separated subset of commands")
    args = ap.parse_args()
    cmds = [c for c in COMMANDS if c != "report"]
    if args.only:
        wanted = args.only.split(",")
        unknown = sorted(set(wanted) - set(COMMANDS))
        if unknown:
            ap.error(f"unknown commands: {', '.join(unknown)}")
        cmds = [c for c in cmds if c in wanted]
    worst = 0
    for cmd in cmds + ["report"]:
        code = run_command([cmd, "--config", args.config])
        print(f"pipeline command={cmd} exit={code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
