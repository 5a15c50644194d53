#!/usr/bin/env python3
"""Run the full desk-scale verification matrix and write a JSON report.

Usage:
    python scripts/run_sweep.py [--jobs N] [--out reports/sweep.json]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from supercong.cli import main  # noqa: E402


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--jobs", type=int, default=4)
    parser.add_argument("--out", default="reports/sweep.json")
    args = parser.parse_args()
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    sys.exit(
        main(
            [
                "sweep",
                "--jobs", str(args.jobs),
                "--no-timing",
                "--no-cache",
                "--report", args.out,
            ]
        )
    )
