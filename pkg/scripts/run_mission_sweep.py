#!/usr/bin/env python3
"""Run the desk-scale schedulability sweep with the default configuration.

Writes results.csv, bounds.json, and per-schedule ribbon charts under
mission_out/.  Edit the config dict below or point the CLI at a JSON file
for anything bigger.
"""

import json
import sys

from contractforge.mission import SweepConfig, run_sweep


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "mission_out"
    config = SweepConfig(svg=True)
    summary = run_sweep(config, out_dir)
    print(json.dumps(summary, indent=2))
    rate = summary["admissible"] / summary["combinations"]
    print(f"admissible: {summary['admissible']}/{summary['combinations']} ({rate:.1%})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
