#!/usr/bin/env python3
"""Tolerance optimization at a chosen operating point.

The default instance is the high-altitude/high-thrust point from the case
study; pass alt thrust mdot_in mdot_a to pick another.  Writes
optimize.json with the trajectory summary.
"""

import json
import sys

from contractforge.aircraft import HxKind, OperatingPoint, OptimizeConfig, optimize_tolerances


def main() -> int:
    args = [float(a) for a in sys.argv[1:5]]
    config = OptimizeConfig()
    if len(args) == 4:
        config.op = OperatingPoint(*args)
    payload = optimize_tolerances(config, "optimize.json")
    print(json.dumps({k: payload[k] for k in
                      ("start_cost", "final_cost", "final_eps", "final_bounds",
                       "violates_spec", "evaluations")}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
