#!/usr/bin/env python3
"""Sweep the fuel/thermal system over the default flight-regime grid.

Writes explore.csv plus per-altitude validity scatters (the fixed vs
controlled heat-exchanger comparison) under aircraft_out/.
"""

import sys
from collections import defaultdict

from contractforge.aircraft import ExploreConfig, HxKind, explore_grid


def main() -> int:
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "aircraft_out"
    config = ExploreConfig(svg=True)
    results = explore_grid(config, out_dir)
    per_kind = defaultdict(lambda: [0, 0])
    for r in results:
        per_kind[r.hx_kind][0] += r.valid
        per_kind[r.hx_kind][1] += 1
    for kind in (HxKind.FIXED, HxKind.CONTROLLED):
        valid, total = per_kind[kind]
        print(f"{kind.value:>10}: {valid}/{total} valid instances")
    return 0


if __name__ == "__main__":
    sys.exit(main())
