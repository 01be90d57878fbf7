// Rendering helpers. Constraint strings arrive from the service and are
// shown verbatim; only free-standing numbers (bounds, objectives) are
// display-rounded to 4 decimals.

export interface ContractJson {
  input_vars: string[];
  output_vars: string[];
  assumptions: string[];
  guarantees: string[];
}

export function formatBlock(c: ContractJson): string {
  return [
    `InVars: [${c.input_vars.join(", ")}]`,
    `OutVars:[${c.output_vars.join(", ")}]`,
    "A: [",
    ...c.assumptions.map((s) => `  ${s}`),
    "]",
    "G: [",
    ...c.guarantees.map((s) => `  ${s}`),
    "]",
  ].join("\n");
}

export function round4(x: number): string {
  if (!Number.isFinite(x)) return x > 0 ? "+inf" : "-inf";
  return (Math.round(x * 1e4) / 1e4).toString();
}

export interface BarGeometry {
  left: number; // percent of track width
  width: number; // percent
  label: string;
}

/** Geometry of a bound bar on a [lo, hi] track; pure so tests can assert
 * pixel identity across slider moves. */
export function boundBar(bounds: [number, number], track: [number, number]): BarGeometry {
  const [lo, hi] = bounds;
  const [tLo, tHi] = track;
  const span = tHi - tLo;
  const clamp = (v: number) => Math.min(tHi, Math.max(tLo, v));
  const left = ((clamp(lo) - tLo) / span) * 100;
  const right = ((clamp(hi) - tLo) / span) * 100;
  return {
    left,
    width: Math.max(0.5, right - left),
    label: `[${round4(lo)}, ${round4(hi)}]`,
  };
}

export interface RibbonStep {
  x: number; // percent
  y0: number; // percent from bottom for the low end
  y1: number;
  label: string;
}

/** Per-step state-of-charge ribbon on a 0..100 axis. */
export function socRibbon(bounds: [number, number][]): RibbonStep[] {
  const n = bounds.length || 1;
  return bounds.map(([lo, hi], i) => ({
    x: ((i + 0.5) / n) * 100,
    y0: Math.min(100, Math.max(0, lo)),
    y1: Math.min(100, Math.max(0, hi)),
    label: `step ${i + 1}: [${round4(lo)}, ${round4(hi)}]`,
  }));
}
