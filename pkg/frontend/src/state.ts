// Workbench state and its transitions. Everything here is pure and
// fetcher-injected so behavior is unit-testable without a browser; the DOM
// layer in main.ts only renders this state. The UI never computes algebra
// locally: rendered contracts and numbers come from service responses.

import { ApiResponse, Fetcher } from "./api.js";
import { ContractJson, formatBlock } from "./blocks.js";
import { checkDraft, ContractDraft } from "./constraints.js";

export type Operation = "compose" | "quotient" | "merge" | "refines";

export interface Diagnostic {
  failed_terms: string[];
  context_terms: string[];
  variables: string[];
}

export interface HighlightInfo {
  pane: "first" | "second";
  kind: "assumptions" | "guarantees";
  indices: number[];
  terms: string[];
}

export interface OperationOutcome {
  ok: boolean;
  block?: string;
  result?: unknown;
  diagnostic?: Diagnostic;
  highlight?: HighlightInfo;
  error?: string;
  elapsedMs?: number;
}

export interface AircraftState {
  alt: number;
  thrust: number;
  mdot_in: number;
  mdot_a: number;
  eps: number;
  hx: "fixed" | "controlled";
}

export interface AircraftOutcome {
  refines: boolean;
  teBounds: [number, number] | null;
  toutBounds: [number, number] | null;
  error?: string;
}

export interface MissionState {
  sequence: string[];
  minSoc: number;
  minStepDuration: number;
  initialDataVolume: number;
  initialUncertainty: number;
}

export interface MissionOutcome {
  admissible: boolean;
  socBounds: [number, number][] | null;
  assumptions: string[];
  error?: string;
}

export interface Snapshot {
  label: string;
  mission: MissionState;
  outcome: MissionOutcome | null;
}

export interface WorkbenchState {
  first: ContractDraft;
  second: ContractDraft;
  operation: Operation;
  keep: string;
  lastOutcome: OperationOutcome | null;
  aircraft: AircraftState;
  aircraftOutcome: AircraftOutcome | null;
  mission: MissionState;
  missionOutcome: MissionOutcome | null;
  history: Snapshot[];
}

export const DEFAULT_FIRST: ContractDraft = {
  input_vars: ["i"],
  output_vars: ["o"],
  assumptions: ["|i| <= 2"],
  guarantees: ["o - i <= 0", "i - 2o <= 2"],
};

export const DEFAULT_SECOND: ContractDraft = {
  input_vars: ["o"],
  output_vars: ["o_p"],
  assumptions: ["o <= 0.2", "-o <= 1"],
  guarantees: ["o_p - o <= 0"],
};

export function initialState(): WorkbenchState {
  return {
    first: DEFAULT_FIRST,
    second: DEFAULT_SECOND,
    operation: "compose",
    keep: "",
    lastOutcome: null,
    aircraft: { alt: 15, thrust: 20000, mdot_in: 9.316, mdot_a: 0.429, eps: 0.01, hx: "controlled" },
    aircraftOutcome: null,
    mission: {
      sequence: ["DSN", "CHRG", "SBO", "TCM_H", "TCM_DV"],
      minSoc: 60,
      minStepDuration: 10,
      initialDataVolume: 80,
      initialUncertainty: 50,
    },
    missionOutcome: null,
    history: [],
  };
}

const norm = (s: string) => s.replace(/\s+/g, "");

/** Map diagnostic terms back onto editor lines for highlighting. */
export function matchFailedTerms(failed: string[], draft: ContractDraft): HighlightInfo {
  const wanted = new Set(failed.map(norm));
  const indices: number[] = [];
  draft.assumptions.forEach((line, i) => {
    if (wanted.has(norm(line))) indices.push(i);
  });
  return { pane: "second", kind: "assumptions", indices, terms: failed };
}

export async function runOperation(state: WorkbenchState, fetcher: Fetcher): Promise<WorkbenchState> {
  const firstCheck = checkDraft(state.first);
  const secondCheck = checkDraft(state.second);
  if (!firstCheck.ok || !secondCheck.ok) {
    // local validation badge; no request is sent
    return {
      ...state,
      lastOutcome: { ok: false, error: [...firstCheck.issues, ...secondCheck.issues].join("; ") },
    };
  }
  const body: Record<string, unknown> = { contracts: [state.first, state.second] };
  if (state.operation === "compose" && state.keep.trim()) {
    body.options = { keep: state.keep.split(",").map((s) => s.trim()).filter(Boolean) };
  }
  let response: ApiResponse;
  try {
    response = await fetcher(`/api/${state.operation}`, body);
  } catch (err) {
    return { ...state, lastOutcome: { ok: false, error: `network: ${String(err)}` } };
  }
  if (!response.ok) {
    const outcome: OperationOutcome = {
      ok: false,
      error: response.error,
      elapsedMs: response.elapsed_ms,
    };
    if (response.diagnostic) {
      outcome.diagnostic = response.diagnostic;
      outcome.highlight = matchFailedTerms(response.diagnostic.failed_terms, state.second);
    }
    return { ...state, lastOutcome: outcome };
  }
  const outcome: OperationOutcome = { ok: true, result: response.result, elapsedMs: response.elapsed_ms };
  if (state.operation === "refines") {
    outcome.block = JSON.stringify(response.result, null, 2);
  } else {
    outcome.block = formatBlock(response.result as ContractJson);
  }
  return { ...state, lastOutcome: outcome };
}

export async function evaluateAircraft(state: WorkbenchState, fetcher: Fetcher): Promise<WorkbenchState> {
  const a = state.aircraft;
  let response: ApiResponse;
  try {
    response = await fetcher("/api/aircraft/evaluate", {
      options: { alt: a.alt, thrust: a.thrust, mdot_in: a.mdot_in, mdot_a: a.mdot_a, eps: a.eps, hx: a.hx },
    });
  } catch (err) {
    return { ...state, aircraftOutcome: { refines: false, teBounds: null, toutBounds: null, error: String(err) } };
  }
  if (!response.ok) {
    return {
      ...state,
      aircraftOutcome: { refines: false, teBounds: null, toutBounds: null, error: response.error },
    };
  }
  const r = response.result as {
    refines_spec: boolean;
    te_bounds: [number, number] | null;
    tout_bounds: [number, number] | null;
  };
  return {
    ...state,
    aircraftOutcome: { refines: r.refines_spec, teBounds: r.te_bounds, toutBounds: r.tout_bounds },
  };
}

export async function runMissionBoard(state: WorkbenchState, fetcher: Fetcher): Promise<WorkbenchState> {
  const m = state.mission;
  let response: ApiResponse;
  try {
    response = await fetcher("/api/mission/schedulability", {
      options: {
        sequence: m.sequence,
        requirements: {
          min_soc: m.minSoc,
          min_step_duration: m.minStepDuration,
          initial_data_volume: m.initialDataVolume,
          initial_uncertainty: m.initialUncertainty,
        },
      },
    });
  } catch (err) {
    return { ...state, missionOutcome: { admissible: false, socBounds: null, assumptions: [], error: String(err) } };
  }
  if (!response.ok) {
    return {
      ...state,
      missionOutcome: { admissible: false, socBounds: null, assumptions: [], error: response.error },
    };
  }
  const r = response.result as {
    admissible: boolean;
    soc_bounds: [number, number][] | null;
    assumptions: string[];
  };
  const outcome: MissionOutcome = {
    admissible: r.admissible,
    socBounds: r.soc_bounds,
    assumptions: r.assumptions,
  };
  const snapshot: Snapshot = {
    label: `#${state.history.length + 1} ${m.sequence.join(">")} soc>=${m.minSoc}`,
    mission: { ...m, sequence: [...m.sequence] },
    outcome,
  };
  return { ...state, missionOutcome: outcome, history: [...state.history, snapshot] };
}

/** Branch the board from a prior snapshot (history stays append-only). */
export function branchFromSnapshot(state: WorkbenchState, index: number): WorkbenchState {
  const snap = state.history[index];
  if (!snap) return state;
  return {
    ...state,
    mission: { ...snap.mission, sequence: [...snap.mission.sequence] },
    missionOutcome: snap.outcome,
  };
}

const STORAGE_KEY = "contract-forge-workbench";

export function saveState(state: WorkbenchState, storage: Pick<Storage, "setItem">): void {
  storage.setItem(
    STORAGE_KEY,
    JSON.stringify({
      first: state.first,
      second: state.second,
      operation: state.operation,
      aircraft: state.aircraft,
      mission: state.mission,
      history: state.history,
    }),
  );
}

export function loadState(storage: Pick<Storage, "getItem">): WorkbenchState {
  const base = initialState();
  const raw = storage.getItem(STORAGE_KEY);
  if (!raw) return base;
  try {
    const saved = JSON.parse(raw);
    return { ...base, ...saved, lastOutcome: null, aircraftOutcome: null, missionOutcome: null };
  } catch {
    return base;
  }
}
