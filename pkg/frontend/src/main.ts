// DOM wiring for the workbench. All behavior lives in state.ts/api.ts;
// this file only reads inputs, drives the state transitions, and renders.

import { debounce, httpFetcher, SequenceGuard } from "./api.js";
import { boundBar, socRibbon } from "./blocks.js";
import { ContractDraft } from "./constraints.js";
import {
  branchFromSnapshot,
  evaluateAircraft,
  initialState,
  loadState,
  Operation,
  runMissionBoard,
  runOperation,
  saveState,
  WorkbenchState,
} from "./state.js";

const fetcher = httpFetcher("");
let state: WorkbenchState = typeof localStorage !== "undefined" ? loadState(localStorage) : initialState();

const $ = <T extends HTMLElement>(id: string): T => document.getElementById(id) as T;

function draftToText(draft: ContractDraft): string {
  return JSON.stringify(draft, null, 2);
}

function textToDraft(text: string): ContractDraft | null {
  try {
    const parsed = JSON.parse(text);
    return {
      input_vars: parsed.input_vars ?? [],
      output_vars: parsed.output_vars ?? [],
      assumptions: parsed.assumptions ?? [],
      guarantees: parsed.guarantees ?? [],
    };
  } catch {
    return null;
  }
}

function persist(): void {
  if (typeof localStorage !== "undefined") saveState(state, localStorage);
}

// --- algebra panel ----------------------------------------------------------

function readDrafts(): boolean {
  const first = textToDraft(($("first-pane") as HTMLTextAreaElement).value);
  const second = textToDraft(($("second-pane") as HTMLTextAreaElement).value);
  const badge = $("draft-badge");
  if (!first || !second) {
    badge.textContent = "invalid JSON";
    badge.className = "badge bad";
    return false;
  }
  state = { ...state, first, second };
  badge.textContent = "drafts ok";
  badge.className = "badge good";
  return true;
}

function renderOutcome(): void {
  const out = $("operation-result");
  const diag = $("operation-diagnostic");
  diag.innerHTML = "";
  const outcome = state.lastOutcome;
  if (!outcome) {
    out.textContent = "";
    return;
  }
  if (outcome.ok) {
    out.textContent = outcome.block ?? "";
    return;
  }
  out.textContent = outcome.error ?? "error";
  if (outcome.highlight && outcome.diagnostic) {
    const second = state.second;
    const list = document.createElement("div");
    list.innerHTML = `<p>failing assumption terms (could not be discharged using guarantees [${outcome.diagnostic.context_terms.join(
      ", ",
    )}]):</p>`;
    second.assumptions.forEach((line, i) => {
      const row = document.createElement("code");
      row.textContent = line;
      row.className = outcome.highlight!.indices.includes(i) ? "term failing" : "term";
      list.appendChild(row);
    });
    diag.appendChild(list);
  }
}

async function onRun(): Promise<void> {
  if (!readDrafts()) return;
  state = { ...state, operation: ($("operation-select") as HTMLSelectElement).value as Operation, keep: ($("keep-input") as HTMLInputElement).value };
  state = await runOperation(state, fetcher);
  renderOutcome();
  persist();
}

// --- aircraft panel ---------------------------------------------------------

const aircraftGuard = new SequenceGuard();

async function evaluateNow(): Promise<void> {
  const seq = aircraftGuard.next();
  const next = await evaluateAircraft(state, fetcher);
  if (!aircraftGuard.accept(seq)) return; // superseded by a newer slider position
  state = next;
  renderAircraft();
  persist();
}

const debouncedEvaluate = debounce(() => void evaluateNow(), 250);

function renderAircraft(): void {
  const o = state.aircraftOutcome;
  const badge = $("refine-badge");
  const teBar = $("te-bar");
  const toutBar = $("tout-bar");
  const teLabel = $("te-label");
  const toutLabel = $("tout-label");
  for (const el of [teBar, toutBar]) el.style.display = "none";
  if (!o) {
    badge.textContent = "no data";
    badge.className = "badge";
    return;
  }
  if (o.error) {
    badge.textContent = o.error;
    badge.className = "badge bad";
    teLabel.textContent = toutLabel.textContent = "";
    return;
  }
  badge.textContent = o.refines ? "refines Spec" : "does not refine Spec";
  badge.className = o.refines ? "badge good" : "badge bad";
  if (o.teBounds) {
    const bar = boundBar(o.teBounds, [280, 360]);
    teBar.style.display = "block";
    teBar.style.left = `${bar.left}%`;
    teBar.style.width = `${bar.width}%`;
    teLabel.textContent = `T_e ${bar.label} vs [300, 330]`;
  }
  if (o.toutBounds) {
    const tIn = 288;
    const bar = boundBar(o.toutBounds, [tIn - 20, tIn + 20]);
    toutBar.style.display = "block";
    toutBar.style.left = `${bar.left}%`;
    toutBar.style.width = `${bar.width}%`;
    toutLabel.textContent = `T_out ${bar.label} vs nominal T_in +/- 10`;
  }
}

function bindSlider(id: string, key: keyof typeof state.aircraft, labelId: string): void {
  const input = $(id) as HTMLInputElement;
  input.addEventListener("input", () => {
    const value = key === "hx" ? input.value : Number(input.value);
    state = { ...state, aircraft: { ...state.aircraft, [key]: value } };
    $(labelId).textContent = String(input.value);
    debouncedEvaluate();
  });
}

// --- mission panel ----------------------------------------------------------

function renderMission(): void {
  const o = state.missionOutcome;
  const badge = $("mission-badge");
  const ribbon = $("mission-ribbon");
  const terms = $("mission-terms");
  ribbon.innerHTML = "";
  terms.textContent = "";
  if (!o) {
    badge.textContent = "no data";
    badge.className = "badge";
    return;
  }
  if (o.error) {
    badge.textContent = o.error;
    badge.className = "badge bad";
    return;
  }
  badge.textContent = o.admissible ? "admissible" : "not admissible";
  badge.className = o.admissible ? "badge good" : "badge bad";
  if (o.socBounds) {
    for (const step of socRibbon(o.socBounds)) {
      const bar = document.createElement("div");
      bar.className = "ribbon-bar";
      bar.style.left = `${step.x}%`;
      bar.style.bottom = `${step.y0}%`;
      bar.style.height = `${Math.max(1, step.y1 - step.y0)}%`;
      bar.title = step.label;
      ribbon.appendChild(bar);
    }
  }
  terms.textContent = o.assumptions.length ? `derived assumptions: ${o.assumptions.join(" ; ")}` : "";
  renderHistory();
}

function renderHistory(): void {
  const list = $("history-list");
  list.innerHTML = "";
  state.history.forEach((snap, i) => {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = `${snap.label} (${snap.outcome?.admissible ? "ok" : "fail"})`;
    button.addEventListener("click", () => {
      state = branchFromSnapshot(state, i);
      syncMissionInputs();
      renderMission();
    });
    item.appendChild(button);
    list.appendChild(item);
  });
}

function syncMissionInputs(): void {
  ($("min-soc") as HTMLInputElement).value = String(state.mission.minSoc);
  ($("min-duration") as HTMLInputElement).value = String(state.mission.minStepDuration);
  ($("initial-data") as HTMLInputElement).value = String(state.mission.initialDataVolume);
  ($("initial-uncertainty") as HTMLInputElement).value = String(state.mission.initialUncertainty);
  $("sequence-chips").textContent = state.mission.sequence.join(" > ");
}

async function onMissionRun(): Promise<void> {
  state = {
    ...state,
    mission: {
      ...state.mission,
      minSoc: Number(($("min-soc") as HTMLInputElement).value),
      minStepDuration: Number(($("min-duration") as HTMLInputElement).value),
      initialDataVolume: Number(($("initial-data") as HTMLInputElement).value),
      initialUncertainty: Number(($("initial-uncertainty") as HTMLInputElement).value),
    },
  };
  state = await runMissionBoard(state, fetcher);
  renderMission();
  persist();
}

// --- boot -------------------------------------------------------------------

export function boot(): void {
  ($("first-pane") as HTMLTextAreaElement).value = draftToText(state.first);
  ($("second-pane") as HTMLTextAreaElement).value = draftToText(state.second);
  ($("operation-select") as HTMLSelectElement).value = state.operation;
  $("run-operation").addEventListener("click", () => void onRun());
  ["first-pane", "second-pane"].forEach((id) =>
    $(id).addEventListener("input", () => {
      readDrafts();
      persist();
    }),
  );

  bindSlider("alt-slider", "alt", "alt-value");
  bindSlider("thrust-slider", "thrust", "thrust-value");
  bindSlider("mdotin-slider", "mdot_in", "mdotin-value");
  bindSlider("mdota-slider", "mdot_a", "mdota-value");
  bindSlider("eps-slider", "eps", "eps-value");
  $("hx-select").addEventListener("change", () => {
    state = { ...state, aircraft: { ...state.aircraft, hx: ($("hx-select") as HTMLSelectElement).value as "fixed" | "controlled" } };
    debouncedEvaluate();
  });

  $("mission-run").addEventListener("click", () => void onMissionRun());
  syncMissionInputs();
  renderMission();
  renderAircraft();
  void evaluateNow();
}

if (typeof document !== "undefined" && document.getElementById("first-pane")) {
  boot();
}
