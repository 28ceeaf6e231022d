/**
 * Pure view-state helpers. The UI is a function of the last service
 * response plus in-flight intent: everything here derives display state
 * from a SessionView without mutating it, so a full refresh reproduces
 * the identical view.
 */

import type { CurvePayload, SessionView } from "./api.js";

export type Screen = "relaxation" | "curve" | "review";

export interface UiState {
  session: SessionView | null;
  curve: CurvePayload | null;
  /** Cut-offs confirmed via POST /cutoffs, if any. */
  cutoffs: { alphaF: number; alphaD: number; method: string } | null;
  /** A step request is in flight; controls must be disabled. */
  busy: boolean;
  error: string | null;
}

export const initialState: UiState = {
  session: null,
  curve: null,
  cutoffs: null,
  busy: false,
  error: null,
};

/** Which screen the session's phase puts us on. */
export function screenFor(state: UiState): Screen {
  const phase = state.session?.phase;
  if (phase === "calibrate") return "curve";
  if (phase === "done") return state.cutoffs ? "review" : "curve";
  return "relaxation";
}

export interface SelectionItem {
  label: string;
  /** True exactly when the item arrived in the latest accepted step. */
  isNew: boolean;
}

/**
 * The accepted selection as rendered: every current item, with the ones
 * admitted by the latest step flagged for highlighting. The flagged set is
 * exactly the service's added_items — no client-side re-derivation.
 */
export function selectionItems(view: SessionView): SelectionItem[] {
  const added = new Set(view.added_items);
  return view.current_selection.map((label) => ({ label, isNew: added.has(label) }));
}

export function phaseTitle(view: SessionView): string {
  switch (view.phase) {
    case "relax_activities":
      return "Phase 1 — relax the activity threshold";
    case "relax_dbcs":
      return "Phase 2 — relax the code threshold";
    case "calibrate":
      return "Phase 3 — pick cut-offs on the recall curve";
    case "done":
      return "Review the selected group";
  }
}

/** Accept is only meaningful in a relaxation phase and above the floor. */
export function canAccept(view: SessionView): boolean {
  return (
    (view.phase === "relax_activities" || view.phase === "relax_dbcs") && !view.at_floor
  );
}

export function canStop(view: SessionView): boolean {
  return view.phase === "relax_activities" || view.phase === "relax_dbcs";
}

export function thresholdLabel(view: SessionView): string {
  const phi = view.phase === "relax_activities" ? "activity support" : "code support";
  return `${phi} ≥ ${view.threshold.toFixed(2)}`;
}

/* ---- reducers: each returns a fresh state ---- */

export function withSession(state: UiState, session: SessionView): UiState {
  return { ...state, session, busy: false, error: null };
}

export function withCurve(state: UiState, curve: CurvePayload): UiState {
  return { ...state, curve, busy: false, error: null };
}

export function withCutoffs(
  state: UiState,
  alphaF: number,
  alphaD: number,
  method: string,
): UiState {
  return { ...state, cutoffs: { alphaF, alphaD, method }, busy: false, error: null };
}

export function withBusy(state: UiState): UiState {
  return { ...state, busy: true, error: null };
}

/**
 * A failed request never mutates session state; conflicts ask the caller
 * to refetch, anything else just surfaces the banner.
 */
export function withError(state: UiState, message: string): UiState {
  return { ...state, busy: false, error: message };
}
