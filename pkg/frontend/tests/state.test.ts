import { describe, expect, it } from "vitest";

import type { SessionView } from "../src/api.js";
import {
  canAccept,
  canStop,
  initialState,
  phaseTitle,
  screenFor,
  selectionItems,
  withCutoffs,
  withError,
  withSession,
} from "../src/state.js";

function view(overrides: Partial<SessionView> = {}): SessionView {
  return {
    id: "s1",
    phase: "relax_activities",
    threshold: 0.95,
    floor: 0.05,
    step: 0.05,
    current_selection: ["a", "b", "c"],
    added_items: ["c"],
    accepted_pattern: [],
    accepted_dbcs: [],
    at_floor: false,
    history: [],
    sample_size: 30,
    ...overrides,
  };
}

describe("selectionItems", () => {
  it("flags exactly the service-reported added_items as new", () => {
    const items = selectionItems(view({ current_selection: ["a", "b", "c", "d"], added_items: ["b", "d"] }));
    const highlighted = items.filter((i) => i.isNew).map((i) => i.label);
    expect(highlighted).toEqual(["b", "d"]);
    expect(items.filter((i) => !i.isNew).map((i) => i.label)).toEqual(["a", "c"]);
  });

  it("highlights nothing when the step admitted nothing", () => {
    const items = selectionItems(view({ added_items: [] }));
    expect(items.some((i) => i.isNew)).toBe(false);
    expect(items.map((i) => i.label)).toEqual(["a", "b", "c"]);
  });

  it("renders every accepted item, in the service's order", () => {
    const items = selectionItems(view({ current_selection: ["x", "y"], added_items: ["x", "y"] }));
    expect(items).toEqual([
      { label: "x", isNew: true },
      { label: "y", isNew: true },
    ]);
  });
});

describe("screen and control derivation", () => {
  it("maps phases to screens", () => {
    let state = withSession(initialState, view());
    expect(screenFor(state)).toBe("relaxation");
    state = withSession(state, view({ phase: "relax_dbcs" }));
    expect(screenFor(state)).toBe("relaxation");
    state = withSession(state, view({ phase: "calibrate" }));
    expect(screenFor(state)).toBe("curve");
    state = withSession(state, view({ phase: "done" }));
    expect(screenFor(state)).toBe("curve"); // no cut-offs confirmed yet
    state = withCutoffs(state, 1, 2, "elbow");
    expect(screenFor(state)).toBe("review");
  });

  it("disables accept at the floor but still allows stop", () => {
    const atFloor = view({ at_floor: true });
    expect(canAccept(atFloor)).toBe(false);
    expect(canStop(atFloor)).toBe(true);
  });

  it("disables both relaxation controls after calibration starts", () => {
    const done = view({ phase: "calibrate" });
    expect(canAccept(done)).toBe(false);
    expect(canStop(done)).toBe(false);
  });

  it("titles each phase distinctly", () => {
    const titles = new Set(
      (["relax_activities", "relax_dbcs", "calibrate", "done"] as const).map((phase) =>
        phaseTitle(view({ phase })),
      ),
    );
    expect(titles.size).toBe(4);
  });
});

describe("error handling never mutates session state", () => {
  it("keeps the last session view intact", () => {
    const session = view();
    const state = withError(withSession(initialState, session), "conflict: step in flight");
    expect(state.session).toEqual(session);
    expect(state.error).toContain("conflict");
    expect(state.busy).toBe(false);
  });
});
