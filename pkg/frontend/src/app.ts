/**
 * DOM wiring for the session wizard. All state lives in a single UiState
 * re-rendered wholesale after every service response; controls are disabled
 * while a request is in flight (no optimistic updates).
 */

import { ApiClient, ApiError, type SessionView } from "./api.js";
import { curveSvg, layoutCurve, nearestFrontierPoint } from "./curve.js";
import {
  canAccept,
  canStop,
  initialState,
  phaseTitle,
  screenFor,
  selectionItems,
  thresholdLabel,
  withBusy,
  withCurve,
  withCutoffs,
  withError,
  withSession,
  type UiState,
} from "./state.js";

const api = new ApiClient();
let state: UiState = initialState;
let reviewPage = 1;

function setState(next: UiState): void {
  state = next;
  render();
}

async function call<T>(action: () => Promise<T>, apply: (value: T) => UiState): Promise<void> {
  setState(withBusy(state));
  try {
    apply(await action());
    render();
  } catch (err) {
    if (err instanceof ApiError && err.isConflict && state.session) {
      // non-destructive: refetch authoritative state, then show the banner
      const session = await api.getSession(state.session.id);
      state = withError(withSession(state, session), err.message);
    } else {
      state = withError(state, err instanceof Error ? err.message : String(err));
    }
    render();
  }
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(label: string, onClick: () => void, enabled = true): HTMLButtonElement {
  const node = el("button", undefined, label);
  node.disabled = !enabled || state.busy;
  node.addEventListener("click", onClick);
  return node;
}

/* ---- screens ---- */

function startScreen(root: HTMLElement): void {
  const panel = el("section", "panel");
  panel.append(el("h2", undefined, "Start a session"));
  const form = el("div", "form-grid");
  const fields: Array<[string, string, string]> = [
    ["seed", "Seed", "0"],
    ["sample_size", "Sample size", "30"],
    ["step", "Step size", "0.05"],
    ["floor", "Threshold floor", "0.05"],
  ];
  const inputs = new Map<string, HTMLInputElement>();
  for (const [name, label, fallback] of fields) {
    const wrap = el("label", "field", label + " ");
    const input = el("input");
    input.value = fallback;
    input.name = name;
    inputs.set(name, input);
    wrap.append(input);
    form.append(wrap);
  }
  panel.append(form);
  panel.append(
    button("Create session", () =>
      call(
        () =>
          api.createSession({
            seed: Number(inputs.get("seed")!.value),
            sample_size: Number(inputs.get("sample_size")!.value),
            step: Number(inputs.get("step")!.value),
            floor: Number(inputs.get("floor")!.value),
          }),
        (session) => (state = withSession(state, session)),
      ),
    ),
  );
  root.append(panel);
}

function relaxationScreen(root: HTMLElement, session: SessionView): void {
  const panel = el("section", "panel");
  panel.append(el("h2", undefined, phaseTitle(session)));
  panel.append(el("p", "threshold", thresholdLabel(session)));
  if (session.at_floor) {
    panel.append(el("p", "hint", "At the floor — stop to freeze this selection."));
  }

  const list = el("ul", "selection");
  for (const item of selectionItems(session)) {
    const entry = el("li", item.isNew ? "item new" : "item", item.label);
    list.append(entry);
  }
  if (!session.current_selection.length) {
    list.append(el("li", "item empty", "(nothing frequent at this threshold)"));
  }
  panel.append(list);

  const controls = el("div", "controls");
  controls.append(
    button("Accept (lower threshold)", () => doStep("accept"), canAccept(session)),
    button("Stop (freeze selection)", () => doStep("stop"), canStop(session)),
  );
  panel.append(controls);

  if (session.accepted_pattern.length && session.phase === "relax_dbcs") {
    const accepted = el("p", "accepted");
    accepted.textContent = `Accepted pattern: ${session.accepted_pattern.join(", ")}`;
    panel.append(accepted);
  }
  root.append(panel);
}

function doStep(decision: "accept" | "stop"): void {
  const session = state.session;
  if (!session) return;
  void call(
    async () => {
      const view = await api.step(session.id, decision);
      if (view.phase === "calibrate") {
        const curve = await api.curve(view.id);
        return { view, curve };
      }
      return { view, curve: null };
    },
    ({ view, curve }) => {
      state = withSession(state, view);
      if (curve) state = withCurve(state, curve);
      return state;
    },
  );
}

function curveScreen(root: HTMLElement, session: SessionView): void {
  const panel = el("section", "panel");
  panel.append(el("h2", undefined, phaseTitle(session)));
  const curve = state.curve;
  if (!curve) {
    panel.append(el("p", "hint", "Loading recall curve…"));
    void call(
      () => api.curve(session.id),
      (payload) => (state = withCurve(state, payload)),
    );
    root.append(panel);
    return;
  }
  if (!curve.frontier.length) {
    panel.append(
      el("p", "hint", "No usable frontier — widen the sample or lower the thresholds."),
    );
    root.append(panel);
    return;
  }

  const layout = layoutCurve(curve);
  const holder = el("div", "curve-holder");
  holder.innerHTML = curveSvg(layout);
  const svg = holder.querySelector("svg")!;
  svg.addEventListener("click", (event) => {
    const rect = svg.getBoundingClientRect();
    const x = ((event.clientX - rect.left) / rect.width) * layout.width;
    const y = ((event.clientY - rect.top) / rect.height) * layout.height;
    const hit = nearestFrontierPoint(layout, x, y);
    if (hit) chooseCutoffs(hit.point.alpha_f, hit.point.alpha_d, "manual");
  });
  panel.append(holder);

  const controls = el("div", "controls");
  controls.append(
    button("Use elbow", () => chooseCutoffs(curve.elbow.alpha_f, curve.elbow.alpha_d, "elbow")),
  );
  if (curve.lee_liu) {
    const ll = curve.lee_liu;
    controls.append(button("Use Lee-Liu", () => chooseCutoffs(ll.alpha_f, ll.alpha_d, "lee_liu")));
  }
  panel.append(controls);
  panel.append(
    el(
      "p",
      "hint",
      "Click a frontier point to pick its cut-offs manually, or take a suggestion.",
    ),
  );
  root.append(panel);
}

function chooseCutoffs(alphaF: number, alphaD: number, method: "elbow" | "lee_liu" | "manual"): void {
  const session = state.session;
  if (!session) return;
  reviewPage = 1;
  void call(
    async () => {
      await api.setCutoffs(session.id, alphaF, alphaD, method);
      return api.getSession(session.id);
    },
    (view) => {
      state = withCutoffs(withSession(state, view), alphaF, alphaD, method);
      return state;
    },
  );
}

function reviewScreen(root: HTMLElement, session: SessionView): void {
  const cutoffs = state.cutoffs!;
  const panel = el("section", "panel");
  panel.append(el("h2", undefined, phaseTitle(session)));
  panel.append(
    el(
      "p",
      "hint",
      `Cut-offs α_F=${cutoffs.alphaF}, α_D=${cutoffs.alphaD} (${cutoffs.method}).`,
    ),
  );

  const table = el("table", "members");
  table.innerHTML =
    "<thead><tr><th>patient</th><th>activity score</th><th>code score</th></tr></thead>";
  const body = el("tbody");
  table.append(body);
  panel.append(table);
  const pager = el("div", "controls");
  panel.append(pager);

  void api
    .classification(session.id, cutoffs.alphaF, cutoffs.alphaD, reviewPage)
    .then((page) => {
      for (const row of page.members) {
        const tr = el("tr");
        tr.append(
          el("td", undefined, row.patient_id),
          el("td", undefined, String(row.activity_score)),
          el("td", undefined, String(row.dbc_score)),
        );
        body.append(tr);
      }
      pager.append(
        button("Prev", () => {
          reviewPage = Math.max(1, reviewPage - 1);
          render();
        }, page.page > 1),
        el("span", "page-label", ` page ${page.page}/${page.total_pages} (${page.total} members) `),
        button("Next", () => {
          reviewPage += 1;
          render();
        }, page.page < page.total_pages),
        button("Export CSV", () => void exportCsv(session.id, cutoffs.alphaF, cutoffs.alphaD)),
        button("Download definition", () => void exportDefinition(session.id)),
      );
    })
    .catch((err) => setState(withError(state, String(err))));
  root.append(panel);
}

async function exportCsv(id: string, alphaF: number, alphaD: number): Promise<void> {
  const csv = await api.classificationCsv(id, alphaF, alphaD);
  download("members.csv", csv, "text/csv");
}

async function exportDefinition(id: string): Promise<void> {
  const text = await api.definitionText(id);
  download("definition.json", text, "application/json");
}

function download(name: string, content: string, type: string): void {
  const url = URL.createObjectURL(new Blob([content], { type }));
  const link = el("a");
  link.href = url;
  link.download = name;
  link.click();
  URL.revokeObjectURL(url);
}

/* ---- root render ---- */

function render(): void {
  const root = document.getElementById("app");
  if (!root) return;
  root.replaceChildren();

  if (state.error) {
    const banner = el("div", "banner error", state.error);
    banner.append(button("Dismiss", () => setState(withError(state, ""))));
    if (state.error) root.append(banner);
  }

  if (!state.session) {
    startScreen(root);
    return;
  }
  switch (screenFor(state)) {
    case "relaxation":
      relaxationScreen(root, state.session);
      break;
    case "curve":
      curveScreen(root, state.session);
      break;
    case "review":
      reviewScreen(root, state.session);
      break;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  render();
}
