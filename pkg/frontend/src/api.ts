/**
 * Typed client for the cohortminer session API. Every mutation goes through
 * these endpoints; the UI never recomputes supports, scores, or cut-off
 * suggestions on its own.
 */

export interface HistoryEntry {
  phase: string;
  threshold: number;
  decision: "accept" | "stop";
  added: string[];
}

export interface SessionView {
  id: string;
  phase: "relax_activities" | "relax_dbcs" | "calibrate" | "done";
  threshold: number;
  floor: number;
  step: number;
  current_selection: string[];
  added_items: string[];
  accepted_pattern: string[];
  accepted_dbcs: string[];
  at_floor: boolean;
  history: HistoryEntry[];
  sample_size: number;
}

export interface CurvePoint {
  alpha_f: number;
  alpha_d: number;
  group_size: number;
  recall_bar: number;
}

export interface CurvePayload {
  points: CurvePoint[];
  frontier: CurvePoint[];
  elbow: CurvePoint;
  lee_liu: CurvePoint | null;
  degenerate: boolean;
}

export interface ClassificationRow {
  patient_id: string;
  activity_score: number;
  dbc_score: number;
}

export interface ClassificationPage {
  total: number;
  page: number;
  page_size: number;
  total_pages: number;
  members: ClassificationRow[];
}

export interface SessionOptions {
  log_id?: string;
  sample_size?: number;
  split?: number;
  seed?: number;
  step?: number;
  floor?: number;
  sample?: string[];
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }

  /** Conflicts (409) are recoverable: refetch state, show a banner. */
  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status line */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return unwrap<T>(response);
  }

  private async get<T>(path: string): Promise<T> {
    return unwrap<T>(await fetch(this.baseUrl + path));
  }

  createSession(options: SessionOptions = {}): Promise<SessionView> {
    return this.post<SessionView>("/sessions", options);
  }

  getSession(id: string): Promise<SessionView> {
    return this.get<SessionView>(`/sessions/${id}`);
  }

  step(id: string, decision: "accept" | "stop"): Promise<SessionView> {
    return this.post<SessionView>(`/sessions/${id}/step`, { decision });
  }

  curve(id: string): Promise<CurvePayload> {
    return this.get<CurvePayload>(`/sessions/${id}/curve`);
  }

  setCutoffs(
    id: string,
    alphaF: number,
    alphaD: number,
    method: "elbow" | "lee_liu" | "manual" = "manual",
  ): Promise<{ definition: Record<string, unknown>; phase: string }> {
    return this.post(`/sessions/${id}/cutoffs`, {
      alpha_f: alphaF,
      alpha_d: alphaD,
      method,
    });
  }

  /** Raw canonical bytes of the definition, for export and comparison. */
  async definitionText(id: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}/sessions/${id}/definition`);
    if (!response.ok) throw new ApiError(response.status, await response.text());
    return response.text();
  }

  classification(
    id: string,
    alphaF: number,
    alphaD: number,
    page = 1,
    pageSize = 50,
  ): Promise<ClassificationPage> {
    const query = `alpha_f=${alphaF}&alpha_d=${alphaD}&page=${page}&page_size=${pageSize}`;
    return this.get<ClassificationPage>(`/sessions/${id}/classification?${query}`);
  }

  /** Server-rendered CSV, passed through unchanged for export. */
  async classificationCsv(id: string, alphaF: number, alphaD: number): Promise<string> {
    const query = `alpha_f=${alphaF}&alpha_d=${alphaD}&format=csv`;
    const response = await fetch(`${this.baseUrl}/sessions/${id}/classification?${query}`);
    if (!response.ok) throw new ApiError(response.status, await response.text());
    return response.text();
  }
}
