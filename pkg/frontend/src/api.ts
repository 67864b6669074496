// HTTP client for the workbench API. Every mutating request carries the
// event-log head this client last saw (X-FBCE-Head); the server answers a
// stale head with 409, surfaced here as ConflictError so screens can show
// a conflict banner and force a reload.

import type {
  BatchSummary,
  BatchView,
  ClusterReportDoc,
  DecisionReport,
  ErrorEnvelope,
  FrameDoc,
  ProjectSummary,
  VerdictValue,
  Violation,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public path: string,
    public status: number,
    public details?: ErrorEnvelope["details"],
  ) {
    super(message);
  }
}

export class ConflictError extends ApiError {}

async function parseError(response: Response): Promise<never> {
  let envelope: ErrorEnvelope | null = null;
  try {
    envelope = (await response.json()) as ErrorEnvelope;
  } catch {
    // non-envelope error body; fall through
  }
  const code = envelope?.code ?? `HTTP_${response.status}`;
  const message = envelope?.message ?? response.statusText;
  const path = envelope?.path ?? "";
  const cls = response.status === 409 ? ConflictError : ApiError;
  throw new cls(code, message, path, response.status, envelope?.details);
}

export class WorkbenchClient {
  /** Event-log head last observed for the bound project; null = unknown. */
  head: number | null = null;

  constructor(
    public baseUrl: string = "",
    public projectId: string = "",
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    withHead = false,
  ): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (withHead && this.head !== null) {
      headers["X-FBCE-Head"] = String(this.head);
    }
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      await parseError(response);
    }
    if (withHead && this.head !== null) {
      this.head += 1; // one event per accepted mutation
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  private p(path: string): string {
    return `/api/projects/${encodeURIComponent(this.projectId)}${path}`;
  }

  // -- projects ------------------------------------------------------

  listProjects(): Promise<ProjectSummary[]> {
    return this.request("GET", "/api/projects");
  }

  async getProject(): Promise<ProjectSummary> {
    const summary = await this.request<ProjectSummary>("GET", this.p(""));
    this.head = summary.head;
    return summary;
  }

  async refreshHead(): Promise<number> {
    const summary = await this.getProject();
    return summary.head;
  }

  runStage(stage: string, params: Record<string, unknown>): Promise<Record<string, unknown>> {
    return this.request("POST", this.p(`/stages/${stage}/run`), params, true);
  }

  // -- review --------------------------------------------------------

  listBatches(): Promise<BatchSummary[]> {
    return this.request("GET", this.p("/review/batches"));
  }

  getBatch(batchNo: number): Promise<BatchView> {
    return this.request("GET", this.p(`/review/batches/${batchNo}`));
  }

  postVerdicts(
    batchNo: number,
    verdicts: Record<string, VerdictValue>,
  ): Promise<{ batch_no: number; status: string }> {
    return this.request("POST", this.p(`/review/batches/${batchNo}/verdicts`), { verdicts }, true);
  }

  // -- frames --------------------------------------------------------

  listFrames(): Promise<FrameDoc[]> {
    return this.request("GET", this.p("/frames"));
  }

  getFrame(frameId: string): Promise<FrameDoc> {
    return this.request("GET", this.p(`/frames/${encodeURIComponent(frameId)}`));
  }

  putFrame(frame: FrameDoc): Promise<{ frame: string }> {
    return this.request("PUT", this.p(`/frames/${encodeURIComponent(frame.id)}`), frame, true);
  }

  validateFrame(frame: FrameDoc): Promise<{ violations: Violation[] }> {
    return this.request("POST", "/api/frames/validate", frame);
  }

  // -- decision ------------------------------------------------------

  g1Preview(order: string[], ratios: number[]): Promise<{ weights: Record<string, number> }> {
    return this.request("POST", "/api/decision/g1-preview", { order, ratios });
  }

  postJudgment(order: string[], ratios: number[]): Promise<{ weights: Record<string, number> }> {
    return this.request("POST", this.p("/decision/g1-judgment"), { order, ratios }, true);
  }

  getDecision(): Promise<DecisionReport> {
    return this.request("GET", this.p("/decision/result"));
  }

  runDecision(params: Record<string, unknown>): Promise<Record<string, unknown>> {
    return this.request("POST", this.p("/decision/run"), params, true);
  }

  // -- clusters ------------------------------------------------------

  runClusters(k: number, threshold: number): Promise<Record<string, unknown>> {
    return this.request("POST", this.p("/clusters/run"), { k, threshold }, true);
  }

  getClusters(): Promise<ClusterReportDoc> {
    return this.request("GET", this.p("/clusters"));
  }

  getClusterAssessments(): Promise<Record<string, string>> {
    return this.request("GET", this.p("/clusters/assessments"));
  }

  postClusterAssessment(cluster: string, text: string): Promise<{ cluster: string; text: string }> {
    return this.request("POST", this.p("/clusters/assessment"), { cluster, text }, true);
  }
}
