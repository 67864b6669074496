// Payload shapes mirrored from the workbench HTTP API (fbce_version 1).
// These are client-side views only; the server owns all domain math.

export type DimensionName = "Function" | "Behavior" | "Characteristic" | "Environment";

export type StageName =
  | "Ingested"
  | "Classified"
  | "Reviewed"
  | "Framed"
  | "Inverted"
  | "Screened"
  | "Ranked"
  | "Clustered";

export interface StageRecord {
  complete: boolean;
  stale: boolean;
  params: Record<string, unknown>;
  seed: number | null;
}

export interface ProjectSummary {
  id: string;
  name: string;
  stages: Record<StageName, StageRecord>;
  head: number;
  problem: unknown;
  has_kb: boolean;
  judgment: { order: string[]; ratios: number[] } | null;
  frames: string[];
  batches: number;
}

export interface LabeledRecord {
  id: string;
  text: string;
  labels: DimensionName[];
  scores: Record<DimensionName, number>;
  source: string;
  doc_id: string;
  span: [number, number];
}

export type BatchStatus = "Open" | "Clean" | "Dirty";
export type VerdictValue = "Pass" | "Fail";

export interface BatchView {
  batch_no: number;
  items: LabeledRecord[];
  audit_sample: string[];
  verdicts: Record<string, VerdictValue>;
  status: BatchStatus;
  rounds: number;
}

export interface BatchSummary {
  batch_no: number;
  size: number;
  audit_sample: string[];
  status: BatchStatus;
  rounds: number;
}

export type FunctionDoc =
  | { kind: "action"; verb: string; object: string }
  | { kind: "flow"; flow_kind: "energy" | "material" | "signal"; input_object: string; output_object: string }
  | { kind: "state"; object: string; change_verb: string };

export interface NounPhraseDoc {
  head: string;
  attributives: string[];
}

export interface CausalLinkDoc {
  cause: [number, number];
  effect: FunctionDoc;
  conjunction: string;
}

export interface FrameDoc {
  fbce_version: 1;
  id: string;
  behavior: { summary: string; steps: FunctionDoc[]; causal_links: CausalLinkDoc[] };
  functions: FunctionDoc[];
  characteristics: NounPhraseDoc[];
  environment: NounPhraseDoc | null;
  provenance: {
    source_doc: string;
    sentence_ids: string[];
    elementary_ids: string[];
    notes: string;
  };
}

export interface Violation {
  code: string;
  path: string;
  message: string;
}

export interface VikorReport {
  alternatives: string[];
  S: Record<string, number>;
  R: Record<string, number>;
  Q: Record<string, number>;
  v: number;
  ranking: string[];
  compromise_set: string[];
  conditions: {
    acceptable_advantage: boolean | null;
    acceptable_stability: boolean | null;
    dq: number | null;
  };
  warnings: string[];
}

export interface DecisionReport {
  matrix: { alternatives: string[]; criteria: string[]; scores: number[][] };
  weights: Record<string, number>;
  judgment: { order: string[]; ratios: number[] };
  v: number;
  vikor: VikorReport;
}

export interface ClusterReportDoc {
  members: string[];
  clusters: string[][];
  similarity: number[][];
  threshold: number;
  composites: FrameDoc[];
  conflicts: string[];
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  path: string;
  details?: { violations?: Violation[] } & Record<string, unknown>;
}
