// Wire types of the /v1/ HTTP API. The UI renders entirely from these;
// card rules live on the server.

export interface StepOption {
  id: string;
  title: string;
  description?: string;
}

export interface ModelChoice {
  index: number;
  name: string;
}

export interface TextField {
  key: string;
  title: string;
}

export interface StepSchema {
  type: string;
  options?: StepOption[];
  models?: ModelChoice[];
  fields?: TextField[] | string[];
  allowed_classifications?: string[];
  default_models?: number[];
  subcategory?: StepOption;
  title?: string;
  required?: string[];
  required_when_used?: string[];
  date_format?: string;
}

export interface PreviewField {
  label: string;
  value: string;
}

export interface StepDesc {
  kind: string;
  prompt: string;
  index: number;
  schema: StepSchema;
  current: unknown;
  category?: string;
  subcategory?: string;
  preview?: PreviewField[];
}

export interface CreateSessionResult {
  session_id: string;
  revision: number;
  created_at: string;
  step: StepDesc;
}

export interface StepResult {
  revision: number;
  step: StepDesc | null;
}

export interface SessionInfo {
  session_id: string;
  taxonomy_version: string;
  revision: number;
  finalized: boolean;
  card_id: string | null;
  step: StepDesc | null;
  preview: PreviewField[];
}

export interface Finding {
  severity: "error" | "warning";
  code: string;
  message: string;
  path: string;
}

export interface DimensionReport {
  dimension: string;
  satisfied: boolean;
  findings: Finding[];
}

export interface ValidationReport {
  responsible: boolean;
  dimensions: DimensionReport[];
}

export interface FinalizeResult {
  card_id: string;
  responsible: boolean;
  report: ValidationReport;
  links: Record<string, string>;
}

export interface DispatchReceipt {
  dispatcher: string;
  recipient: string;
  card_id: string;
  dispatched_at: string;
  message_file?: string;
}

export interface MissingField {
  path: string;
  message: string;
}

export interface ErrorBody {
  code: string;
  message: string;
  path?: string;
  revision?: number;
  revisit_step?: string;
  missing?: MissingField[];
  card_id?: string;
}

// Draft payload shapes, matching the answer-script format.

export interface ModelDraft {
  name: string;
  dates_used: string[];
  version: string | null;
}

export interface DetailDraft {
  used: boolean;
  classifications?: string[];
  model_refs?: number[];
  detail?: string;
}

export interface CorrespondenceDraft {
  name: string;
  contact: string;
  affiliation: string;
}

export interface ProjectDraft {
  correspondences: CorrespondenceDraft[];
  project_name: string;
  key_applications: string[];
}

export type Payload =
  | ModelDraft[]
  | string[]
  | string[][]
  | DetailDraft
  | Record<string, string>
  | boolean
  | ProjectDraft;
