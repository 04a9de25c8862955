/** Payload types mirroring the vdmn HTTP API. */

export interface ModelSummary {
  name: string;
  title: string;
  root: string;
  indicators: number;
  errors: number;
  warnings: number;
}

export interface ModelListResponse {
  models: ModelSummary[];
}

export interface Diagnostic {
  code: string;
  severity: string;
  subjects: string[];
  message: string;
}

export interface ModelDetailResponse {
  name: string;
  model: VdmnDocument;
  diagnostics: Diagnostic[];
  overridable: string[];
}

/** Interchange document, the subset the UI reads. */
export interface VdmnDocument {
  vdmn_version: string;
  name: string;
  indicators: DocIndicator[];
  links: DocLink[];
  operators: DocOperator[];
}

export interface DocIndicator {
  id: string;
  type: string;
  role?: string;
  title?: string;
  unit?: string;
  values?: Record<string, number>;
  comparative?: { result_type: string; value: number };
  development?: string;
  responsibility?: string;
}

export interface DocLink {
  source: string;
  target: string;
  kind: string;
  order?: number;
}

export interface DocOperator {
  parent: string;
  op: string;
  selector?: string;
  function?: string;
}

export interface NotComputedBody {
  reason: string;
  detail?: string | null;
}

export interface ValuationBody {
  result_type: string;
  root: string;
  values: Record<string, number | null>;
  not_computed: Record<string, NotComputedBody>;
  gateway_choices: Record<string, string>;
}

export interface WhatIfEntry {
  id: string;
  base: number | null;
  new: number | null;
  delta: number | null;
  percent: number | null;
}

export interface WhatIfBody {
  result_type: string;
  root: string;
  overrides: Record<string, number>;
  entries: WhatIfEntry[];
}

export interface SessionResponse {
  session: string;
  model: string;
  result_type: string;
  overrides: Record<string, number>;
  overridable: string[];
  valuation: ValuationBody;
  report: WhatIfBody;
}

export interface SensitivityEntry {
  id: string;
  base_value: number;
  delta_per_unit: number;
  elasticity: number | null;
  controllable: boolean;
}

export interface SensitivityBody {
  result_type: string;
  root: string;
  root_value: number;
  epsilon: number;
  entries: SensitivityEntry[];
}
