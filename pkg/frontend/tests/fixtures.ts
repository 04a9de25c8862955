import type { Api } from "../src/api";
import type {
  ModelDetailResponse,
  ModelListResponse,
  SensitivityBody,
  SessionResponse,
  VdmnDocument,
  WhatIfEntry,
} from "../src/types";

/** Canned gross-profit-shaped payloads. The numbers mirror server
 *  responses; the UI under test never derives them itself. */

export const gpDoc: VdmnDocument = {
  vdmn_version: "1.0",
  name: "Gross Profit",
  indicators: [
    {
      id: "GP",
      type: "key_business",
      title: "Gross Profit",
      unit: "EUR",
      comparative: { result_type: "budget", value: 380 },
      development: "derived",
    },
    { id: "REV", type: "financial", title: "Revenue", unit: "EUR" },
    {
      id: "COGS",
      type: "value_driver",
      title: "Cost of Goods Sold",
      unit: "EUR",
      values: { actual: 600 },
    },
    {
      id: "Price",
      type: "value_driver",
      title: "Price",
      unit: "EUR/piece",
      values: { actual: 10 },
    },
    {
      id: "Volume",
      type: "value_driver",
      role: "key_value",
      title: "Volume",
      unit: "piece",
      values: { actual: 100 },
    },
  ],
  links: [
    { source: "REV", target: "GP", kind: "direct", order: 0 },
    { source: "COGS", target: "GP", kind: "direct", order: 1 },
    { source: "Price", target: "REV", kind: "direct", order: 0 },
    { source: "Volume", target: "REV", kind: "direct", order: 1 },
  ],
  operators: [
    { parent: "GP", op: "subtract" },
    { parent: "REV", op: "multiply" },
  ],
};

export const gpSvg = `<svg xmlns="http://www.w3.org/2000/svg" width="400" height="300">
  <g id="GP" class="indicator"><rect x="150" y="10" width="100" height="40" fill="#000000" stroke="#000000"/><text x="200" y="30">Gross Profit</text></g>
  <g id="REV" class="indicator"><rect x="40" y="100" width="100" height="40" fill="#ffffff" stroke="#000000"/><text x="90" y="120">Revenue</text></g>
  <g id="COGS" class="indicator"><rect x="260" y="100" width="100" height="40" fill="#ffffff" stroke="#000000"/><text x="310" y="120">COGS</text></g>
  <g id="Price" class="indicator"><rect x="10" y="200" width="100" height="40" fill="#ffffff" stroke="#000000"/><text x="60" y="220">Price</text></g>
  <g id="Volume" class="indicator"><rect x="120" y="200" width="100" height="40" fill="#808080" stroke="#000000"/><text x="170" y="220">Volume</text></g>
</svg>`;

export const modelList: ModelListResponse = {
  models: [
    {
      name: "gross_profit",
      title: "Gross Profit",
      root: "GP",
      indicators: 5,
      errors: 0,
      warnings: 0,
    },
  ],
};

export const modelDetail: ModelDetailResponse = {
  name: "gross_profit",
  model: gpDoc,
  diagnostics: [],
  overridable: ["COGS", "Price", "Volume"],
};

export function mkSession(
  overrides: Record<string, number>,
  values: Record<string, number | null>,
  entries: WhatIfEntry[],
): SessionResponse {
  return {
    session: "s-1",
    model: "gross_profit",
    result_type: "actual",
    overrides,
    overridable: ["COGS", "Price", "Volume"],
    valuation: {
      result_type: "actual",
      root: "GP",
      values,
      not_computed: {},
      gateway_choices: {},
    },
    report: {
      result_type: "actual",
      root: "GP",
      overrides,
      entries,
    },
  };
}

export const baseValues = {
  GP: 400,
  REV: 1000,
  COGS: 600,
  Price: 10,
  Volume: 100,
};

export const baseSession = mkSession({}, baseValues, [
  { id: "GP", base: 400, new: 400, delta: 0, percent: 0 },
]);

export const volume110Session = mkSession(
  { Volume: 110 },
  { GP: 500, REV: 1100, COGS: 600, Price: 10, Volume: 110 },
  [
    { id: "GP", base: 400, new: 500, delta: 100, percent: 25 },
    { id: "REV", base: 1000, new: 1100, delta: 100, percent: 10 },
    { id: "Volume", base: 100, new: 110, delta: 10, percent: 10 },
  ],
);

export const baseSensitivity: SensitivityBody = {
  result_type: "actual",
  root: "GP",
  root_value: 400,
  epsilon: 0.001,
  entries: [
    {
      id: "Volume",
      base_value: 100,
      delta_per_unit: 10,
      elasticity: 2.5,
      controllable: true,
    },
    {
      id: "Price",
      base_value: 10,
      delta_per_unit: 100,
      elasticity: 2.5,
      controllable: true,
    },
    {
      id: "COGS",
      base_value: 600,
      delta_per_unit: -1,
      elasticity: -1.5,
      controllable: true,
    },
  ],
};

/** An Api whose methods individual tests replace as needed. */
export class FakeApi implements Api {
  calls: string[] = [];

  listModels = async (): Promise<ModelListResponse> => {
    this.calls.push("listModels");
    return structuredClone(modelList);
  };

  getModel = async (name: string): Promise<ModelDetailResponse> => {
    this.calls.push(`getModel ${name}`);
    return structuredClone(modelDetail);
  };

  getSvg = async (name: string): Promise<string> => {
    this.calls.push(`getSvg ${name}`);
    return gpSvg;
  };

  createSession = async (model: string): Promise<SessionResponse> => {
    this.calls.push(`createSession ${model}`);
    return structuredClone(baseSession);
  };

  patchOverrides = async (
    _session: string,
    patch: Record<string, number | null>,
  ): Promise<SessionResponse> => {
    this.calls.push(`patch ${JSON.stringify(patch)}`);
    if (patch["Volume"] === 110) return structuredClone(volume110Session);
    return structuredClone(baseSession);
  };

  resetOverrides = async (): Promise<SessionResponse> => {
    this.calls.push("reset");
    return structuredClone(baseSession);
  };

  sessionSensitivity = async (): Promise<SensitivityBody> => {
    this.calls.push("sensitivity");
    return structuredClone(baseSensitivity);
  };
}

export function appContainer(): HTMLElement {
  document.body.innerHTML = '<div id="app"></div>';
  const el = document.getElementById("app");
  if (!el) throw new Error("no app container");
  return el;
}

export async function until(
  check: () => boolean,
  timeoutMs = 5_000,
  stepMs = 20,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    if (check()) return;
    if (Date.now() > deadline) throw new Error("condition never became true");
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
}
