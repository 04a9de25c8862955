import { fmtValue } from "./format";
import type {
  ModelSummary,
  SensitivityBody,
  SessionResponse,
  VdmnDocument,
} from "./types";

export interface DriverInput {
  id: string;
  /** Value before any override, null when the driver has no stored value. */
  base: number | null;
  /** Current text in the edit box. */
  text: string;
  /** Edited locally, not yet confirmed by the server. */
  dirty: boolean;
  error: string | null;
}

export interface State {
  phase: "boot" | "ready" | "fatal";
  fatal: string | null;
  models: ModelSummary[];
  modelName: string | null;
  doc: VdmnDocument | null;
  overridable: string[];
  svg: string | null;
  svgError: string | null;
  session: SessionResponse | null;
  sensitivity: SensitivityBody | null;
  inputs: Record<string, DriverInput>;
  compare: boolean;
  selectedGateway: string | null;
}

function initial(): State {
  return {
    phase: "boot",
    fatal: null,
    models: [],
    modelName: null,
    doc: null,
    overridable: [],
    svg: null,
    svgError: null,
    session: null,
    sensitivity: null,
    inputs: {},
    compare: false,
    selectedGateway: null,
  };
}

/** Single source of UI truth. Every displayed number comes out of an API
 *  response stored here. Responses carry monotonic sequence numbers so a
 *  slow reply can never overwrite the effect of a newer one. */
export class Store {
  private state = initial();
  private listeners: Array<(s: State) => void> = [];
  private seq = 0;
  private appliedSession = 0;
  private appliedSensitivity = 0;

  get(): State {
    return this.state;
  }

  subscribe(fn: (s: State) => void): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((f) => f !== fn);
    };
  }

  /** Allocate a sequence number before issuing a request. */
  nextSeq(): number {
    return ++this.seq;
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  private patch(changes: Partial<State>): void {
    this.state = { ...this.state, ...changes };
    this.emit();
  }

  fatal(message: string): void {
    this.patch({ phase: "fatal", fatal: message });
  }

  modelsLoaded(models: ModelSummary[]): void {
    this.patch({ models });
  }

  /** New model selected: drop everything session-specific. */
  modelLoaded(
    name: string,
    doc: VdmnDocument,
    overridable: string[],
    svg: string | null,
    svgError: string | null,
  ): void {
    this.appliedSession = 0;
    this.appliedSensitivity = 0;
    this.patch({
      phase: "ready",
      modelName: name,
      doc,
      overridable,
      svg,
      svgError,
      session: null,
      sensitivity: null,
      inputs: {},
      selectedGateway: null,
    });
  }

  /** Apply a session response unless something newer already landed. */
  sessionApplied(session: SessionResponse, seq: number): boolean {
    if (seq <= this.appliedSession) return false;
    this.appliedSession = seq;

    const inputs: Record<string, DriverInput> = {};
    const firstResponse = Object.keys(this.state.inputs).length === 0;
    for (const id of session.overridable) {
      const existing = this.state.inputs[id];
      const base = firstResponse
        ? (session.valuation.values[id] ?? null)
        : (existing?.base ?? null);
      const settled = session.overrides[id] ?? base;
      inputs[id] =
        existing && existing.dirty
          ? { ...existing, base }
          : { id, base, text: fmtValue(settled), dirty: false, error: null };
    }
    this.patch({ session, inputs });
    return true;
  }

  sensitivityApplied(sensitivity: SensitivityBody, seq: number): boolean {
    if (seq <= this.appliedSensitivity) return false;
    this.appliedSensitivity = seq;
    this.patch({ sensitivity });
    return true;
  }

  inputEdited(id: string, text: string): void {
    const input = this.state.inputs[id];
    if (!input) return;
    this.patch({
      inputs: {
        ...this.state.inputs,
        [id]: { ...input, text, dirty: true, error: null },
      },
    });
  }

  /** Mark inputs as sent so a later session response may overwrite them. */
  inputsFlushed(ids: string[]): void {
    const inputs = { ...this.state.inputs };
    for (const id of ids) {
      const input = inputs[id];
      if (input) inputs[id] = { ...input, dirty: false };
    }
    this.patch({ inputs });
  }

  /** Server rejected an edit: surface the message, revert the text. */
  inputError(id: string, message: string): void {
    const input = this.state.inputs[id];
    if (!input) return;
    const session = this.state.session;
    const settled = session?.overrides[id] ?? input.base;
    this.patch({
      inputs: {
        ...this.state.inputs,
        [id]: {
          ...input,
          text: fmtValue(settled),
          dirty: false,
          error: message,
        },
      },
    });
  }

  toggleCompare(): void {
    this.patch({ compare: !this.state.compare });
  }

  selectGateway(id: string | null): void {
    this.patch({ selectedGateway: id });
  }
}
