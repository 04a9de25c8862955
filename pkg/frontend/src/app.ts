import { ApiError } from "./api";
import type { Api } from "./api";
import { Store } from "./state";
import { View } from "./view";

export interface AppOptions {
  /** Edit debounce in ms; requests never fire faster than this. */
  debounceMs?: number;
  /** Model to open first when the server offers it. */
  preferredModel?: string;
}

const DEFAULT_DEBOUNCE_MS = 150;

export class App {
  readonly store = new Store();
  private readonly view: View;
  private readonly debounceMs: number;
  private readonly preferredModel: string;
  private pendingEdits = new Map<string, string>();
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = 0;
  /** Resolves when no edit is waiting or in flight; tests await this. */
  private settled: Promise<void> = Promise.resolve();
  private settle: () => void = () => {};
  private isSettled = true;

  constructor(container: HTMLElement, private readonly api: Api, opts: AppOptions = {}) {
    this.debounceMs = opts.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.preferredModel = opts.preferredModel ?? "gross_profit";
    this.view = new View(container, {
      onModelChange: (name) => void this.selectModel(name),
      onInput: (id, text) => this.onInput(id, text),
      onReset: () => void this.reset(),
      onCompareToggle: () => this.store.toggleCompare(),
      onTreeClick: (id) => this.onTreeClick(id),
    });
    this.store.subscribe((state) => this.view.render(state));
  }

  async init(): Promise<void> {
    try {
      const { models } = await this.api.listModels();
      if (models.length === 0) {
        this.store.fatal("the server offers no models");
        return;
      }
      this.store.modelsLoaded(models);
      const name = models.some((m) => m.name === this.preferredModel)
        ? this.preferredModel
        : models[0]!.name;
      await this.selectModel(name);
    } catch (err) {
      this.store.fatal(describe(err));
    }
  }

  async selectModel(name: string): Promise<void> {
    this.cancelPending();
    try {
      const [detail, svg] = await Promise.all([
        this.api.getModel(name),
        this.api.getSvg(name).then(
          (text) => ({ text, error: null as string | null }),
          (err) => ({ text: null, error: describe(err) }),
        ),
      ]);
      this.store.modelLoaded(
        name,
        detail.model,
        detail.overridable,
        svg.text,
        svg.error,
      );
      const session = await this.api.createSession(name);
      this.store.sessionApplied(session, this.store.nextSeq());
      await this.refreshSensitivity();
    } catch (err) {
      this.store.fatal(describe(err));
    }
  }

  onInput(id: string, text: string): void {
    if (!this.store.get().inputs[id]) return;
    this.store.inputEdited(id, text);
    this.pendingEdits.set(id, text);
    this.beginWork();
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.flush();
    }, this.debounceMs);
  }

  private beginWork(): void {
    if (!this.isSettled) return;
    this.isSettled = false;
    this.settled = new Promise((resolve) => {
      this.settle = () => {
        this.isSettled = true;
        resolve();
      };
    });
  }

  private maybeSettle(): void {
    if (
      !this.isSettled &&
      this.pendingEdits.size === 0 &&
      this.timer === null &&
      this.inFlight === 0
    ) {
      this.settle();
    }
  }

  onTreeClick(id: string): void {
    const state = this.store.get();
    const current = state.selectedGateway;
    const isGateway = state.doc?.operators.some(
      (op) => op.parent === id && op.op === "gateway",
    );
    if (!isGateway) {
      if (current !== null) this.store.selectGateway(null);
      return;
    }
    this.store.selectGateway(current === id ? null : id);
  }

  /** Send pending edits as one PATCH; on rejection revert those inputs. */
  private async flush(): Promise<void> {
    const session = this.store.get().session;
    const edits = new Map(this.pendingEdits);
    this.pendingEdits.clear();
    this.inFlight += 1;
    try {
      if (!session || edits.size === 0) return;
      const patch: Record<string, number | null> = {};
      for (const [id, text] of edits) {
        const trimmed = text.trim();
        if (trimmed === "") {
          patch[id] = null;
          continue;
        }
        const value = Number(trimmed);
        if (!Number.isFinite(value)) {
          this.store.inputError(id, "not a number");
          continue;
        }
        patch[id] = value;
      }
      const ids = Object.keys(patch);
      if (ids.length === 0) return;
      this.store.inputsFlushed(ids);
      const seq = this.store.nextSeq();
      try {
        const updated = await this.api.patchOverrides(session.session, patch);
        if (this.store.sessionApplied(updated, seq)) {
          await this.refreshSensitivity();
        }
      } catch (err) {
        // the server applies override patches atomically, so every id
        // in this request reverts together
        for (const id of ids) this.store.inputError(id, describe(err));
      }
    } finally {
      this.inFlight -= 1;
      this.maybeSettle();
    }
  }

  async reset(): Promise<void> {
    this.cancelPending();
    const session = this.store.get().session;
    if (!session) return;
    const seq = this.store.nextSeq();
    try {
      const updated = await this.api.resetOverrides(session.session);
      this.store.sessionApplied(updated, seq);
      await this.refreshSensitivity();
    } catch (err) {
      this.store.fatal(describe(err));
    }
  }

  private async refreshSensitivity(): Promise<void> {
    const session = this.store.get().session;
    if (!session) return;
    const seq = this.store.nextSeq();
    try {
      const report = await this.api.sessionSensitivity(session.session);
      this.store.sensitivityApplied(report, seq);
    } catch {
      // a root that became uncomputable mid-edit is not fatal; the last
      // good ranking stays up
    }
  }

  /** Wait for debounced edits and their requests to finish (test hook). */
  whenSettled(): Promise<void> {
    return this.settled;
  }

  private cancelPending(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pendingEdits.clear();
    this.maybeSettle();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

export function mountApp(
  container: HTMLElement,
  api: Api,
  opts: AppOptions = {},
): App {
  return new App(container, api, opts);
}
