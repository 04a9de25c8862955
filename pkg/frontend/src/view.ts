import { fmtValue, naText, trendGlyph } from "./format";
import { highlightChoice, indicatorAt, mountSvg, overlayValues } from "./tree";
import type { TreeIndex } from "./tree";
import type { State } from "./state";
import type { DocIndicator } from "./types";

export interface Handlers {
  onModelChange(name: string): void;
  onInput(id: string, text: string): void;
  onReset(): void;
  onCompareToggle(): void;
  onTreeClick(id: string): void;
}

const SKELETON = `
  <header>
    <h1>vdmn what-if</h1>
    <select id="model-select" aria-label="model"></select>
    <span id="model-title"></span>
  </header>
  <div id="fatal" class="fatal" hidden></div>
  <main>
    <section class="tree-pane">
      <div id="root-display" class="root-display"></div>
      <div id="tree-note" class="tree-note" hidden></div>
      <div id="tree-host"></div>
    </section>
    <aside class="side-pane">
      <section>
        <h2>Drivers</h2>
        <form id="driver-form" autocomplete="off"></form>
        <button id="reset-btn" type="button">Reset</button>
        <label class="compare">
          <input type="checkbox" id="compare-toggle" /> compare to base
        </label>
      </section>
      <section>
        <h2>Sensitivity</h2>
        <div id="sensitivity-root"></div>
        <ol id="sensitivity-list"></ol>
      </section>
    </aside>
  </main>
  <section>
    <h2>Values</h2>
    <table id="values-table">
      <thead>
        <tr><th>indicator</th><th>value</th><th>trend</th><th>vs base</th></tr>
      </thead>
      <tbody></tbody>
    </table>
  </section>
`;

export class View {
  private readonly modelSelect: HTMLSelectElement;
  private readonly modelTitle: HTMLElement;
  private readonly fatalBox: HTMLElement;
  private readonly rootDisplay: HTMLElement;
  private readonly treeNote: HTMLElement;
  private readonly treeHost: HTMLElement;
  private readonly driverForm: HTMLFormElement;
  private readonly compareToggle: HTMLInputElement;
  private readonly sensitivityRoot: HTMLElement;
  private readonly sensitivityList: HTMLOListElement;
  private readonly valuesBody: HTMLTableSectionElement;

  private treeIndex: TreeIndex | null = null;
  private mountedSvg: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    handlers: Handlers,
  ) {
    container.innerHTML = SKELETON;
    const find = <T extends Element>(sel: string): T => {
      const el = container.querySelector<T>(sel);
      if (!el) throw new Error(`skeleton is missing ${sel}`);
      return el;
    };
    this.modelSelect = find("#model-select");
    this.modelTitle = find("#model-title");
    this.fatalBox = find("#fatal");
    this.rootDisplay = find("#root-display");
    this.treeNote = find("#tree-note");
    this.treeHost = find("#tree-host");
    this.driverForm = find("#driver-form");
    this.compareToggle = find("#compare-toggle");
    this.sensitivityRoot = find("#sensitivity-root");
    this.sensitivityList = find("#sensitivity-list");
    this.valuesBody = find("#values-table tbody");

    this.modelSelect.addEventListener("change", () =>
      handlers.onModelChange(this.modelSelect.value),
    );
    this.driverForm.addEventListener("input", (event) => {
      const input = event.target as HTMLInputElement;
      const id = input.dataset.driver;
      if (id) handlers.onInput(id, input.value);
    });
    find<HTMLButtonElement>("#reset-btn").addEventListener("click", () =>
      handlers.onReset(),
    );
    this.compareToggle.addEventListener("change", () =>
      handlers.onCompareToggle(),
    );
    this.treeHost.addEventListener("click", (event) => {
      const id = indicatorAt(event.target);
      if (id) handlers.onTreeClick(id);
    });
  }

  render(state: State): void {
    this.fatalBox.hidden = state.phase !== "fatal";
    this.fatalBox.textContent = state.fatal ?? "";
    this.renderModels(state);
    this.renderRoot(state);
    this.renderTree(state);
    this.renderInputs(state);
    this.renderValues(state);
    this.renderSensitivity(state);
    this.compareToggle.checked = state.compare;
  }

  private indicator(state: State, id: string): DocIndicator | undefined {
    return state.doc?.indicators.find((i) => i.id === id);
  }

  private renderModels(state: State): void {
    const options = state.models
      .map((m) => `<option value="${m.name}">${m.title}</option>`)
      .join("");
    if (this.modelSelect.innerHTML !== options) {
      this.modelSelect.innerHTML = options;
    }
    if (state.modelName) this.modelSelect.value = state.modelName;
    const summary = state.models.find((m) => m.name === state.modelName);
    this.modelTitle.textContent = summary
      ? `${summary.title} (${summary.indicators} indicators)`
      : "";
  }

  private renderRoot(state: State): void {
    const session = state.session;
    if (!session) {
      this.rootDisplay.innerHTML = "";
      return;
    }
    const rootId = session.valuation.root;
    const indicator = this.indicator(state, rootId);
    const value = session.valuation.values[rootId];
    const na = naText(session, rootId);
    const unit = indicator?.unit ?? "";
    const trend = na ? "" : trendGlyph(indicator ?? { id: rootId, type: "" }, value);
    this.rootDisplay.innerHTML = `
      <span class="root-id">${indicator?.title ?? rootId}</span>
      <span class="value" data-testid="root-value">${na ?? fmtValue(value)}</span>
      <span class="unit">${na ? "" : unit}</span>
      <span class="trend">${trend}</span>
    `;
  }

  private renderTree(state: State): void {
    if (!state.svg) {
      this.treeIndex = null;
      this.mountedSvg = null;
      this.treeHost.innerHTML = "";
      this.treeNote.hidden = false;
      this.treeNote.textContent = state.svgError
        ? `diagram unavailable (${state.svgError}); see the value table below`
        : "";
      return;
    }
    if (this.mountedSvg !== state.svg) {
      try {
        this.treeIndex = mountSvg(this.treeHost, state.svg);
        this.mountedSvg = state.svg;
        this.treeNote.hidden = true;
      } catch (err) {
        this.treeIndex = null;
        this.mountedSvg = null;
        this.treeHost.innerHTML = "";
        this.treeNote.hidden = false;
        this.treeNote.textContent = `diagram unavailable (${String(err)}); see the value table below`;
        return;
      }
    }
    if (!this.treeIndex || !state.session) return;
    const texts = new Map<string, string>();
    for (const id of this.treeIndex.keys()) {
      const na = naText(state.session, id);
      if (na) {
        texts.set(id, na);
        continue;
      }
      const value = state.session.valuation.values[id];
      if (value == null) continue;
      const indicator = this.indicator(state, id);
      const unit = indicator?.unit ? ` ${indicator.unit}` : "";
      texts.set(id, `${fmtValue(value)}${unit}`);
    }
    overlayValues(this.treeIndex, texts);
    highlightChoice(
      this.treeIndex,
      state.selectedGateway,
      state.selectedGateway
        ? state.session.valuation.gateway_choices[state.selectedGateway]
        : undefined,
    );
  }

  private renderInputs(state: State): void {
    const ids = Object.keys(state.inputs);
    const have = new Set(
      Array.from(
        this.driverForm.querySelectorAll<HTMLInputElement>("input[data-driver]"),
      ).map((el) => el.dataset.driver ?? ""),
    );
    const rebuild =
      ids.length !== have.size || ids.some((id) => !have.has(id));
    if (rebuild) {
      this.driverForm.innerHTML = ids
        .map(
          (id) => `
            <div class="driver-row" data-row="${id}">
              <label for="drv-${id}">${id}</label>
              <input id="drv-${id}" data-driver="${id}" inputmode="decimal" />
              <span class="input-error" data-error-for="${id}"></span>
            </div>`,
        )
        .join("");
    }
    for (const id of ids) {
      const input = this.driverForm.querySelector<HTMLInputElement>(
        `input[data-driver="${id}"]`,
      );
      const error = this.driverForm.querySelector<HTMLElement>(
        `[data-error-for="${id}"]`,
      );
      const model = state.inputs[id];
      if (!input || !error || !model) continue;
      const doc = this.container.ownerDocument;
      if (doc.activeElement !== input && input.value !== model.text) {
        input.value = model.text;
      }
      if (model.base == null) input.placeholder = "n/a";
      error.textContent = model.error ?? "";
    }
  }

  private renderValues(state: State): void {
    const session = state.session;
    if (!session || !state.doc) {
      this.valuesBody.innerHTML = "";
      return;
    }
    const reportById = new Map(
      session.report.entries.map((e) => [e.id, e] as const),
    );
    const rows: string[] = [];
    for (const indicator of state.doc.indicators) {
      const id = indicator.id;
      const na = naText(session, id);
      const value = session.valuation.values[id];
      const valueText = na
        ? `<span class="na-badge">${na}</span>`
        : `${fmtValue(value)}${indicator.unit ? ` ${indicator.unit}` : ""}`;
      const trend = na ? "" : trendGlyph(indicator, value);
      let versus = "";
      if (state.compare) {
        const entry = reportById.get(id);
        if (entry && entry.delta !== null) {
          const sign = entry.delta >= 0 ? "+" : "";
          const pct =
            entry.percent === null
              ? ""
              : `, ${entry.percent >= 0 ? "+" : ""}${entry.percent.toFixed(2)}%`;
          versus = `${fmtValue(entry.base)} → ${fmtValue(entry.new)} (${sign}${fmtValue(entry.delta)}${pct})`;
        }
      }
      rows.push(`
        <tr data-id="${id}">
          <td>${indicator.title ?? id}</td>
          <td class="value">${valueText}</td>
          <td class="trend">${trend}</td>
          <td class="versus">${versus}</td>
        </tr>`);
    }
    this.valuesBody.innerHTML = rows.join("");
  }

  private renderSensitivity(state: State): void {
    const sens = state.sensitivity;
    if (!sens) {
      this.sensitivityRoot.textContent = "";
      this.sensitivityList.innerHTML = "";
      return;
    }
    this.sensitivityRoot.textContent = `root ${sens.root} = ${fmtValue(sens.root_value)} (epsilon ${sens.epsilon})`;
    this.sensitivityList.innerHTML = sens.entries
      .map((entry) => {
        const elasticity =
          entry.elasticity === null
            ? `d/unit ${fmtValue(entry.delta_per_unit)}`
            : `elasticity ${fmtValue(entry.elasticity)}`;
        const ext = entry.controllable ? "" : ' <span class="ext">[external]</span>';
        return `<li data-driver="${entry.id}">${entry.id} · ${elasticity}${ext}</li>`;
      })
      .join("");
  }
}
