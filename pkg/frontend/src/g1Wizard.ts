// Criteria-ordering wizard: reorder the six indicators (drag or buttons),
// pick each adjacent importance ratio from the 1.0-1.8 scale, and preview
// the resulting weights. The preview always comes from the server's G1
// endpoint; this module never computes a weight itself.

import { WorkbenchClient } from "./api.js";
import { clear, el } from "./dom.js";

export const RATIO_SCALE = [1.0, 1.2, 1.4, 1.6, 1.8];

export class G1Wizard {
  order: string[];
  ratios: number[];
  lastPreview: Record<string, number> | null = null;

  constructor(
    private client: WorkbenchClient,
    criteria: string[],
    public root: HTMLElement = el("section", { class: "g1-wizard" }),
  ) {
    this.order = [...criteria];
    this.ratios = new Array(Math.max(0, criteria.length - 1)).fill(1.0);
  }

  async load(): Promise<void> {
    this.render();
    await this.preview();
  }

  render(): void {
    clear(this.root);
    this.root.append(el("h2", { text: "Criteria importance (most to least)" }));
    const list = el("ol", { class: "criteria-list" });
    this.order.forEach((criterion, index) => {
      const up = el("button", { class: "move-up", "data-index": index, text: "↑" });
      const down = el("button", { class: "move-down", "data-index": index, text: "↓" });
      up.addEventListener("click", () => void this.move(index, -1));
      down.addEventListener("click", () => void this.move(index, +1));
      const row = el(
        "li",
        { class: "criterion-row", draggable: true, "data-criterion": criterion },
        el("span", { class: "criterion-name", text: criterion }),
        up,
        down,
      );
      row.addEventListener("dragstart", (event) => {
        (event as DragEvent).dataTransfer?.setData("text/plain", String(index));
      });
      row.addEventListener("dragover", (event) => event.preventDefault());
      row.addEventListener("drop", (event) => {
        event.preventDefault();
        const from = Number((event as DragEvent).dataTransfer?.getData("text/plain"));
        if (!Number.isNaN(from)) void this.reorder(from, index);
      });
      list.append(row);
      if (index < this.order.length - 1) {
        list.append(this.ratioRow(index));
      }
    });
    this.root.append(list);
    this.root.append(el("div", { class: "weights-preview" }));
    const submit = el("button", { class: "submit-judgment", text: "Save judgment" });
    submit.addEventListener("click", () => void this.submit());
    this.root.append(submit);
  }

  private ratioRow(index: number): HTMLElement {
    const select = el("select", { class: "ratio-select", "data-ratio-index": index });
    for (const value of RATIO_SCALE) {
      const option = el("option", { value: value.toFixed(1), text: value.toFixed(1) });
      if (value === this.ratios[index]) option.selected = true;
      select.append(option);
    }
    select.addEventListener("change", () => {
      this.ratios[index] = Number(select.value);
      void this.preview();
    });
    return el(
      "li",
      { class: "ratio-row" },
      el("span", { class: "ratio-label", text: "how much more important than the next:" }),
      select,
    );
  }

  async move(index: number, delta: number): Promise<void> {
    await this.reorder(index, index + delta);
  }

  async reorder(from: number, to: number): Promise<void> {
    if (to < 0 || to >= this.order.length || from === to) return;
    const [item] = this.order.splice(from, 1);
    this.order.splice(to, 0, item);
    this.render();
    await this.preview();
  }

  async setJudgment(order: string[], ratios: number[]): Promise<void> {
    this.order = [...order];
    this.ratios = [...ratios];
    this.render();
    await this.preview();
  }

  async preview(): Promise<void> {
    const { weights } = await this.client.g1Preview(this.order, this.ratios);
    this.lastPreview = weights;
    const panel = this.root.querySelector<HTMLElement>(".weights-preview");
    if (!panel) return;
    clear(panel);
    panel.append(el("h3", { text: "Weight preview" }));
    for (const criterion of this.order) {
      const value = weights[criterion];
      const bar = el("div", { class: "weight-bar" });
      bar.style.width = `${Math.round(value * 240)}px`;
      panel.append(
        el(
          "div",
          { class: "weight-row", "data-criterion": criterion, "data-weight": String(value) },
          el("span", { class: "weight-name", text: criterion }),
          bar,
          el("span", { class: "weight-value", text: value.toFixed(4) }),
        ),
      );
    }
  }

  renderedWeights(): Record<string, number> {
    const out: Record<string, number> = {};
    for (const row of this.root.querySelectorAll<HTMLElement>(".weight-row")) {
      out[row.dataset.criterion!] = Number(row.dataset.weight);
    }
    return out;
  }

  async submit(): Promise<void> {
    if (this.client.head === null) {
      await this.client.refreshHead();
    }
    await this.client.postJudgment(this.order, this.ratios);
  }
}
