// Review screen: one batch, Pass/Fail verdicts on the audited sentences.
// The batch status shown always comes back from the server after submit;
// an event-log conflict (someone else moved the project) renders a banner
// and forces a reload before any further edits.

import { ConflictError, WorkbenchClient } from "./api.js";
import { badge, clear, el } from "./dom.js";
import type { BatchView, VerdictValue } from "./types.js";

const STATUS_KIND: Record<string, string> = { Open: "open", Clean: "clean", Dirty: "dirty" };

export class ReviewScreen {
  batch: BatchView | null = null;

  constructor(
    private client: WorkbenchClient,
    private batchNo: number,
    public root: HTMLElement = el("section", { class: "review-screen" }),
  ) {}

  async load(): Promise<void> {
    this.batch = await this.client.getBatch(this.batchNo);
    if (this.client.head === null) {
      await this.client.refreshHead();
    }
    this.render();
  }

  render(): void {
    const batch = this.batch;
    clear(this.root);
    if (!batch) {
      this.root.append(el("p", { class: "empty", text: "No batch loaded." }));
      return;
    }
    this.root.append(
      el(
        "header",
        {},
        el("h2", { text: `Review batch ${batch.batch_no}` }),
        badge(batch.status, STATUS_KIND[batch.status] ?? "open"),
        el("span", {
          class: "meta",
          text: ` ${batch.items.length} items, ${batch.audit_sample.length} audited, round ${batch.rounds}`,
        }),
      ),
    );
    const bannerSlot = el("div", { class: "banner-slot" });
    this.root.append(bannerSlot);

    const byId = new Map(batch.items.map((item) => [item.id, item]));
    const list = el("ul", { class: "audit-list" });
    for (const auditId of batch.audit_sample) {
      const item = byId.get(auditId);
      const current = batch.verdicts[auditId];
      const row = el(
        "li",
        { class: "audit-item", "data-item": auditId },
        el("p", { class: "sentence", text: item ? item.text : auditId }),
        el("p", { class: "labels", text: item ? `labels: ${item.labels.join(", ") || "(none)"}` : "" }),
        this.verdictPicker(auditId, current),
      );
      list.append(row);
    }
    this.root.append(list);

    const submit = el("button", { class: "submit-verdicts", text: "Submit verdicts" });
    submit.addEventListener("click", () => void this.submit());
    this.root.append(submit);
  }

  private verdictPicker(auditId: string, current: VerdictValue | undefined): HTMLElement {
    const group = el("div", { class: "verdict-picker", role: "radiogroup" });
    for (const value of ["Pass", "Fail"] as VerdictValue[]) {
      const input = el("input", {
        type: "radio",
        name: `verdict-${this.batchNo}-${auditId}`,
        value,
        id: `verdict-${auditId}-${value}`,
      });
      if (current === value) input.checked = true;
      group.append(input, el("label", { for: `verdict-${auditId}-${value}`, text: value }));
    }
    return group;
  }

  collectVerdicts(): Record<string, VerdictValue> {
    const verdicts: Record<string, VerdictValue> = {};
    for (const row of this.root.querySelectorAll<HTMLElement>(".audit-item")) {
      const id = row.dataset.item!;
      const picked = row.querySelector<HTMLInputElement>("input[type=radio]:checked");
      if (picked) verdicts[id] = picked.value as VerdictValue;
    }
    return verdicts;
  }

  async submit(): Promise<void> {
    const verdicts = this.collectVerdicts();
    if (Object.keys(verdicts).length === 0) return;
    try {
      await this.client.postVerdicts(this.batchNo, verdicts);
    } catch (error) {
      if (error instanceof ConflictError) {
        this.showConflict();
        return;
      }
      throw error;
    }
    await this.load(); // status is whatever the server recomputed
  }

  showConflict(): void {
    const slot = this.root.querySelector<HTMLElement>(".banner-slot");
    if (!slot) return;
    clear(slot);
    const reload = el("button", { class: "reload", text: "Reload batch" });
    reload.addEventListener("click", () => {
      void this.client.refreshHead().then(() => this.load());
    });
    slot.append(
      el(
        "div",
        { class: "conflict-banner", role: "alert" },
        el("strong", { text: "This batch changed on the server. " }),
        "Your verdicts were not saved; reload to continue.",
        reload,
      ),
    );
  }

  statusText(): string {
    return this.root.querySelector(".badge")?.textContent ?? "";
  }
}
