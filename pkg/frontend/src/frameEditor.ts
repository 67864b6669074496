// Slot-structured frame editor. Every edit is validated by the server
// before it can be saved; violations render inline at their slot paths and
// the save button stays disabled until the frame validates clean.

import { ApiError, WorkbenchClient } from "./api.js";
import { clear, el } from "./dom.js";
import type { FrameDoc, FunctionDoc, Violation } from "./types.js";

export class FrameEditor {
  frame: FrameDoc | null = null;
  lastViolations: Violation[] = [];
  private clean = false;

  constructor(
    private client: WorkbenchClient,
    public root: HTMLElement = el("section", { class: "frame-editor" }),
  ) {}

  async load(frameId: string): Promise<void> {
    this.frame = await this.client.getFrame(frameId);
    if (this.client.head === null) {
      await this.client.refreshHead();
    }
    this.clean = false;
    this.render();
  }

  render(): void {
    const frame = this.frame;
    clear(this.root);
    if (!frame) return;
    this.root.append(el("h2", { text: `Frame ${frame.id}` }));
    this.root.append(el("div", { class: "violations-summary" }));

    const behavior = el(
      "fieldset",
      { class: "slot-group", "data-path": "/behavior" },
      el("legend", { text: "Behavior" }),
      this.textInput("/behavior/summary", "summary", frame.behavior.summary),
    );
    this.root.append(behavior);

    const functions = el("fieldset", { class: "slot-group" }, el("legend", { text: "Functions" }));
    const functionList = el("div", { class: "function-rows" });
    frame.functions.forEach((fn, index) => functionList.append(this.functionRow(fn, index)));
    functions.append(functionList);
    const addFunction = el("button", { class: "add-function", text: "+ function" });
    addFunction.addEventListener("click", () => {
      this.frame!.functions.push({ kind: "action", verb: "", object: "" });
      this.markDirty();
      this.render();
    });
    functions.append(addFunction);
    this.root.append(functions);

    const characteristics = el("fieldset", { class: "slot-group" }, el("legend", { text: "Characteristics" }));
    const charList = el("div", { class: "characteristic-rows" });
    frame.characteristics.forEach((ch, index) => {
      const row = el(
        "div",
        { class: "characteristic-row", "data-path": `/characteristics/${index}` },
        this.textInput(`/characteristics/${index}/head`, "head", ch.head),
        this.textInput(
          `/characteristics/${index}/attributives`,
          "attributives (comma separated)",
          ch.attributives.join(", "),
        ),
      );
      const remove = el("button", { class: "remove-characteristic", text: "remove" });
      remove.addEventListener("click", () => {
        this.frame!.characteristics.splice(index, 1);
        this.markDirty();
        this.render();
      });
      row.append(remove);
      charList.append(row);
    });
    characteristics.append(charList);
    const addCharacteristic = el("button", { class: "add-characteristic", text: "+ characteristic" });
    addCharacteristic.addEventListener("click", () => {
      this.frame!.characteristics.push({ head: "", attributives: [] });
      this.markDirty();
      this.render();
    });
    characteristics.append(addCharacteristic);
    this.root.append(characteristics);

    const environment = el(
      "fieldset",
      { class: "slot-group", "data-path": "/environment" },
      el("legend", { text: "Environment (optional)" }),
      this.textInput("/environment/head", "head", frame.environment?.head ?? ""),
      this.textInput(
        "/environment/attributives",
        "attributives (comma separated)",
        frame.environment?.attributives.join(", ") ?? "",
      ),
    );
    this.root.append(environment);

    const validateButton = el("button", { class: "validate-frame", text: "Validate" });
    validateButton.addEventListener("click", () => void this.validate());
    const saveButton = el("button", { class: "save-frame", text: "Save" });
    saveButton.disabled = !this.clean;
    saveButton.addEventListener("click", () => void this.save());
    this.root.append(el("div", { class: "editor-actions" }, validateButton, saveButton));
  }

  private functionRow(fn: FunctionDoc, index: number): HTMLElement {
    const row = el("div", { class: "function-row", "data-path": `/functions/${index}` });
    const kind = el("select", { class: "function-kind", "data-path": `/functions/${index}/kind` });
    for (const value of ["action", "flow", "state"]) {
      const option = el("option", { value, text: value });
      if (fn.kind === value) option.selected = true;
      kind.append(option);
    }
    kind.addEventListener("change", () => {
      const fresh: FunctionDoc =
        kind.value === "action"
          ? { kind: "action", verb: "", object: "" }
          : kind.value === "flow"
            ? { kind: "flow", flow_kind: "material", input_object: "", output_object: "" }
            : { kind: "state", object: "", change_verb: "" };
      this.frame!.functions[index] = fresh;
      this.markDirty();
      this.render();
    });
    row.append(kind);
    if (fn.kind === "action") {
      row.append(
        this.textInput(`/functions/${index}/verb`, "verb (gerund)", fn.verb),
        this.textInput(`/functions/${index}/object`, "object", fn.object),
      );
    } else if (fn.kind === "flow") {
      row.append(
        this.textInput(`/functions/${index}/input_object`, "input", fn.input_object),
        this.textInput(`/functions/${index}/output_object`, "output", fn.output_object),
      );
    } else {
      row.append(
        this.textInput(`/functions/${index}/change_verb`, "change verb (gerund)", fn.change_verb),
        this.textInput(`/functions/${index}/object`, "object", fn.object),
      );
    }
    const remove = el("button", { class: "remove-function", text: "remove" });
    remove.addEventListener("click", () => {
      this.frame!.functions.splice(index, 1);
      this.markDirty();
      this.render();
    });
    row.append(remove);
    return row;
  }

  private textInput(path: string, label: string, value: string): HTMLElement {
    const input = el("input", { type: "text", "data-path": path, value });
    input.addEventListener("input", () => {
      this.applyInput(path, input.value);
      this.markDirty();
    });
    return el("label", { class: "slot-input" }, `${label}: `, input);
  }

  private applyInput(path: string, value: string): void {
    const frame = this.frame!;
    const parts = path.replace(/^\//, "").split("/");
    if (parts[0] === "behavior" && parts[1] === "summary") {
      frame.behavior.summary = value;
    } else if (parts[0] === "functions") {
      const fn = frame.functions[Number(parts[1])] as Record<string, unknown>;
      fn[parts[2]] = value;
    } else if (parts[0] === "characteristics") {
      const ch = frame.characteristics[Number(parts[1])];
      if (parts[2] === "head") ch.head = value;
      else ch.attributives = value.split(",").map((s) => s.trim()).filter(Boolean);
    } else if (parts[0] === "environment") {
      if (!frame.environment) frame.environment = { head: "", attributives: [] };
      if (parts[1] === "head") frame.environment.head = value;
      else frame.environment.attributives = value.split(",").map((s) => s.trim()).filter(Boolean);
      if (!frame.environment.head && frame.environment.attributives.length === 0) {
        frame.environment = null;
      }
    }
  }

  private markDirty(): void {
    this.clean = false;
    const save = this.root.querySelector<HTMLButtonElement>(".save-frame");
    if (save) save.disabled = true;
  }

  async validate(): Promise<Violation[]> {
    const { violations } = await this.client.validateFrame(this.frame!);
    this.lastViolations = violations;
    this.clean = violations.length === 0;
    this.renderViolations(violations);
    const save = this.root.querySelector<HTMLButtonElement>(".save-frame");
    if (save) save.disabled = !this.clean;
    return violations;
  }

  renderViolations(violations: Violation[]): void {
    for (const old of this.root.querySelectorAll(".violation")) old.remove();
    for (const marked of this.root.querySelectorAll(".invalid")) marked.classList.remove("invalid");
    const summary = this.root.querySelector<HTMLElement>(".violations-summary");
    if (summary) {
      clear(summary);
      if (violations.length === 0) {
        summary.append(el("p", { class: "all-clean", text: "Frame validates clean." }));
      }
    }
    for (const violation of violations) {
      const target = this.slotElement(violation.path);
      const note = el("span", {
        class: "violation",
        "data-code": violation.code,
        "data-path": violation.path,
        text: `${violation.code}: ${violation.message}`,
      });
      if (target) {
        target.classList.add("invalid");
        target.append(note);
      } else if (summary) {
        summary.append(note);
      }
    }
  }

  /** Innermost rendered element whose data-path prefixes the violation path. */
  private slotElement(path: string): HTMLElement | null {
    let best: HTMLElement | null = null;
    let bestLength = -1;
    for (const node of this.root.querySelectorAll<HTMLElement>("[data-path]")) {
      const nodePath = node.dataset.path!;
      if ((path === nodePath || path.startsWith(nodePath + "/") || nodePath.startsWith(path + "/")) &&
          nodePath.length > bestLength) {
        best = node.closest(".function-row, .characteristic-row, .slot-group") ?? node;
        bestLength = nodePath.length;
      }
    }
    return best;
  }

  async save(): Promise<{ saved: boolean; violations: Violation[] }> {
    if (!this.clean) {
      return { saved: false, violations: this.lastViolations };
    }
    try {
      await this.client.putFrame(this.frame!);
      return { saved: true, violations: [] };
    } catch (error) {
      if (error instanceof ApiError && error.details?.violations) {
        this.lastViolations = error.details.violations;
        this.renderViolations(this.lastViolations);
        return { saved: false, violations: this.lastViolations };
      }
      throw error;
    }
  }
}
