// Workbench shell: project picker, a progress rail mirroring the staged
// workflow, and one screen per human-in-the-loop step. Screens map 1:1 to
// stages and the rail enforces the linear pipeline.

import { WorkbenchClient } from "./api.js";
import { clear, el } from "./dom.js";
import { FrameEditor } from "./frameEditor.js";
import { G1Wizard } from "./g1Wizard.js";
import { RankingView } from "./ranking.js";
import { ReviewScreen } from "./review.js";
import type { ProjectSummary, StageName } from "./types.js";

const STAGES: StageName[] = [
  "Ingested",
  "Classified",
  "Reviewed",
  "Framed",
  "Inverted",
  "Screened",
  "Ranked",
  "Clustered",
];

const DEFAULT_CRITERIA = [
  "functional_compliance",
  "behavioral_alignment",
  "characteristic_consistency",
  "environmental_migration",
  "reliability",
  "economic_tolerance",
];

export class App {
  client = new WorkbenchClient();
  summary: ProjectSummary | null = null;

  constructor(public root: HTMLElement) {}

  async start(): Promise<void> {
    const projects = await this.client.listProjects();
    clear(this.root);
    if (projects.length === 0) {
      this.root.append(
        el("p", { class: "empty", text: "No projects yet; create one with the CLI and reload." }),
      );
      return;
    }
    const picker = el("select", { class: "project-picker" });
    for (const project of projects) {
      picker.append(el("option", { value: project.id, text: `${project.id} - ${project.name}` }));
    }
    picker.addEventListener("change", () => void this.openProject(picker.value));
    this.root.append(el("header", { class: "top-bar" }, el("h1", { text: "bioinvert workbench" }), picker));
    this.root.append(el("nav", { class: "progress-rail" }));
    this.root.append(el("main", { class: "screen" }));
    await this.openProject(projects[0].id);
  }

  async openProject(projectId: string): Promise<void> {
    this.client = new WorkbenchClient("", projectId);
    this.summary = await this.client.getProject();
    this.renderRail();
    await this.showStage(this.currentStage());
  }

  currentStage(): StageName {
    const stages = this.summary!.stages;
    for (let i = STAGES.length - 1; i >= 0; i -= 1) {
      if (stages[STAGES[i]].complete && !stages[STAGES[i]].stale) return STAGES[i];
    }
    return STAGES[0];
  }

  renderRail(): void {
    const rail = this.root.querySelector<HTMLElement>(".progress-rail");
    if (!rail || !this.summary) return;
    clear(rail);
    for (const stage of STAGES) {
      const record = this.summary.stages[stage];
      const state = record.stale ? "stale" : record.complete ? "done" : "todo";
      const button = el("button", { class: `stage stage-${state}`, "data-stage": stage, text: stage });
      button.addEventListener("click", () => void this.showStage(stage));
      rail.append(button);
    }
  }

  async showStage(stage: StageName): Promise<void> {
    const main = this.root.querySelector<HTMLElement>(".screen");
    if (!main) return;
    clear(main);
    if (stage === "Reviewed") {
      const batches = await this.client.listBatches();
      const open = batches.find((b) => b.status !== "Clean") ?? batches[0];
      if (!open) {
        main.append(el("p", { class: "empty", text: "No review batches yet." }));
        return;
      }
      const screen = new ReviewScreen(this.client, open.batch_no);
      main.append(screen.root);
      await screen.load();
    } else if (stage === "Framed") {
      const frames = this.summary?.frames ?? [];
      if (frames.length === 0) {
        main.append(el("p", { class: "empty", text: "No frames built yet." }));
        return;
      }
      const editor = new FrameEditor(this.client);
      main.append(editor.root);
      await editor.load(frames[0]);
    } else if (stage === "Ranked") {
      const wizard = new G1Wizard(this.client, this.summary?.judgment?.order ?? DEFAULT_CRITERIA);
      main.append(wizard.root);
      await wizard.load();
      const view = new RankingView(this.client);
      main.append(view.root);
      await view.load();
    } else if (stage === "Clustered") {
      const view = new RankingView(this.client);
      main.append(view.root);
      await view.load();
    } else {
      main.append(
        el("p", {
          class: "empty",
          text: `${stage} runs from the CLI or API; this workbench covers the designer steps.`,
        }),
      );
    }
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const app = new App(document.getElementById("app")!);
  void app.start();
}
