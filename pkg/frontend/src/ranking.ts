// Ranking and cluster view: the S/R/Q table (sortable by any index, server
// values only), the compromise set and acceptance-condition badges, and the
// cluster panel whose threshold slider re-queries the server. Each cluster
// carries a free-text designer assessment, persisted via the API.

import { ApiError, WorkbenchClient } from "./api.js";
import { badge, clear, el } from "./dom.js";
import type { ClusterReportDoc, DecisionReport } from "./types.js";

type SortKey = "Q" | "S" | "R";

export class RankingView {
  decision: DecisionReport | null = null;
  clusters: ClusterReportDoc | null = null;
  assessments: Record<string, string> = {};
  sortKey: SortKey = "Q";

  constructor(
    private client: WorkbenchClient,
    public root: HTMLElement = el("section", { class: "ranking-view" }),
  ) {}

  async load(): Promise<void> {
    try {
      this.decision = await this.client.getDecision();
    } catch (error) {
      if (error instanceof ApiError && (error.status === 404 || error.code === "NO_ALTERNATIVES")) {
        this.renderEmpty(error.code);
        return;
      }
      throw error;
    }
    try {
      this.clusters = await this.client.getClusters();
      this.assessments = await this.client.getClusterAssessments();
    } catch {
      this.clusters = null;
    }
    if (this.client.head === null) {
      await this.client.refreshHead();
    }
    this.render();
  }

  renderEmpty(code: string): void {
    clear(this.root);
    this.root.append(
      el(
        "div",
        { class: "empty-state" },
        el("h2", { text: "No ranking yet" }),
        el("p", {
          text:
            code === "NO_ALTERNATIVES"
              ? "Every strategy was screened out; keep at least one to rank."
              : "Run screening and the decision stage to produce a ranking.",
        }),
      ),
    );
  }

  rowOrder(): string[] {
    const vikor = this.decision!.vikor;
    if (this.sortKey === "Q") {
      return [...vikor.ranking];
    }
    const values = this.sortKey === "S" ? vikor.S : vikor.R;
    return [...vikor.alternatives].sort((a, b) => values[a] - values[b] || a.localeCompare(b));
  }

  render(): void {
    const decision = this.decision;
    if (!decision) return;
    const vikor = decision.vikor;
    clear(this.root);

    const header = el("header", {}, el("h2", { text: "Strategy ranking" }));
    const conditions = vikor.conditions;
    if (conditions.acceptable_advantage === null) {
      header.append(badge("conditions skipped (single alternative)", "skipped"));
    } else {
      header.append(
        badge(
          `advantage ${conditions.acceptable_advantage ? "holds" : "fails"} (DQ=${conditions.dq?.toFixed(4)})`,
          conditions.acceptable_advantage ? "ok" : "warn",
        ),
        badge(
          `stability ${conditions.acceptable_stability ? "holds" : "fails"}`,
          conditions.acceptable_stability ? "ok" : "warn",
        ),
      );
    }
    this.root.append(header);

    const table = el("table", { class: "srq-table" });
    const headRow = el("tr", {}, el("th", { text: "strategy" }));
    for (const key of ["S", "R", "Q"] as SortKey[]) {
      const button = el("button", { class: `sort-${key}`, text: key });
      button.addEventListener("click", () => {
        this.sortKey = key;
        this.render();
      });
      headRow.append(el("th", {}, button));
    }
    table.append(el("thead", {}, headRow));

    const body = el("tbody", {});
    for (const alt of this.rowOrder()) {
      const inCompromise = vikor.compromise_set.includes(alt);
      body.append(
        el(
          "tr",
          { class: inCompromise ? "compromise" : "", "data-alternative": alt },
          el("td", { text: inCompromise ? `${alt} ★` : alt }),
          el("td", { text: vikor.S[alt].toFixed(4) }),
          el("td", { text: vikor.R[alt].toFixed(4) }),
          el("td", { text: vikor.Q[alt].toFixed(4) }),
        ),
      );
    }
    table.append(body);
    this.root.append(table);

    this.root.append(this.clusterPanel());
  }

  private clusterPanel(): HTMLElement {
    const panel = el("div", { class: "cluster-panel" }, el("h3", { text: "Similarity clusters" }));
    const slider = el("input", {
      type: "range",
      min: "0.05",
      max: "1",
      step: "0.05",
      value: String(this.clusters?.threshold ?? 0.5),
      class: "threshold-slider",
    });
    slider.addEventListener("change", () => void this.recluster(Number(slider.value)));
    panel.append(
      el("label", { class: "threshold-label" }, "merge threshold ", slider,
        el("span", { class: "threshold-value", text: String(this.clusters?.threshold ?? 0.5) })),
    );

    if (!this.clusters) {
      panel.append(el("p", { class: "empty", text: "No cluster report yet; move the slider to run one." }));
      return panel;
    }
    const list = el("ul", { class: "cluster-list" });
    this.clusters.clusters.forEach((group, index) => {
      const key = group.join("+");
      const textarea = el("textarea", {
        class: "assessment",
        "data-cluster": key,
        placeholder: "composite-method likelihood assessment (designer notes)",
      });
      textarea.value = this.assessments[key] ?? "";
      const save = el("button", { class: "save-assessment", text: "Save note" });
      save.addEventListener("click", () => void this.saveAssessment(key, textarea.value));
      list.append(
        el(
          "li",
          { class: "cluster", "data-cluster": key },
          el("strong", { text: `cluster ${index + 1}: ` }),
          group.join(", "),
          group.length > 1 ? badge("composite candidate", "composite") : "",
          textarea,
          save,
        ),
      );
    });
    panel.append(list);
    if (this.clusters.conflicts.length > 0) {
      panel.append(
        el("p", { class: "conflicts", text: `environment conflicts: ${this.clusters.conflicts.join("; ")}` }),
      );
    }
    return panel;
  }

  async recluster(threshold: number): Promise<void> {
    const k = this.decision?.vikor.ranking.length ?? 0;
    if (k === 0) return;
    if (this.client.head === null) {
      await this.client.refreshHead();
    }
    await this.client.runClusters(k, threshold);
    this.clusters = await this.client.getClusters();
    this.assessments = await this.client.getClusterAssessments();
    this.render();
  }

  async saveAssessment(cluster: string, text: string): Promise<void> {
    if (this.client.head === null) {
      await this.client.refreshHead();
    }
    await this.client.postClusterAssessment(cluster, text);
    this.assessments = await this.client.getClusterAssessments();
  }

  renderedOrder(): string[] {
    return [...this.root.querySelectorAll<HTMLElement>("tbody tr")].map(
      (row) => row.dataset.alternative!,
    );
  }
}
