/**
 * Review-screen controller: fetch next task, submit exactly one decision
 * per task, surface version conflicts as a reload prompt and wrong-actor
 * responses as a role error banner. DOM-free so the workflow is testable
 * against a live API from node.
 */

import { AnnotationApi, ApiError, CatalogEntry, DatasetStats, TaskView } from "./api.js";
import { GrammarError, parseLabel } from "./grammar.js";

export interface Notice {
  kind: "info" | "error";
  message: string;
}

export class ReviewApp {
  task: TaskView | null = null;
  catalog: CatalogEntry[] = [];
  notice: Notice | null = null;
  queueEmpty = false;

  constructor(
    private api: AnnotationApi,
    readonly annotator: string,
  ) {}

  async init(): Promise<void> {
    this.catalog = await this.api.catalog();
    await this.loadNext();
  }

  async loadNext(): Promise<void> {
    this.task = await this.api.nextTask(this.annotator);
    this.queueEmpty = this.task === null;
  }

  /** Submit the typed grammar text: one rank is a relabel, a chain is causal. */
  async submitText(text: string): Promise<boolean> {
    let chain: number[];
    try {
      chain = parseLabel(text);
    } catch (err) {
      if (err instanceof GrammarError) {
        this.notice = { kind: "error", message: `invalid label: ${err.message}` };
        return false; // no request leaves the browser on grammar errors
      }
      throw err;
    }
    const action = chain.length > 1 ? "causal" : "relabel";
    return this.decide(action, text.trim());
  }

  async agree(): Promise<boolean> {
    return this.decide("agree");
  }

  async unmappable(): Promise<boolean> {
    return this.decide("unmappable");
  }

  private async decide(
    action: "agree" | "relabel" | "causal" | "unmappable",
    labels?: string,
  ): Promise<boolean> {
    if (!this.task) {
      this.notice = { kind: "error", message: "no task loaded" };
      return false;
    }
    try {
      await this.api.submitDecision(this.task.cve_id, {
        annotator: this.annotator,
        action,
        labels: labels ?? null,
        task_version: this.task.version,
      });
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // someone moved the task; refetch and let the annotator retry
        await this.loadNext();
        this.notice = { kind: "info", message: "task changed elsewhere; reloaded" };
        return false;
      }
      if (err instanceof ApiError && err.status === 403) {
        this.notice = { kind: "error", message: `role error: ${err.message}` };
        return false;
      }
      if (err instanceof ApiError) {
        this.notice = { kind: "error", message: err.message };
        return false;
      }
      throw err;
    }
    this.notice = null;
    await this.loadNext();
    return true;
  }

  /** Dashboard data: raw response text plus the parsed stats it came from. */
  async dashboard(): Promise<{ text: string; parsed: DatasetStats }> {
    return this.api.statsRaw();
  }
}
