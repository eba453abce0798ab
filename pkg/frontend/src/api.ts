/** Typed client over the annotation HTTP API. */

export interface CatalogEntry {
  rank: number;
  cwe_id: string;
  name: string;
  description: string;
  extended_description: string;
  cvss_score: number;
}

export interface RoundPayload {
  annotator: string;
  action: string;
  labels: string | null;
}

export interface TaskView {
  cve_id: string;
  title: string;
  description: string;
  nvd_labels: string[];
  status: string;
  version: number;
  expected_annotator: string | null;
  round1: RoundPayload | null;
  round2: RoundPayload | null;
  adjudication: RoundPayload | null;
  model_ranking: [number, number][] | null;
}

export interface DatasetStats {
  total: number;
  single: number;
  causal: number;
  per_label_counts: Record<string, number>;
  pending: Record<string, number>;
  adjudication_queue: number;
  agreement_with_nvd: number | null;
}

export interface DecisionRequest {
  annotator: string;
  action: "agree" | "relabel" | "causal" | "unmappable";
  labels?: string | null;
  task_version: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function fail(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "string") {
      detail = body.detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, detail);
}

export class AnnotationApi {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async nextTask(annotator: string): Promise<TaskView | null> {
    const resp = await fetch(
      this.url(`/api/tasks/next?annotator=${encodeURIComponent(annotator)}`),
    );
    if (resp.status === 204) {
      return null;
    }
    if (!resp.ok) {
      return fail(resp);
    }
    return (await resp.json()) as TaskView;
  }

  async submitDecision(cveId: string, req: DecisionRequest): Promise<TaskView> {
    const resp = await fetch(this.url(`/api/tasks/${cveId}/decision`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!resp.ok) {
      return fail(resp);
    }
    return (await resp.json()) as TaskView;
  }

  /**
   * Raw body plus parsed stats. The dashboard renders from `parsed` and
   * tests compare `text` against an independent fetch, so every displayed
   * number traces back to exact response bytes.
   */
  async statsRaw(): Promise<{ text: string; parsed: DatasetStats }> {
    const resp = await fetch(this.url("/api/dataset/stats"));
    if (!resp.ok) {
      return fail(resp);
    }
    const text = await resp.text();
    return { text, parsed: JSON.parse(text) as DatasetStats };
  }

  async stats(): Promise<DatasetStats> {
    return (await this.statsRaw()).parsed;
  }

  async catalog(): Promise<CatalogEntry[]> {
    const resp = await fetch(this.url("/api/catalog"));
    if (!resp.ok) {
      return fail(resp);
    }
    return (await resp.json()) as CatalogEntry[];
  }

  async exportDataset(format: "csv" | "jsonl"): Promise<string> {
    const resp = await fetch(this.url(`/api/dataset/export?format=${format}`));
    if (!resp.ok) {
      return fail(resp);
    }
    return resp.text();
  }
}
