/** API client behavior against recorded fixtures (no live server). */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, describe, expect, it, vi } from "vitest";

import { AnnotationApi, ApiError, CatalogEntry, TaskView } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

function respond(status: number, body?: string): Response {
  return new Response(body, {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("AnnotationApi against recorded responses", () => {
  it("parses the recorded catalog", async () => {
    vi.stubGlobal("fetch", async () => respond(200, fixtureText("catalog.json")));
    const catalog = await new AnnotationApi().catalog();
    expect(catalog).toHaveLength(25);
    const first = catalog[0] as CatalogEntry;
    expect(first.rank).toBe(1);
    expect(first.cwe_id).toBe("CWE-787");
    expect(typeof first.cvss_score).toBe("number");
  });

  it("parses the recorded task payload", async () => {
    vi.stubGlobal("fetch", async () => respond(200, fixtureText("task.json")));
    const task = (await new AnnotationApi().nextTask("ann1")) as TaskView;
    expect(task.cve_id).toMatch(/^CVE-\d{4}-\d{4,}$/);
    expect(task.status).toBe("pending_r1");
    expect(Array.isArray(task.nvd_labels)).toBe(true);
    expect(task.model_ranking).toHaveLength(25);
    expect(typeof task.version).toBe("number");
  });

  it("maps 204 to null (empty queue)", async () => {
    vi.stubGlobal("fetch", async () => respond(204));
    expect(await new AnnotationApi().nextTask("ann1")).toBeNull();
  });

  it("surfaces 409 as ApiError with status", async () => {
    vi.stubGlobal("fetch", async () =>
      respond(409, JSON.stringify({ detail: "task CVE-2021-10001 is at version 1" })),
    );
    const api = new AnnotationApi();
    await expect(
      api.submitDecision("CVE-2021-10001", {
        annotator: "ann1",
        action: "agree",
        task_version: 0,
      }),
    ).rejects.toMatchObject({ status: 409 });
  });

  it("surfaces 403 as ApiError with the server detail", async () => {
    vi.stubGlobal("fetch", async () =>
      respond(403, JSON.stringify({ detail: "task awaits ann2, not ann1" })),
    );
    try {
      await new AnnotationApi().submitDecision("CVE-2021-10001", {
        annotator: "ann1",
        action: "agree",
        task_version: 0,
      });
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).message).toContain("awaits ann2");
    }
  });

  it("keeps the raw stats bytes alongside the parsed object", async () => {
    const text = fixtureText("stats.json");
    vi.stubGlobal("fetch", async () => respond(200, text));
    const { text: raw, parsed } = await new AnnotationApi().statsRaw();
    expect(raw).toBe(text);
    expect(parsed.total).toBe(JSON.parse(text).total);
  });
});
