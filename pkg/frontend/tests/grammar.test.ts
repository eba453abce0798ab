import { describe, expect, it } from "vitest";

import { GrammarError, formatLabel, parseLabel } from "../src/grammar.js";

describe("label grammar", () => {
  it("parses a single rank", () => {
    expect(parseLabel("4")).toEqual([4]);
  });

  it("parses a causal chain", () => {
    expect(parseLabel("2-25")).toEqual([2, 25]);
    expect(parseLabel("20-14")).toEqual([20, 14]);
  });

  it("trims whitespace", () => {
    expect(parseLabel("  17 ")).toEqual([17]);
  });

  it("rejects out-of-range ranks", () => {
    expect(() => parseLabel("26")).toThrow(GrammarError);
    expect(() => parseLabel("0")).toThrow(GrammarError);
    expect(() => parseLabel("4-99")).toThrow(GrammarError);
  });

  it("rejects non-numeric tokens", () => {
    expect(() => parseLabel("xss")).toThrow(GrammarError);
    expect(() => parseLabel("2-xss")).toThrow(GrammarError);
  });

  it("rejects empty input", () => {
    expect(() => parseLabel("")).toThrow(GrammarError);
    expect(() => parseLabel("  ")).toThrow(GrammarError);
  });

  it("rejects immediate repetition", () => {
    expect(() => parseLabel("7-7")).toThrow(GrammarError);
  });

  it("round-trips through format", () => {
    for (const s of ["4", "2-25", "13-19-25"]) {
      expect(formatLabel(parseLabel(s))).toBe(s);
    }
  });
});
