/**
 * The label grammar annotators type: a rank number 1..25, or a causal
 * chain joined by '-' ("2-25" means rank 2 leads to rank 25). This mirrors
 * the server's grammar for input validation only; the server re-validates
 * every decision.
 */

export class GrammarError extends Error {}

export function parseLabel(s: string): number[] {
  const trimmed = s.trim();
  if (!trimmed) {
    throw new GrammarError("empty label");
  }
  const chain = trimmed.split("-").map((tok) => {
    if (!/^\d+$/.test(tok)) {
      throw new GrammarError(`non-numeric token "${tok}"`);
    }
    return parseInt(tok, 10);
  });
  for (const rank of chain) {
    if (rank < 1 || rank > 25) {
      throw new GrammarError(`rank out of range 1..25: ${rank}`);
    }
  }
  for (let i = 1; i < chain.length; i++) {
    if (chain[i] === chain[i - 1]) {
      throw new GrammarError(`immediate repetition: ${chain[i]}-${chain[i]}`);
    }
  }
  return chain;
}

export function formatLabel(chain: number[]): string {
  return chain.join("-");
}
