/**
 * Wire protocol: one JSON object per line.
 *
 * hello:   {"op": "hello"}                -> {"model": "<name>", "dim": 384}
 * encode:  {"id": 7, "texts": ["..."]}    -> {"id": 7, "dim": 384, "vectors": [[...], ...]}
 * failure:                                -> {"id": 7, "error": "..."}
 */

export interface HelloRequest {
  op: "hello";
}

export interface EncodeRequest {
  id: number;
  texts: string[];
}

export type Request = HelloRequest | EncodeRequest;

export function encodeLine(value: unknown): string {
  return JSON.stringify(value) + "\n";
}

export function splitLines(buffer: string): { lines: string[]; rest: string } {
  const lines: string[] = [];
  let rest = buffer;
  for (;;) {
    const newline = rest.indexOf("\n");
    if (newline < 0) break;
    lines.push(rest.slice(0, newline));
    rest = rest.slice(newline + 1);
  }
  return { lines, rest };
}

export function parseRequest(line: string): { ok: true; value: Request } | { ok: false; error: string } {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    return { ok: false, error: "malformed JSON line" };
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    return { ok: false, error: "request must be a JSON object" };
  }
  const obj = parsed as Record<string, unknown>;
  if (obj.op === "hello") {
    return { ok: true, value: { op: "hello" } };
  }
  if (typeof obj.id !== "number" || !Number.isInteger(obj.id)) {
    return { ok: false, error: "request needs an integer id" };
  }
  if (!Array.isArray(obj.texts) || obj.texts.some((t) => typeof t !== "string")) {
    return { ok: false, error: "request needs a texts array of strings" };
  }
  return { ok: true, value: { id: obj.id, texts: obj.texts as string[] } };
}
