// Canonical JSON: sorted keys, no whitespace, raw (non-ASCII-escaped)
// strings. Byte-compatible with the server's serializer, which is what
// makes checksums verifiable on this side of the wire.

export function canonicalStringify(value: unknown): string {
  if (value === null) return "null";
  switch (typeof value) {
    case "boolean":
      return value ? "true" : "false";
    case "number": {
      if (!Number.isFinite(value)) {
        throw new Error("non-finite number in schema");
      }
      const text = String(value);
      if (text.includes("e") || text.includes("E")) {
        throw new Error(`number ${value} has no canonical decimal form`);
      }
      return text;
    }
    case "string":
      // JSON.stringify escapes exactly the canonical set:
      // \\ \" and control chars; everything else stays raw UTF-8.
      return JSON.stringify(value);
    case "object":
      break;
    default:
      throw new Error(`cannot canonicalize a ${typeof value}`);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalStringify).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .filter(([, v]) => v !== undefined)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
  const body = entries.map(
    ([key, v]) => JSON.stringify(key) + ":" + canonicalStringify(v),
  );
  return "{" + body.join(",") + "}";
}

export async function sha256Hex(text: string): Promise<string> {
  const bytes = new TextEncoder().encode(text);
  const digest = await crypto.subtle.digest("SHA-256", bytes);
  return Array.from(new Uint8Array(digest))
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}
