// Client-side envelope validation. The envelope is the page's entire
// data source, so nothing renders until it checks out.

import { canonicalStringify, sha256Hex } from "./canonical.js";
import type { Anchor, Envelope, Mark, ProcessSchema } from "./types.js";

export class EnvelopeError extends Error {}

const SUPPORTED_FORMAT = "1";

function fail(message: string): never {
  throw new EnvelopeError(message);
}

function nodeTexts(schema: ProcessSchema): Map<number, string> {
  const texts = new Map<number, string>();
  for (const block of schema.document.blocks) {
    let whole = "";
    for (const run of block.runs) {
      texts.set(run.node, run.text);
      whole += run.text;
    }
    if (!texts.has(block.node)) texts.set(block.node, whole);
  }
  return texts;
}

function checkAnchor(anchor: Anchor, texts: Map<number, string>): void {
  if (anchor.type === "span") {
    const text = texts.get(anchor.node);
    if (text === undefined) fail(`span anchored to unknown node ${anchor.node}`);
    if (
      !Number.isInteger(anchor.start) || !Number.isInteger(anchor.end) ||
      anchor.start < 0 || anchor.end < anchor.start || anchor.end > text.length
    ) {
      fail(`span ${anchor.start}..${anchor.end} outside node ${anchor.node}`);
    }
    return;
  }
  if (anchor.type === "margin") {
    if (anchor.placement !== "start" && anchor.placement !== "after") {
      fail(`unknown margin placement '${anchor.placement}'`);
    }
    if (!texts.has(anchor.node) && anchor.node !== 0) {
      fail(`margin anchored to unknown node ${anchor.node}`);
    }
    return;
  }
  fail("unknown anchor type");
}

function checkMark(mark: Mark, texts: Map<number, string>): void {
  if (typeof mark.channel !== "string" || typeof mark.variant !== "string") {
    fail("mark missing channel or variant");
  }
  checkAnchor(mark.anchor, texts);
  if (mark.intensity !== undefined) {
    if (
      typeof mark.intensity !== "number" ||
      mark.intensity < 0 || mark.intensity > 1
    ) {
      fail("intensity out of range");
    }
  }
  for (const child of mark.children ?? []) checkMark(child, texts);
}

/** Parse and verify one envelope; rejects rather than partially accepts. */
export async function parseEnvelope(raw: string): Promise<ProcessSchema> {
  let envelope: Envelope;
  try {
    envelope = JSON.parse(raw) as Envelope;
  } catch {
    fail("envelope is not valid JSON");
  }
  if (envelope.format_version !== SUPPORTED_FORMAT) {
    fail(`unsupported format version ${JSON.stringify(envelope.format_version)}`);
  }
  const schema = envelope.schema;
  if (typeof schema !== "object" || schema === null) fail("missing schema body");
  const digest = await sha256Hex(canonicalStringify(schema));
  if (digest !== envelope.checksum) fail("checksum mismatch");
  if (!Array.isArray(schema.document?.blocks)) fail("missing document blocks");
  const texts = nodeTexts(schema);
  for (const mark of schema.marks ?? []) checkMark(mark, texts);
  return schema;
}

/** Final text of the document: blocks joined by blank lines. */
export function documentText(schema: ProcessSchema): string {
  return schema.document.blocks
    .map((block) => block.runs.map((run) => run.text).join(""))
    .join("\n\n");
}
