import { describe, expect, it } from "vitest";

import { canonicalStringify, sha256Hex } from "../src/canonical.js";
import { documentText, EnvelopeError, parseEnvelope } from "../src/validate.js";
import { fixtureEnvelope, fixtureNames, rawFixture } from "./helpers.js";

describe("parseEnvelope", () => {
  for (const name of fixtureNames()) {
    it(`accepts ${name}`, async () => {
      const schema = await parseEnvelope(rawFixture(name));
      expect(schema.session).toMatch(/^[0-9a-f]{64}$/);
      expect(schema.document.blocks.length).toBeGreaterThan(0);
    });
  }

  it("rejects bodies that are not json", async () => {
    await expect(parseEnvelope("not json")).rejects.toThrow(EnvelopeError);
    await expect(parseEnvelope("not json")).rejects.toThrow(/not valid JSON/);
  });

  it("rejects an unknown format version", async () => {
    const envelope = fixtureEnvelope("matilda-teacher.json");
    envelope.format_version = "2";
    await expect(parseEnvelope(JSON.stringify(envelope))).rejects.toThrow(/format version/);
  });

  it("rejects a tampered schema via the checksum", async () => {
    const envelope = fixtureEnvelope("matilda-teacher.json");
    envelope.schema.marks = [];
    await expect(parseEnvelope(JSON.stringify(envelope))).rejects.toThrow(/checksum/);
  });

  it("rejects a tampered checksum", async () => {
    const envelope = fixtureEnvelope("bruce-general.json");
    envelope.checksum = "00" + envelope.checksum.slice(2);
    await expect(parseEnvelope(JSON.stringify(envelope))).rejects.toThrow(/checksum/);
  });

  it("rejects a span anchor that runs past its node text even when resigned", async () => {
    // A forged envelope can carry a valid checksum over bad content, so the
    // structural checks must still reject it.
    const envelope = fixtureEnvelope("matilda-teacher.json");
    const mark = envelope.schema.marks.find((m) => m.anchor.type === "span");
    expect(mark).toBeDefined();
    if (mark && mark.anchor.type === "span") mark.anchor.end = 100_000;
    envelope.checksum = await sha256Hex(canonicalStringify(envelope.schema));
    await expect(parseEnvelope(JSON.stringify(envelope))).rejects.toThrow(EnvelopeError);
  });

  it("rejects an intensity outside [0, 1] even when resigned", async () => {
    const envelope = fixtureEnvelope("lavender-teacher.json");
    const crumb = (function find(marks): (typeof marks)[number] | undefined {
      for (const m of marks) {
        if (m.channel === "eraser-crumb") return m;
        const hit = find(m.children ?? []);
        if (hit) return hit;
      }
      return undefined;
    })(envelope.schema.marks);
    expect(crumb).toBeDefined();
    if (crumb) crumb.intensity = 1.5;
    envelope.checksum = await sha256Hex(canonicalStringify(envelope.schema));
    await expect(parseEnvelope(JSON.stringify(envelope))).rejects.toThrow(/intensity/);
  });
});

describe("documentText", () => {
  it("joins block run text with blank lines", async () => {
    const schema = await parseEnvelope(rawFixture("bruce-teacher.json"));
    const text = documentText(schema);
    expect(text.split("\n\n").length).toBe(schema.document.blocks.length);
    for (const block of schema.document.blocks) {
      const blockText = block.runs.map((r) => r.text).join("");
      expect(text).toContain(blockText);
    }
  });
});
