import { describe, expect, it } from "vitest";

import { canonicalStringify, sha256Hex } from "../src/canonical.js";
import { fixtureEnvelope, fixtureNames } from "./helpers.js";

describe("canonicalStringify", () => {
  it("sorts object keys", () => {
    expect(canonicalStringify({ b: 1, a: 2 })).toBe('{"a":2,"b":1}');
  });

  it("sorts nested keys too", () => {
    const value = { z: { beta: 1, alpha: 2 }, a: [{ y: 0, x: 1 }] };
    expect(canonicalStringify(value)).toBe('{"a":[{"x":1,"y":0}],"z":{"alpha":2,"beta":1}}');
  });

  it("uses no whitespace", () => {
    expect(canonicalStringify([1, 2, { k: null }])).toBe('[1,2,{"k":null}]');
  });

  it("passes unicode through unescaped", () => {
    expect(canonicalStringify("fiancé … smoke")).toBe('"fiancé … smoke"');
  });

  it("escapes control characters and quotes the way python does", () => {
    expect(canonicalStringify('a"b\\c\nd\te')).toBe('"a\\"b\\\\c\\nd\\te"');
    expect(canonicalStringify("")).toBe('"\\u0001"');
  });

  it("drops undefined object entries", () => {
    expect(canonicalStringify({ a: 1, b: undefined })).toBe('{"a":1}');
  });

  it("renders integers without a decimal point", () => {
    expect(canonicalStringify({ n: 42, z: 0 })).toBe('{"n":42,"z":0}');
  });

  it("renders short decimals the same as python repr", () => {
    expect(canonicalStringify(0.6)).toBe("0.6");
    expect(canonicalStringify(0.1234)).toBe("0.1234");
  });

  it("refuses non-finite numbers", () => {
    expect(() => canonicalStringify(Number.NaN)).toThrow();
    expect(() => canonicalStringify(Number.POSITIVE_INFINITY)).toThrow();
  });
});

describe("checksum compatibility", () => {
  // The envelopes were produced by the python writer; re-deriving each
  // checksum here proves both sides agree on canonical bytes.
  for (const name of fixtureNames()) {
    it(`matches the stored checksum for ${name}`, async () => {
      const envelope = fixtureEnvelope(name);
      const digest = await sha256Hex(canonicalStringify(envelope.schema));
      expect(digest).toBe(envelope.checksum);
    });
  }

  it("has all nine role/session fixtures on disk", () => {
    expect(fixtureNames()).toHaveLength(9);
  });
});
