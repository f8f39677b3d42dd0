import { describe, expect, it } from "vitest";

import { renderDocument, renderedText } from "../src/render.js";
import { documentText } from "../src/validate.js";
import type { Mark, ProcessSchema } from "../src/types.js";
import { fixtureNames, fixtureSchema } from "./helpers.js";

function countMarks(marks: Mark[]): number {
  let n = 0;
  for (const mark of marks) {
    n += 1 + countMarks(mark.children ?? []);
  }
  return n;
}

describe("text fidelity", () => {
  // The acceptance bar: collapsing every mark leaves exactly the
  // document text, for every fixture and every role.
  for (const name of fixtureNames()) {
    it(`rendered text equals envelope text for ${name}`, () => {
      const schema = fixtureSchema(name);
      const page = renderDocument(schema, document);
      expect(renderedText(page.main)).toBe(documentText(schema));
    });
  }

  it("keeps each block's text equal to its runs", () => {
    const schema = fixtureSchema("matilda-teacher.json");
    const page = renderDocument(schema, document);
    const blocks = page.main.querySelectorAll(".block");
    expect(blocks).toHaveLength(schema.document.blocks.length);
    schema.document.blocks.forEach((block, i) => {
      const want = block.runs.map((r) => r.text).join("");
      expect(blocks[i]!.textContent).toBe(want);
    });
  });

  it("renders a schema with no marks as plain text", () => {
    const schema = fixtureSchema("bruce-teacher.json");
    const bare: ProcessSchema = { ...schema, marks: [] };
    const page = renderDocument(bare, document);
    expect(page.main.querySelectorAll(".mark")).toHaveLength(0);
    expect(renderedText(page.main)).toBe(documentText(schema));
  });
});

describe("mark placement", () => {
  it("registers every mark with a resolvable element id", () => {
    for (const name of fixtureNames()) {
      const schema = fixtureSchema(name);
      const page = renderDocument(schema, document);
      expect(page.registry.size).toBe(countMarks(schema.marks));
      for (const id of page.registry.keys()) {
        const el = page.root.querySelector(`[data-mark-id="${id}"]`);
        expect(el, `${name} mark ${id}`).not.toBeNull();
      }
    }
  });

  it("renders crumbs as empty glyphs with per-mark intensity", () => {
    const schema = fixtureSchema("lavender-teacher.json");
    const page = renderDocument(schema, document);
    const crumbs = Array.from(
      page.main.querySelectorAll<HTMLElement>(".eraser-crumb"));
    expect(crumbs.length).toBeGreaterThanOrEqual(2);
    const intensities = new Set(
      crumbs.map((c) => c.style.getPropertyValue("--intensity")));
    expect(intensities.size).toBeGreaterThanOrEqual(2);
    for (const crumb of crumbs) {
      expect(crumb.textContent).toBe("");
      expect(crumb.classList.contains("glyph")).toBe(true);
    }
  });

  it("keeps crumbs inside the tape they decorate", () => {
    const schema = fixtureSchema("lavender-teacher.json");
    const page = renderDocument(schema, document);
    const tape = page.main.querySelector(".masking-tape.stacked");
    expect(tape).not.toBeNull();
    expect(tape!.querySelectorAll(".eraser-crumb").length)
      .toBeGreaterThanOrEqual(1);
  });

  it("shows discarded-draft glue as an empty glyph", () => {
    const schema = fixtureSchema("matilda-teacher.json");
    const page = renderDocument(schema, document);
    const glue = page.main.querySelector<HTMLElement>(".residual-glue");
    expect(glue).not.toBeNull();
    expect(glue!.className).toBe("mark residual-glue sequenced glyph");
    expect(glue!.textContent).toBe("");
  });

  it("wraps guided-edit strokes around their text", () => {
    const schema = fixtureSchema("lavender-teacher.json");
    const page = renderDocument(schema, document);
    const lined = page.main.querySelectorAll(".stencil.lined-strokes");
    const dotted = page.main.querySelectorAll(".stencil.dotted-strokes");
    expect(lined).toHaveLength(2);
    expect(dotted).toHaveLength(1);
    for (const stroke of [...lined, ...dotted]) {
      expect((stroke.textContent ?? "").length).toBeGreaterThan(0);
    }
    // the stencil heads sit in the margin and carry no text themselves
    for (const head of page.main.querySelectorAll(".stencil.single")) {
      expect(head.classList.contains("glyph")).toBe(true);
    }
  });

  it("tags runs with their font", () => {
    const schema = fixtureSchema("matilda-teacher.json");
    const page = renderDocument(schema, document);
    expect(page.main.querySelectorAll(".run.font-script").length)
      .toBeGreaterThan(0);
    expect(page.main.querySelectorAll(".run.font-sans").length)
      .toBeGreaterThan(0);
  });

  it("starts with the reveal panel hidden", () => {
    const schema = fixtureSchema("bruce-general.json");
    const page = renderDocument(schema, document);
    const panel = page.root.querySelector<HTMLElement>(".reveal-panel");
    expect(panel).not.toBeNull();
    expect(panel!.hidden).toBe(true);
    expect(panel!.textContent).toBe("");
  });
});
