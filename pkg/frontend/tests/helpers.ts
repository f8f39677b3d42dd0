import { readFileSync, readdirSync } from "node:fs";
import { join } from "node:path";

import type { Envelope, ProcessSchema } from "../src/types.js";

const FIXTURE_DIR = join(__dirname, "fixtures");

export function fixtureNames(): string[] {
  return readdirSync(FIXTURE_DIR)
    .filter((name) => name.endsWith(".json"))
    .sort();
}

export function rawFixture(name: string): string {
  return readFileSync(join(FIXTURE_DIR, name), "utf-8");
}

export function fixtureEnvelope(name: string): Envelope {
  return JSON.parse(rawFixture(name)) as Envelope;
}

export function fixtureSchema(name: string): ProcessSchema {
  return fixtureEnvelope(name).schema;
}

/** All context strings a full-prompt envelope carries, for privacy tests. */
export function contextStrings(schema: ProcessSchema): string[] {
  const found: string[] = [];
  const walk = (marks: ProcessSchema["marks"]) => {
    for (const mark of marks ?? []) {
      const context = mark.payload?.context;
      if (typeof context === "string") found.push(context);
      walk(mark.children ?? []);
    }
  };
  walk(schema.marks);
  return found;
}
