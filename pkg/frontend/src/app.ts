// Page wiring: fetch an envelope, validate, render, switch roles.
// One in-flight fetch per (session, role); a failed switch keeps the
// prior view readable and says so in a toast.

import { wireInteractions, InteractionController } from "./interactions.js";
import { renderDocument, RenderedPage } from "./render.js";
import { documentText, parseEnvelope, EnvelopeError } from "./validate.js";
import type { ProcessSchema } from "./types.js";

export const ROLES = ["teacher", "reviewer", "general", "writer"] as const;
export type Role = (typeof ROLES)[number];

export class ReaderApp {
  readonly container: HTMLElement;
  readonly baseUrl: string;
  schema: ProcessSchema | null = null;
  page: RenderedPage | null = null;
  controller: InteractionController | null = null;
  role: Role = "general";
  sessionId: string | null = null;
  private inflight = new Map<string, Promise<void>>();

  constructor(container: HTMLElement, baseUrl: string) {
    this.container = container;
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  /** Load and render one session for one role; duplicate calls coalesce. */
  load(sessionId: string, role: Role): Promise<void> {
    const key = `${sessionId}:${role}`;
    const pending = this.inflight.get(key);
    if (pending) return pending;
    const task = this.fetchAndRender(sessionId, role)
      .finally(() => this.inflight.delete(key));
    this.inflight.set(key, task);
    return task;
  }

  switchRole(role: Role): Promise<void> {
    if (!this.sessionId) return Promise.resolve();
    return this.load(this.sessionId, role);
  }

  private async fetchAndRender(sessionId: string, role: Role): Promise<void> {
    let raw: string;
    try {
      const url = `${this.baseUrl}/v1/sessions/${sessionId}/schema?role=${role}`;
      const resp = await fetch(url);
      if (!resp.ok) throw new Error(`schema fetch failed: ${resp.status}`);
      raw = await resp.text();
    } catch (err) {
      this.toast(`could not load the ${role} view: ${String(err)}`);
      return; // prior view stays up
    }
    let schema: ProcessSchema;
    try {
      schema = await parseEnvelope(raw);
    } catch (err) {
      if (err instanceof EnvelopeError) {
        this.renderError(err.message);
        return;
      }
      throw err;
    }
    this.present(schema, sessionId, role);
  }

  /** Render an already-validated schema (also used by tests). */
  present(schema: ProcessSchema, sessionId: string, role: Role): void {
    const doc = this.container.ownerDocument;
    const page = renderDocument(schema, doc);

    const bar = doc.createElement("nav");
    bar.className = "role-bar";
    const select = doc.createElement("select");
    select.className = "role-select";
    for (const r of ROLES) {
      const option = doc.createElement("option");
      option.value = r;
      option.textContent = r;
      option.selected = r === role;
      select.appendChild(option);
    }
    select.addEventListener("change", () => {
      void this.switchRole(select.value as Role);
    });
    bar.appendChild(select);
    page.root.prepend(bar);

    // full replacement: nothing from the previous role's envelope survives
    this.schema = schema;
    this.page = page;
    this.sessionId = sessionId;
    this.role = role;
    this.container.replaceChildren(page.root);
    this.controller = wireInteractions(page);
  }

  renderError(message: string): void {
    const doc = this.container.ownerDocument;
    const box = doc.createElement("div");
    box.className = "envelope-error";
    box.textContent = `This session cannot be shown: ${message}`;
    this.schema = null;
    this.page = null;
    this.controller = null;
    this.container.replaceChildren(box);
  }

  toast(message: string): void {
    const doc = this.container.ownerDocument;
    doc.querySelectorAll(".toast").forEach((t) => t.remove());
    const note = doc.createElement("div");
    note.className = "toast";
    note.textContent = message;
    (doc.body ?? this.container).appendChild(note);
    setTimeout(() => note.remove(), 4000);
  }

  /** Everything this page holds for the current role, for privacy audits. */
  pageMemory(): string {
    return JSON.stringify({
      html: this.container.innerHTML,
      schema: this.schema,
      role: this.role,
    });
  }

  renderedText(): string {
    if (!this.page) return "";
    const blocks = Array.from(this.page.main.querySelectorAll(".block"));
    return blocks.map((b) => b.textContent ?? "").join("\n\n");
  }

  expectedText(): string {
    return this.schema ? documentText(this.schema) : "";
  }
}
