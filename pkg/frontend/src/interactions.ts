// Click-to-reveal behavior. Every reveal reads only the envelope payload
// already in memory; nothing here touches the network.

import type { MarkInstance, RenderedPage } from "./render.js";
import type { Mark, RevealState } from "./types.js";

export const REVEAL_MS = 5000;

interface StackEntry {
  text?: string;
  kind?: string;
  version?: number;
}

export class InteractionController {
  private page: RenderedPage;
  private panel: HTMLElement;
  private states = new Map<string, RevealState>();
  private timers = new Map<string, ReturnType<typeof setTimeout>>();
  private revealMs: number;
  private openId: string | null = null;

  constructor(page: RenderedPage, revealMs: number = REVEAL_MS) {
    this.page = page;
    this.revealMs = revealMs;
    const panel = page.root.querySelector<HTMLElement>(".reveal-panel");
    if (!panel) throw new Error("rendered page has no reveal panel");
    this.panel = panel;
    page.root.addEventListener("click", (event) => {
      const hit = (event.target as HTMLElement | null)
        ?.closest<HTMLElement>("[data-mark-id]");
      if (!hit || !page.root.contains(hit)) return;
      const instance = page.registry.get(hit.dataset.markId ?? "");
      if (instance) this.activate(instance, hit);
    });
  }

  stateOf(id: string): RevealState {
    return this.states.get(id) ?? { kind: "closed" };
  }

  /** Innermost mark under the click may just decorate a bigger one. */
  private activate(hit: MarkInstance, el: HTMLElement): void {
    for (let m: MarkInstance | null = hit; m; m = m.parent) {
      const channel = m.mark.channel;
      if (channel === "eraser-crumb") return this.toggleGhost(m);
      if (channel === "masking-tape") {
        return m.mark.variant === "stacked"
          ? this.cycle(m, stackEntries(m.mark), describeLayer)
          : this.timedReveal(m);
      }
      if (channel === "residual-glue") {
        return this.cycle(m, discardedEntries(m.mark), describeDiscard);
      }
      if (channel === "stencil" && m.mark.payload?.feedback !== undefined) {
        return this.toggleFeedback(m);
      }
    }
    this.nudge(el);
  }

  private close(): void {
    if (this.openId !== null) {
      const timer = this.timers.get(this.openId);
      if (timer !== undefined) clearTimeout(timer);
      this.timers.delete(this.openId);
      this.states.set(this.openId, { kind: "closed" });
    }
    this.openId = null;
    this.panel.hidden = true;
    this.panel.replaceChildren();
  }

  private open(instance: MarkInstance, state: RevealState,
    lines: [string, string][]): void {
    const reopening = this.openId === instance.id;
    this.close();
    if (reopening && state.kind === "open") return; // plain toggle
    this.openId = instance.id;
    this.states.set(instance.id, state);
    for (const [label, text] of lines) {
      const row = this.panel.ownerDocument.createElement("p");
      row.className = `reveal-${label}`;
      row.textContent = text;
      this.panel.appendChild(row);
    }
    this.panel.hidden = false;
  }

  private toggleGhost(crumb: MarkInstance): void {
    const ghost = (crumb.mark.children ?? [])
      .find((c) => c.channel === "ghost-text");
    const payload = ghost?.payload;
    if (!payload || typeof payload.instruction !== "string") {
      return this.nudgeById(crumb.id);
    }
    const lines: [string, string][] = [["instruction", payload.instruction]];
    if (typeof payload.context === "string") {
      lines.push(["context", payload.context]);
    }
    this.open(crumb, { kind: "open" }, lines);
  }

  private toggleFeedback(stencil: MarkInstance): void {
    const payload = stencil.mark.payload ?? {};
    const lines: [string, string][] = [];
    if (typeof payload.instruction === "string") {
      lines.push(["instruction", payload.instruction]);
    }
    lines.push(["feedback", String(payload.feedback)]);
    if (typeof payload.context === "string") {
      lines.push(["context", payload.context]);
    }
    this.open(stencil, { kind: "open" }, lines);
  }

  private timedReveal(tape: MarkInstance): void {
    if (this.openId === tape.id) return this.close(); // early close
    const payload = tape.mark.payload ?? {};
    const original = payload.original ?? payload.inserted;
    if (typeof original !== "string") return this.nudgeById(tape.id);
    this.open(tape, { kind: "timed", expiry: Date.now() + this.revealMs },
      [["original", original]]);
    this.timers.set(tape.id, setTimeout(() => {
      if (this.openId === tape.id) this.close();
    }, this.revealMs));
  }

  /** Stacked tape and sequenced glue step through entries, then close. */
  private cycle(instance: MarkInstance, entries: StackEntry[],
    describe: (entry: StackEntry, index: number, total: number) =>
      [string, string][]): void {
    if (entries.length === 0) return this.nudgeById(instance.id);
    const prior = this.states.get(instance.id);
    const index = this.openId === instance.id && prior?.kind === "cycling"
      ? prior.index + 1
      : 0;
    if (index >= entries.length) return this.close();
    this.open(instance, { kind: "cycling", index },
      describe(entries[index]!, index, entries.length));
  }

  private nudgeById(id: string): void {
    const el = this.page.root.querySelector<HTMLElement>(
      `[data-mark-id="${id}"]`);
    if (el) this.nudge(el);
  }

  private nudge(el: HTMLElement): void {
    el.classList.add("nudge");
    setTimeout(() => el.classList.remove("nudge"), 300);
  }
}

function stackEntries(mark: Mark): StackEntry[] {
  const stack = mark.payload?.stack;
  return Array.isArray(stack) ? (stack as StackEntry[]) : [];
}

function discardedEntries(mark: Mark): StackEntry[] {
  const discarded = mark.payload?.discarded;
  return Array.isArray(discarded) ? (discarded as StackEntry[]) : [];
}

function describeLayer(entry: StackEntry, index: number,
  total: number): [string, string][] {
  return [
    ["layer", `draft ${index + 1} of ${total}`],
    ["original", entry.text ?? ""],
  ];
}

function describeDiscard(entry: StackEntry, index: number,
  total: number): [string, string][] {
  return [
    ["layer", `discarded ${index + 1} of ${total}`],
    ["original", entry.text ?? ""],
  ];
}

export function wireInteractions(page: RenderedPage,
  revealMs: number = REVEAL_MS): InteractionController {
  return new InteractionController(page, revealMs);
}
