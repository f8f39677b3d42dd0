// Schema-to-DOM rendering. Only run text ever becomes visible text inside
// the document element; marks either wrap a text range (tape, smudge,
// stencil strokes) or sit as empty glyphs (crumbs, ghosts, margin marks),
// so collapsing every mark leaves exactly the document text.

import type { Block, Mark, ProcessSchema } from "./types.js";

export interface MarkInstance {
  id: string;
  mark: Mark;
  parent: MarkInstance | null;
}

export interface RenderedPage {
  root: HTMLElement;
  main: HTMLElement;
  registry: Map<string, MarkInstance>;
}

const BLOCK_TAGS: Record<string, string> = {
  paragraph: "p",
  heading: "h2",
  "list-item": "div",
  text: "div",
};

// channels that visually cover their text range; everything else with a
// span anchor becomes an edge glyph inside its parent's element
const WRAPPING = new Set(["masking-tape", "smudge", "stencil"]);

interface Placed {
  instance: MarkInstance;
  start: number;
  end: number;
}

interface IntervalNode {
  placed: Placed;
  children: IntervalNode[];
}

interface Ctx {
  doc: Document;
  elements: Map<string, HTMLElement>;
  runElements: Map<number, HTMLElement>;
}

function assignIds(
  marks: Mark[],
  registry: Map<string, MarkInstance>,
  parent: MarkInstance | null,
): MarkInstance[] {
  const out: MarkInstance[] = [];
  for (const mark of marks) {
    const instance: MarkInstance = { id: `m${registry.size}`, mark, parent };
    registry.set(instance.id, instance);
    out.push(instance);
    out.push(...assignIds(mark.children ?? [], registry, instance));
  }
  return out;
}

function markElement(ctx: Ctx, instance: MarkInstance): HTMLElement {
  const el = ctx.doc.createElement("span");
  el.className = `mark ${instance.mark.channel} ${instance.mark.variant}`;
  el.dataset.markId = instance.id;
  const intensity = instance.mark.intensity;
  if (typeof intensity === "number") {
    el.style.setProperty("--intensity", String(intensity));
  }
  ctx.elements.set(instance.id, el);
  return el;
}

function glyphElement(ctx: Ctx, instance: MarkInstance): HTMLElement {
  const el = markElement(ctx, instance);
  el.classList.add("glyph");
  return el;
}

function buildIntervalTree(placed: Placed[]): IntervalNode[] {
  const sorted = [...placed].sort(
    (a, b) => a.start - b.start || b.end - a.end,
  );
  const roots: IntervalNode[] = [];
  const stack: IntervalNode[] = [];
  for (const p of sorted) {
    while (stack.length > 0 && p.start >= stack[stack.length - 1]!.placed.end) {
      stack.pop();
    }
    const top = stack[stack.length - 1];
    // clip rather than crash on a straddling span; well-formed schemas nest
    const node: IntervalNode = {
      placed: top && p.end > top.placed.end ? { ...p, end: top.placed.end } : p,
      children: [],
    };
    if (top) top.children.push(node);
    else roots.push(node);
    stack.push(node);
  }
  return roots;
}

function emitSegments(
  ctx: Ctx,
  target: HTMLElement,
  text: string,
  from: number,
  to: number,
  nodes: IntervalNode[],
): void {
  let cursor = from;
  for (const node of nodes) {
    const { start, end } = node.placed;
    if (start > cursor) {
      target.appendChild(ctx.doc.createTextNode(text.slice(cursor, start)));
    }
    const el = markElement(ctx, node.placed.instance);
    emitSegments(ctx, el, text, start, end, node.children);
    target.appendChild(el);
    cursor = Math.max(cursor, end);
  }
  if (cursor < to) {
    target.appendChild(ctx.doc.createTextNode(text.slice(cursor, to)));
  }
}

function renderBlock(
  ctx: Ctx,
  block: Block,
  wrapByNode: Map<number, Placed[]>,
  marginStart: Map<number, MarkInstance[]>,
  marginAfter: Map<number, MarkInstance[]>,
): HTMLElement {
  const el = ctx.doc.createElement(BLOCK_TAGS[block.kind] ?? "div");
  el.className = `block block-${block.kind}`;
  el.dataset.node = String(block.node);

  const runNodes = new Set(block.runs.map((run) => run.node));
  const blockOwnsNode = !runNodes.has(block.node);

  if (blockOwnsNode) {
    for (const owner of marginStart.get(block.node) ?? []) {
      el.appendChild(glyphElement(ctx, owner));
    }
  }

  let inner: HTMLElement = el;
  if (blockOwnsNode) {
    // granularity collapse can target the block itself; wrap everything
    for (const placed of wrapByNode.get(block.node) ?? []) {
      const wrapper = markElement(ctx, placed.instance);
      inner.appendChild(wrapper);
      inner = wrapper;
    }
  }

  for (const run of block.runs) {
    for (const owner of marginStart.get(run.node) ?? []) {
      inner.appendChild(glyphElement(ctx, owner));
    }
    const span = ctx.doc.createElement("span");
    span.className = run.font ? `run font-${run.font}` : "run";
    span.dataset.node = String(run.node);
    ctx.runElements.set(run.node, span);
    emitSegments(ctx, span, run.text, 0, run.text.length,
      buildIntervalTree(wrapByNode.get(run.node) ?? []));
    inner.appendChild(span);
    for (const owner of marginAfter.get(run.node) ?? []) {
      inner.appendChild(glyphElement(ctx, owner));
    }
  }

  if (blockOwnsNode) {
    for (const owner of marginAfter.get(block.node) ?? []) {
      el.appendChild(glyphElement(ctx, owner));
    }
  }
  return el;
}

export function renderDocument(
  schema: ProcessSchema,
  doc: Document = document,
): RenderedPage {
  const registry = new Map<string, MarkInstance>();
  const instances = assignIds(schema.marks ?? [], registry, null);
  const ctx: Ctx = { doc, elements: new Map(), runElements: new Map() };

  const wrapByNode = new Map<number, Placed[]>();
  const glyphSpans: { instance: MarkInstance; node: number }[] = [];
  const marginStart = new Map<number, MarkInstance[]>();
  const marginAfter = new Map<number, MarkInstance[]>();
  for (const instance of instances) {
    const anchor = instance.mark.anchor;
    if (anchor.type === "span") {
      if (WRAPPING.has(instance.mark.channel)) {
        const list = wrapByNode.get(anchor.node) ?? [];
        list.push({ instance, start: anchor.start, end: anchor.end });
        wrapByNode.set(anchor.node, list);
      } else {
        glyphSpans.push({ instance, node: anchor.node });
      }
    } else {
      const bucket = anchor.placement === "start" ? marginStart : marginAfter;
      const list = bucket.get(anchor.node) ?? [];
      list.push(instance);
      bucket.set(anchor.node, list);
    }
  }

  const root = doc.createElement("div");
  root.className = "reader";

  const main = doc.createElement("main");
  main.className = "doc";
  for (const owner of marginStart.get(0) ?? []) {
    main.appendChild(glyphElement(ctx, owner));
  }
  for (const block of schema.document.blocks) {
    main.appendChild(
      renderBlock(ctx, block, wrapByNode, marginStart, marginAfter));
  }
  for (const owner of marginAfter.get(0) ?? []) {
    main.appendChild(glyphElement(ctx, owner));
  }
  root.appendChild(main);

  // crumbs and ghosts attach as edge glyphs inside their parent mark
  // (DFS id order guarantees the parent's element already exists)
  for (const { instance, node } of glyphSpans) {
    let host: HTMLElement | undefined;
    for (let p = instance.parent; p && !host; p = p.parent) {
      host = ctx.elements.get(p.id);
    }
    host = host ?? ctx.runElements.get(node);
    (host ?? main).appendChild(glyphElement(ctx, instance));
  }

  const panel = doc.createElement("aside");
  panel.className = "reveal-panel";
  panel.hidden = true;
  root.appendChild(panel);

  return { root, main, registry };
}

/** Document text as the page shows it with every reveal closed. */
export function renderedText(main: HTMLElement): string {
  const blocks = Array.from(main.querySelectorAll(".block"));
  return blocks.map((b) => b.textContent ?? "").join("\n\n");
}
