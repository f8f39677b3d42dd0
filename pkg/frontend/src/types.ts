// Shapes of the schema envelope served by the draftmarks HTTP API.

export interface Envelope {
  format_version: string;
  checksum: string;
  schema: ProcessSchema;
}

export interface ProcessSchema {
  role: string;
  session: string;
  config: string;
  document: DocumentView;
  marks: Mark[];
}

export interface DocumentView {
  blocks: Block[];
}

export interface Block {
  node: number;
  kind: string;
  runs: Run[];
}

export interface Run {
  node: number;
  text: string;
  font?: "script" | "sans" | null;
}

export interface SpanAnchor {
  type: "span";
  node: number;
  start: number;
  end: number;
}

export interface MarginAnchor {
  type: "margin";
  node: number;
  placement: "start" | "after";
}

export type Anchor = SpanAnchor | MarginAnchor;

export interface Mark {
  channel: string;
  variant: string;
  anchor: Anchor;
  intensity?: number;
  payload?: Record<string, unknown>;
  children?: Mark[];
}

export type RevealState =
  | { kind: "closed" }
  | { kind: "open" }
  | { kind: "timed"; expiry: number }
  | { kind: "cycling"; index: number };
