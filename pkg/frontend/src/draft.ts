/**
 * Annotation draft state machine.
 *
 * Pure functions over an immutable draft: token-range selection for the
 * keyword/opinion/modifier spans, topic and polarity choice, and a
 * client-side validation that mirrors the server's invariants as a strict
 * subset re-check (the UI can never build a request the server's own
 * validation would reject for reasons the client could see).
 */

export type Topic = "effectiveness" | "efficiency" | "freedom_from_risk" | "other";
export type PolarityChoice = "positive" | "negative" | "neutral";
export type SpanKind = "keyword" | "opinion" | "modifier";

export const TOPICS: Topic[] = ["effectiveness", "efficiency", "freedom_from_risk", "other"];
export const SPAN_KINDS: SpanKind[] = ["keyword", "opinion", "modifier"];

/** Token index range, half-open [start, end). */
export interface TokenRange {
  start: number;
  end: number;
}

export interface AnnotationDraft {
  sentenceId: string;
  tokenCount: number;
  topic: Topic | null;
  polarity: PolarityChoice | null;
  spans: Record<SpanKind, TokenRange | null>;
  dirty: boolean;
}

export function newDraft(sentenceId: string, tokenCount: number): AnnotationDraft {
  return {
    sentenceId,
    tokenCount,
    topic: null,
    polarity: null,
    spans: { keyword: null, opinion: null, modifier: null },
    dirty: false,
  };
}

export function setTopic(draft: AnnotationDraft, topic: Topic): AnnotationDraft {
  const spans = { ...draft.spans };
  if (topic === "other") {
    spans.keyword = null; // server invariant: 'other' must not carry a keyword span
  }
  return { ...draft, topic, spans, dirty: true };
}

export function setPolarity(draft: AnnotationDraft, polarity: PolarityChoice): AnnotationDraft {
  return { ...draft, polarity, dirty: true };
}

export function keywordSelectionEnabled(draft: AnnotationDraft): boolean {
  return draft.topic !== "other";
}

/**
 * Toggle a token in a span selection, keeping ranges contiguous:
 * no selection starts one; a click adjacent to the range extends it; a
 * click inside clears it; anywhere else restarts at the clicked token.
 * Keyword clicks are ignored while the topic is "other".
 */
export function toggleToken(
  draft: AnnotationDraft,
  kind: SpanKind,
  index: number,
): AnnotationDraft {
  if (index < 0 || index >= draft.tokenCount) {
    return draft;
  }
  if (kind === "keyword" && !keywordSelectionEnabled(draft)) {
    return draft;
  }
  const current = draft.spans[kind];
  let next: TokenRange | null;
  if (current === null) {
    next = { start: index, end: index + 1 };
  } else if (index === current.start - 1) {
    next = { start: index, end: current.end };
  } else if (index === current.end) {
    next = { start: current.start, end: index + 1 };
  } else if (index >= current.start && index < current.end) {
    next = null;
  } else {
    next = { start: index, end: index + 1 };
  }
  return { ...draft, spans: { ...draft.spans, [kind]: next }, dirty: true };
}

/** Validation errors, empty when the draft is submittable. */
export function validateDraft(draft: AnnotationDraft): string[] {
  const errors: string[] = [];
  if (draft.topic === null) {
    errors.push("choose a topic (keys 1-4)");
  }
  if (draft.polarity === null) {
    errors.push("choose a polarity (keys p/n/0)");
  }
  if (draft.topic !== null && draft.topic !== "other" && draft.spans.keyword === null) {
    errors.push(`topic '${draft.topic}' needs a keyword span (click its tokens)`);
  }
  if (draft.topic === "other" && draft.spans.keyword !== null) {
    errors.push("topic 'other' must not carry a keyword span");
  }
  for (const kind of SPAN_KINDS) {
    const span = draft.spans[kind];
    if (span !== null && !(0 <= span.start && span.start < span.end && span.end <= draft.tokenCount)) {
      errors.push(`${kind} span out of token range`);
    }
  }
  return errors;
}

export interface AnnotationPayload {
  sentence_id: string;
  topic: Topic;
  polarity: PolarityChoice;
  keyword_span: [number, number] | null;
  opinion_span: [number, number] | null;
  modifier_span: [number, number] | null;
}

/** Wire payload for POST /api/annotations; only valid drafts convert. */
export function buildPayload(draft: AnnotationDraft): AnnotationPayload {
  const errors = validateDraft(draft);
  if (errors.length > 0) {
    throw new Error(`draft not submittable: ${errors.join("; ")}`);
  }
  const asPair = (r: TokenRange | null): [number, number] | null =>
    r === null ? null : [r.start, r.end];
  return {
    sentence_id: draft.sentenceId,
    topic: draft.topic as Topic,
    polarity: draft.polarity as PolarityChoice,
    keyword_span: asPair(draft.spans.keyword),
    opinion_span: asPair(draft.spans.opinion),
    modifier_span: asPair(draft.spans.modifier),
  };
}

export type KeyAction =
  | { kind: "topic"; topic: Topic }
  | { kind: "polarity"; polarity: PolarityChoice }
  | { kind: "submit" }
  | { kind: "split-mode" }
  | { kind: "span-slot"; slot: SpanKind };

/** Keyboard shortcuts: 1-4 topic, p/n/0 polarity, Enter submit, s split
 * mode, k/o/m select the active span slot. */
export function keyAction(key: string): KeyAction | null {
  switch (key) {
    case "1":
      return { kind: "topic", topic: "effectiveness" };
    case "2":
      return { kind: "topic", topic: "efficiency" };
    case "3":
      return { kind: "topic", topic: "freedom_from_risk" };
    case "4":
      return { kind: "topic", topic: "other" };
    case "p":
      return { kind: "polarity", polarity: "positive" };
    case "n":
      return { kind: "polarity", polarity: "negative" };
    case "0":
      return { kind: "polarity", polarity: "neutral" };
    case "Enter":
      return { kind: "submit" };
    case "s":
      return { kind: "split-mode" };
    case "k":
      return { kind: "span-slot", slot: "keyword" };
    case "o":
      return { kind: "span-slot", slot: "opinion" };
    case "m":
      return { kind: "span-slot", slot: "modifier" };
    default:
      return null;
  }
}

/**
 * Character offset for a manual split, relative to the sentence's span in
 * the review body: splitting before displayed character `charIndex` of the
 * raw span text. Returns null at the boundaries (the server would 422).
 */
export function splitOffset(charIndex: number, spanLength: number): number | null {
  if (charIndex <= 0 || charIndex >= spanLength) {
    return null;
  }
  return charIndex;
}
