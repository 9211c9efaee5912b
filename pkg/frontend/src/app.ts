/**
 * Annotation workbench: single-page app over the annotation service API.
 *
 * The server is the only state of record; refreshing the page loses
 * nothing but the in-flight draft. Rendering is a plain rebuild from one
 * state object on every change.
 */

import { ApiClient, ApiError, type Progress, type QueueItem } from "./api.js";
import {
  type AnnotationDraft,
  type PolarityChoice,
  type SpanKind,
  type Topic,
  SPAN_KINDS,
  TOPICS,
  buildPayload,
  keyAction,
  keywordSelectionEnabled,
  newDraft,
  setPolarity,
  setTopic,
  splitOffset,
  toggleToken,
  validateDraft,
} from "./draft.js";

const TOPIC_LABELS: Record<Topic, string> = {
  effectiveness: "1 effectiveness",
  efficiency: "2 efficiency",
  freedom_from_risk: "3 freedom from risk",
  other: "4 other",
};

const POLARITY_LABELS: Record<PolarityChoice, string> = {
  positive: "p positive",
  negative: "n negative",
  neutral: "0 neutral",
};

const SLOT_LABELS: Record<SpanKind, string> = {
  keyword: "k keyword",
  opinion: "o opinion",
  modifier: "m modifier",
};

interface AppState {
  queue: QueueItem[];
  index: number;
  draft: AnnotationDraft | null;
  activeSlot: SpanKind;
  splitMode: boolean;
  progress: Progress;
  error: string | null;
  notice: string | null;
  busy: boolean;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export class App {
  private state: AppState = {
    queue: [],
    index: 0,
    draft: null,
    activeSlot: "keyword",
    splitMode: false,
    progress: { total: 0, annotated: 0 },
    error: null,
    notice: null,
    busy: false,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  current(): QueueItem | null {
    return this.state.queue[this.state.index] ?? null;
  }

  async start(): Promise<void> {
    document.addEventListener("keydown", (e) => this.onKey(e));
    await this.refresh();
  }

  private async refresh(): Promise<void> {
    this.state.busy = true;
    this.render();
    try {
      const [progress, queue] = await Promise.all([
        this.api.progress(),
        this.api.queue("unannotated", 25),
      ]);
      this.state.progress = progress;
      this.state.queue = queue;
      this.state.index = 0;
      const item = this.current();
      this.state.draft = item
        ? newDraft(item.sentence.sentence_id, item.sentence.tokens.length)
        : null;
      this.state.splitMode = false;
      this.state.error = null;
    } catch (err) {
      this.state.error = `cannot reach the annotation service: ${String(err)} (retry with r)`;
    } finally {
      this.state.busy = false;
      this.render();
    }
  }

  private onKey(e: KeyboardEvent): void {
    if ((e.target as HTMLElement | null)?.tagName === "INPUT") {
      return;
    }
    if (e.key === "r" && this.state.error) {
      void this.refresh();
      return;
    }
    const action = keyAction(e.key);
    if (!action) {
      return;
    }
    e.preventDefault();
    this.apply(action);
  }

  apply(action: NonNullable<ReturnType<typeof keyAction>>): void {
    const draft = this.state.draft;
    switch (action.kind) {
      case "topic":
        if (draft) {
          this.state.draft = setTopic(draft, action.topic);
          if (action.topic === "other" && this.state.activeSlot === "keyword") {
            this.state.activeSlot = "opinion";
          }
        }
        break;
      case "polarity":
        if (draft) {
          this.state.draft = setPolarity(draft, action.polarity);
        }
        break;
      case "span-slot":
        this.state.activeSlot = action.slot;
        break;
      case "split-mode":
        this.state.splitMode = !this.state.splitMode;
        break;
      case "submit":
        void this.submit();
        return;
    }
    this.render();
  }

  clickToken(index: number): void {
    if (!this.state.draft) {
      return;
    }
    this.state.draft = toggleToken(this.state.draft, this.state.activeSlot, index);
    this.render();
  }

  async clickSplitGap(charIndex: number): Promise<void> {
    const item = this.current();
    if (!item) {
      return;
    }
    const spanLength = item.sentence.span_end - item.sentence.span_start;
    const offset = splitOffset(charIndex, spanLength);
    if (offset === null) {
      this.state.error = "cannot split at a sentence boundary";
      this.render();
      return;
    }
    try {
      await this.api.splitSentence(item.sentence.sentence_id, offset);
      this.state.notice = "sentence split; queue refreshed";
      await this.refresh();
    } catch (err) {
      this.state.error = err instanceof ApiError ? err.message : String(err);
      this.render();
    }
  }

  async submit(): Promise<void> {
    const draft = this.state.draft;
    if (!draft || this.state.busy) {
      return;
    }
    const problems = validateDraft(draft);
    if (problems.length > 0) {
      this.state.error = problems.join(" · ");
      this.render();
      return;
    }
    this.state.busy = true;
    this.render();
    try {
      await this.api.submitAnnotation(buildPayload(draft));
      this.state.notice = `annotated ${draft.sentenceId}`;
      await this.refresh();
    } catch (err) {
      // validation failure or network loss: keep the draft, show the reason
      this.state.error = err instanceof ApiError ? err.message : `${String(err)} (retry with Enter)`;
      this.state.busy = false;
      this.render();
    }
  }

  // -- rendering ----------------------------------------------------------

  render(): void {
    const item = this.current();
    const parts: string[] = [];
    parts.push(this.renderProgress());
    if (this.state.error) {
      parts.push(`<div class="banner error">${escapeHtml(this.state.error)}</div>`);
    } else if (this.state.notice) {
      parts.push(`<div class="banner notice">${escapeHtml(this.state.notice)}</div>`);
    }
    if (!item) {
      parts.push(
        this.state.busy
          ? `<p class="done">loading…</p>`
          : `<p class="done">queue is empty — every sentence is annotated.</p>`,
      );
    } else {
      parts.push(this.renderReview(item));
      parts.push(this.state.splitMode ? this.renderSplitView(item) : this.renderTokens(item));
      parts.push(this.renderControls());
    }
    parts.push(
      `<footer>shortcuts: 1-4 topic · p/n/0 polarity · k/o/m span slot · ` +
        `click tokens to select · Enter submit · s split mode</footer>`,
    );
    this.root.innerHTML = parts.join("\n");
    this.bindClicks();
  }

  private renderProgress(): string {
    const { total, annotated } = this.state.progress;
    const pct = total > 0 ? Math.round((annotated / total) * 100) : 0;
    return (
      `<div class="progress"><div class="progress-fill" style="width:${pct}%"></div>` +
      `<span class="progress-text">${annotated} / ${total} annotated</span></div>`
    );
  }

  private renderReview(item: QueueItem): string {
    const { body } = item.review;
    const { span_start, span_end } = item.sentence;
    const before = escapeHtml(body.slice(0, span_start));
    const focus = escapeHtml(body.slice(span_start, span_end));
    const after = escapeHtml(body.slice(span_end));
    return (
      `<section class="review"><h2>${escapeHtml(item.review.title || item.review.product_id)}` +
      ` <span class="stars">${"★".repeat(item.review.stars)}</span></h2>` +
      `<p class="body">${before}<mark>${focus}</mark>${after}</p></section>`
    );
  }

  private renderTokens(item: QueueItem): string {
    const draft = this.state.draft;
    const chips = item.sentence.tokens
      .map((tok, i) => {
        const classes = ["token"];
        for (const kind of SPAN_KINDS) {
          const span = draft?.spans[kind];
          if (span && i >= span.start && i < span.end) {
            classes.push(`in-${kind}`);
          }
        }
        return `<button class="${classes.join(" ")}" data-token="${i}">${escapeHtml(tok)}</button>`;
      })
      .join("");
    return `<section class="tokens" id="tokens">${chips}</section>`;
  }

  private renderSplitView(item: QueueItem): string {
    const raw = item.review.body.slice(item.sentence.span_start, item.sentence.span_end);
    const cells = Array.from(raw)
      .map(
        (ch, i) =>
          `<span class="gap" data-gap="${i}"></span><span class="char">${escapeHtml(ch)}</span>`,
      )
      .join("");
    return (
      `<section class="split" id="split">` +
      `<p class="hint">split mode: click between two characters to split there (s to leave)</p>` +
      `<div class="chars">${cells}</div></section>`
    );
  }

  private renderControls(): string {
    const draft = this.state.draft;
    const topicButtons = TOPICS.map((t) => {
      const active = draft?.topic === t ? " active" : "";
      return `<button class="choice${active}" data-topic="${t}">${TOPIC_LABELS[t]}</button>`;
    }).join("");
    const slotButtons = SPAN_KINDS.map((k) => {
      const active = this.state.activeSlot === k ? " active" : "";
      const disabled = k === "keyword" && draft && !keywordSelectionEnabled(draft) ? " disabled" : "";
      return `<button class="choice${active}" data-slot="${k}"${disabled}>${SLOT_LABELS[k]}</button>`;
    }).join("");
    const polarityButtons = (Object.keys(POLARITY_LABELS) as PolarityChoice[])
      .map((p) => {
        const active = draft?.polarity === p ? " active" : "";
        return `<button class="choice${active}" data-polarity="${p}">${POLARITY_LABELS[p]}</button>`;
      })
      .join("");
    return (
      `<section class="controls">` +
      `<div class="group"><span class="label">topic</span>${topicButtons}</div>` +
      `<div class="group"><span class="label">select</span>${slotButtons}</div>` +
      `<div class="group"><span class="label">polarity</span>${polarityButtons}</div>` +
      `<div class="group"><button id="submit" class="primary">submit (Enter)</button>` +
      `<button id="split-toggle">${this.state.splitMode ? "leave" : "enter"} split mode (s)</button></div>` +
      `</section>`
    );
  }

  private bindClicks(): void {
    this.root.querySelectorAll<HTMLButtonElement>("[data-token]").forEach((el) => {
      el.addEventListener("click", () => this.clickToken(Number(el.dataset.token)));
    });
    this.root.querySelectorAll<HTMLElement>("[data-gap]").forEach((el) => {
      el.addEventListener("click", () => void this.clickSplitGap(Number(el.dataset.gap)));
    });
    this.root.querySelectorAll<HTMLButtonElement>("[data-topic]").forEach((el) => {
      el.addEventListener("click", () =>
        this.apply({ kind: "topic", topic: el.dataset.topic as Topic }),
      );
    });
    this.root.querySelectorAll<HTMLButtonElement>("[data-slot]").forEach((el) => {
      el.addEventListener("click", () =>
        this.apply({ kind: "span-slot", slot: el.dataset.slot as SpanKind }),
      );
    });
    this.root.querySelectorAll<HTMLButtonElement>("[data-polarity]").forEach((el) => {
      el.addEventListener("click", () =>
        this.apply({ kind: "polarity", polarity: el.dataset.polarity as PolarityChoice }),
      );
    });
    this.root.querySelector("#submit")?.addEventListener("click", () => void this.submit());
    this.root
      .querySelector("#split-toggle")
      ?.addEventListener("click", () => this.apply({ kind: "split-mode" }));
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  const annotatorInput = document.getElementById("annotator") as HTMLInputElement | null;
  if (!root) {
    throw new Error("missing #app container");
  }
  const api = new ApiClient("", annotatorInput?.value || "annotator");
  annotatorInput?.addEventListener("change", () => {
    api.annotator = annotatorInput.value || "annotator";
  });
  const app = new App(api, root);
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
