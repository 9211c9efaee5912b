/**
 * Typed client for the annotation service HTTP API. DOM-free: relies only
 * on the global fetch, so the same module drives the browser app and the
 * node integration tests.
 */

import type { AnnotationPayload } from "./draft.js";

export interface SentencePayload {
  sentence_id: string;
  review_id: string;
  ordinal: number;
  text: string;
  span_start: number;
  span_end: number;
  origin: string;
  needs_review: boolean;
  annotated: boolean;
  tokens: string[];
}

export interface ReviewPayload {
  review_id: string;
  source: string;
  product_id: string;
  stars: number;
  title: string;
  body: string;
  date: string | null;
  helpfulness_votes: number;
}

export interface QueueItem {
  sentence: SentencePayload;
  review: ReviewPayload;
}

export interface Progress {
  total: number;
  annotated: number;
}

export interface SplitResult {
  left: SentencePayload;
  right: SentencePayload;
}

/** Non-2xx response, carrying the server's error message and status. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const message =
      typeof body === "object" && body !== null && "error" in body
        ? String((body as { error: unknown }).error)
        : `${response.status} ${response.statusText}`;
    throw new ApiError(response.status, message);
  }
  return body as T;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    public annotator: string = "annotator",
  ) {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async progress(): Promise<Progress> {
    return asJson(await fetch(this.url("/api/progress")));
  }

  async queue(status: "unannotated" | "all" = "unannotated", limit = 25): Promise<QueueItem[]> {
    return asJson(await fetch(this.url(`/api/sentences?status=${status}&limit=${limit}`)));
  }

  async review(reviewId: string): Promise<ReviewPayload & { sentences: SentencePayload[] }> {
    return asJson(await fetch(this.url(`/api/reviews/${encodeURIComponent(reviewId)}`)));
  }

  async submitAnnotation(payload: AnnotationPayload): Promise<Record<string, unknown>> {
    return asJson(
      await fetch(this.url("/api/annotations"), {
        method: "POST",
        headers: {
          "Content-Type": "application/json",
          "X-Annotator": this.annotator,
        },
        body: JSON.stringify(payload),
      }),
    );
  }

  async splitSentence(sentenceId: string, charOffset: number): Promise<SplitResult> {
    return asJson(
      await fetch(this.url(`/api/sentences/${encodeURIComponent(sentenceId)}/split`), {
        method: "POST",
        headers: {
          "Content-Type": "application/json",
          "X-Annotator": this.annotator,
        },
        body: JSON.stringify({ char_offset: charOffset }),
      }),
    );
  }
}
