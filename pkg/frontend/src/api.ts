import type {
  ComparisonView,
  CouponEvent,
  FilterRanges,
  OverlayResult,
  SessionInfo,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let code = "http_error";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body?.error) {
        code = body.error.code;
        message = body.error.message;
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl = "") {}

  createSession(features?: string[]): Promise<SessionInfo> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(features ? { features } : {}),
    });
  }

  submitFrame(sessionId: string, frame: unknown): Promise<OverlayResult> {
    return request(`${this.baseUrl}/sessions/${sessionId}/frames`, {
      method: "POST",
      body: JSON.stringify(frame),
    });
  }

  setFilter(
    sessionId: string,
    ranges: FilterRanges,
    brands?: string[]
  ): Promise<OverlayResult> {
    return request(`${this.baseUrl}/sessions/${sessionId}/filter`, {
      method: "PUT",
      body: JSON.stringify({ ranges, brands: brands ?? null }),
    });
  }

  selectFeatures(sessionId: string, features: string[]): Promise<OverlayResult> {
    return request(`${this.baseUrl}/sessions/${sessionId}/features`, {
      method: "PUT",
      body: JSON.stringify({ features }),
    });
  }

  toggleGlyphs(sessionId: string, enabled: boolean): Promise<OverlayResult> {
    return request(`${this.baseUrl}/sessions/${sessionId}/glyphs`, {
      method: "PUT",
      body: JSON.stringify({ enabled }),
    });
  }

  toggleFavorite(sessionId: string, productId: string): Promise<{ favorites: string[] }> {
    return request(`${this.baseUrl}/sessions/${sessionId}/favorites/${productId}`, {
      method: "POST",
    });
  }

  getOverlay(sessionId: string): Promise<OverlayResult> {
    return request(`${this.baseUrl}/sessions/${sessionId}/overlay`);
  }

  getComparison(sessionId: string): Promise<ComparisonView> {
    return request(`${this.baseUrl}/sessions/${sessionId}/comparison`);
  }

  listFixtureFrames(): Promise<{ frames: string[] }> {
    return request(`${this.baseUrl}/fixtures-index`);
  }
}

/** Incremental newline-delimited chunk splitter (no trailing-line loss). */
export function createLineSplitter(onLine: (line: string) => void) {
  let buffer = "";
  return {
    push(chunk: string) {
      buffer += chunk;
      const lines = buffer.split("\n");
      buffer = lines.pop() ?? "";
      for (const line of lines) {
        if (line.trim()) onLine(line);
      }
    },
    flush() {
      if (buffer.trim()) onLine(buffer);
      buffer = "";
    },
  };
}

export interface CouponStreamOptions {
  /** Called once per distinct coupon_id (at-least-once deliveries deduped). */
  onEvent: (event: CouponEvent) => void;
  onStatus?: (status: "connected" | "retrying") => void;
  initialBackoffMs?: number;
  maxBackoffMs?: number;
}

/**
 * Subscribe to the coupon NDJSON stream with silent reconnect + backoff.
 * Returns a stop function.
 */
export function streamCoupons(
  baseUrl: string,
  sessionId: string,
  options: CouponStreamOptions
): () => void {
  const seen = new Set<string>();
  let lastSeq = 0;
  let stopped = false;
  let controller: AbortController | null = null;
  let backoff = options.initialBackoffMs ?? 500;
  const maxBackoff = options.maxBackoffMs ?? 8000;

  const handleLine = (line: string) => {
    let event: CouponEvent;
    try {
      event = JSON.parse(line) as CouponEvent;
    } catch {
      return; // tolerate partial/garbled lines; the stream will resync
    }
    lastSeq = Math.max(lastSeq, event.seq);
    if (seen.has(event.coupon.coupon_id)) return;
    seen.add(event.coupon.coupon_id);
    options.onEvent(event);
  };

  const connect = async () => {
    while (!stopped) {
      controller = new AbortController();
      try {
        const response = await fetch(
          `${baseUrl}/sessions/${sessionId}/coupons?since=${lastSeq}`,
          { signal: controller.signal }
        );
        if (!response.ok || !response.body) throw new Error(`status ${response.status}`);
        options.onStatus?.("connected");
        backoff = options.initialBackoffMs ?? 500;
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        const splitter = createLineSplitter(handleLine);
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          splitter.push(decoder.decode(value, { stream: true }));
        }
        splitter.flush();
      } catch {
        if (stopped) return;
      }
      if (stopped) return;
      options.onStatus?.("retrying");
      await new Promise((resolve) => setTimeout(resolve, backoff));
      backoff = Math.min(backoff * 2, maxBackoff);
    }
  };

  void connect();
  return () => {
    stopped = true;
    controller?.abort();
  };
}
