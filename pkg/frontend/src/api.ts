// Service client plus the two client-side flow controls: a per-panel
// sequence guard that discards stale responses, and a trailing-edge
// debouncer that caps request rates (250 ms => at most 4 requests/s).

export interface ApiResponse<T = unknown> {
  ok: boolean;
  result: T | null;
  diagnostic: { failed_terms: string[]; context_terms: string[]; variables: string[] } | null;
  error?: string;
  elapsed_ms: number;
}

export type Fetcher = (path: string, body: unknown) => Promise<ApiResponse>;

export function httpFetcher(baseUrl = ""): Fetcher {
  return async (path, body) => {
    const response = await fetch(baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await response.json()) as ApiResponse;
  };
}

/** Tags each request with a sequence number; only the newest wins. */
export class SequenceGuard {
  private counter = 0;
  private latestDelivered = 0;

  next(): number {
    return ++this.counter;
  }

  /** True if this response should be applied (not superseded). */
  accept(seq: number): boolean {
    if (seq < this.latestDelivered) return false;
    this.latestDelivered = seq;
    return true;
  }
}

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs = 250,
  timers: { setTimeout: typeof setTimeout; clearTimeout: typeof clearTimeout } = globalThis,
): Debounced<A> {
  let handle: ReturnType<typeof setTimeout> | undefined;
  const wrapped = (...args: A) => {
    if (handle !== undefined) timers.clearTimeout(handle);
    handle = timers.setTimeout(() => {
      handle = undefined;
      fn(...args);
    }, waitMs);
  };
  wrapped.cancel = () => {
    if (handle !== undefined) timers.clearTimeout(handle);
    handle = undefined;
  };
  return wrapped;
}
