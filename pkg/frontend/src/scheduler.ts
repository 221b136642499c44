/**
 * Trailing-edge render scheduler: coalesces bursts of window changes into at
 * most one request per minimum interval per pane, with latest-state-wins.
 * A change arriving while a request is in flight is queued (replacing any
 * earlier queued state) and sent once the flight completes, so a slider drag
 * ends with exactly one trailing request carrying the final values.
 */
export class RenderScheduler<T> {
  private pending: T | null = null;
  private inFlight = false;
  private lastSentAt = Number.NEGATIVE_INFINITY;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private send: (params: T) => Promise<unknown>,
    private minIntervalMs = 33, // ~30 requests per second ceiling
    private onError: (error: unknown) => void = () => undefined,
    private now: () => number = () => Date.now(),
  ) {}

  request(params: T): void {
    this.pending = params;
    this.pump();
  }

  /** True when nothing is queued or flying (integration tests poll this). */
  idle(): boolean {
    return !this.inFlight && this.pending === null && this.timer === null;
  }

  private pump(): void {
    if (this.inFlight || this.pending === null) return;
    const wait = this.lastSentAt + this.minIntervalMs - this.now();
    if (wait > 0) {
      if (this.timer === null) {
        this.timer = setTimeout(() => {
          this.timer = null;
          this.pump();
        }, wait);
      }
      return;
    }
    const params = this.pending;
    this.pending = null;
    this.inFlight = true;
    this.lastSentAt = this.now();
    this.send(params)
      .catch((error) => this.onError(error))
      .then(() => {
        this.inFlight = false;
        this.pump();
      });
  }
}
