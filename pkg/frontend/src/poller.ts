/**
 * Event stream consumer.
 *
 * The service exposes GET /events?since=<seq> with a monotonic cursor, so
 * "live" here is a short polling loop: fetch everything past the cursor,
 * fold it in order, repeat. A failed poll marks the view stale and the loop
 * keeps trying, which is the auto-reconnect.
 */

import type { ApiSurface } from "./api.js";
import type { ConsoleStore } from "./store.js";

export class EventPoller {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(
    private readonly api: ApiSurface,
    private readonly store: ConsoleStore,
    private readonly intervalMs = 400,
  ) {}

  /** One fetch-and-fold cycle; exposed so tests can drive it synchronously. */
  async pollOnce(): Promise<void> {
    try {
      const batch = await this.api.events(this.store.cursor());
      this.store.ingest(batch);
    } catch {
      this.store.pollFailed();
    }
  }

  start(): void {
    this.stopped = false;
    const loop = async (): Promise<void> => {
      if (this.stopped) {
        return;
      }
      await this.pollOnce();
      if (!this.stopped) {
        this.timer = setTimeout(loop, this.intervalMs);
      }
    };
    void loop();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }
}
