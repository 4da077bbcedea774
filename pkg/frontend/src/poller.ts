/**
 * Periodic overlay refresh.
 *
 * While the video plays, the current frame's overlays are re-fetched every
 * 500 ms. Responses can arrive out of order; only the most recently issued
 * request may apply, so a stale response for an older playback position is
 * dropped on the floor (last-write-wins keyed by the playback time each
 * request was issued for).
 */

import type { OverlayResponse } from './types.js';

export const POLL_INTERVAL_MS = 500;

export interface PollerPorts {
  /** Fetch overlays for the given playback time. */
  fetchOverlays(t: number): Promise<OverlayResponse>;
  /** Current playback position in seconds. */
  currentTime(): number;
  /** Whether the video is actively playing. */
  isPlaying(): boolean;
  /** Receive the winning response. Runs on the single rendering thread. */
  apply(response: OverlayResponse): void;
  /** Surface fetch failures without stopping the poll loop. */
  onError?(error: unknown): void;
}

export class OverlayPoller {
  private readonly ports: PollerPorts;
  private timer: number | null = null;
  private latestRequest = 0;

  constructor(ports: PollerPorts) {
    this.ports = ports;
  }

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) {
      return;
    }
    this.timer = setInterval(() => {
      if (this.ports.isPlaying()) {
        this.refreshAt(this.ports.currentTime());
      }
    }, POLL_INTERVAL_MS) as unknown as number;
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /**
   * Issue one fetch for the given playback time. Also used directly on
   * seeks and pauses, where the frame changed without the clock running.
   */
  refreshAt(t: number): Promise<void> {
    const token = ++this.latestRequest;
    return this.ports.fetchOverlays(t).then(
      (response) => {
        if (token === this.latestRequest) {
          this.ports.apply(response);
        }
      },
      (error) => {
        if (token === this.latestRequest) {
          this.ports.onError?.(error);
        }
      },
    );
  }
}
