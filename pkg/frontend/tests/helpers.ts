/**
 * Shared test fakes: geometry stubs for jsdom (which lays nothing out),
 * a recording paint context, a scriptable player, and an in-memory service
 * implementing the same wire shapes as the real one.
 */

import type { PaintContext } from '../src/overlays.js';
import type { PlayerPort, ServicePort } from '../src/app.js';
import type {
  DetailPayload,
  HoverPayload,
  OverlayItem,
  OverlayResponse,
  SubmitBody,
  SubmitResponse,
} from '../src/types.js';

/** Pin an element's layout box; jsdom reports all zeros otherwise. */
export function fakeRect(
  el: Element,
  rect: { left: number; top: number; width: number; height: number },
): void {
  el.getBoundingClientRect = () =>
    ({
      left: rect.left,
      top: rect.top,
      width: rect.width,
      height: rect.height,
      right: rect.left + rect.width,
      bottom: rect.top + rect.height,
      x: rect.left,
      y: rect.top,
      toJSON: () => ({}),
    }) as DOMRect;
}

export interface PaintOp {
  op: 'clear' | 'fill' | 'stroke';
  x: number;
  y: number;
  w: number;
  h: number;
  style: string;
  alpha: number;
}

export interface RecordingPaint extends PaintContext {
  ops: PaintOp[];
}

/** A PaintContext that records every rect operation with its style state. */
export function recordingPaint(): RecordingPaint {
  const ops: PaintOp[] = [];
  const ctx = {
    ops,
    fillStyle: '' as string,
    strokeStyle: '' as string,
    globalAlpha: 1,
    lineWidth: 1,
    clearRect(x: number, y: number, w: number, h: number) {
      ops.push({ op: 'clear', x, y, w, h, style: '', alpha: ctx.globalAlpha });
    },
    fillRect(x: number, y: number, w: number, h: number) {
      ops.push({ op: 'fill', x, y, w, h, style: String(ctx.fillStyle), alpha: ctx.globalAlpha });
    },
    strokeRect(x: number, y: number, w: number, h: number) {
      ops.push({ op: 'stroke', x, y, w, h, style: String(ctx.strokeStyle), alpha: ctx.globalAlpha });
    },
  };
  return ctx as RecordingPaint;
}

export interface FakePlayer extends PlayerPort {
  time: number;
  paused: boolean;
  width: number;
  height: number;
  pauseCalls: number;
}

export function fakePlayer(
  init: { time?: number; paused?: boolean; width?: number; height?: number } = {},
): FakePlayer {
  const player: FakePlayer = {
    time: init.time ?? 0,
    paused: init.paused ?? false,
    width: init.width ?? 0,
    height: init.height ?? 0,
    pauseCalls: 0,
    currentTime: () => player.time,
    isPaused: () => player.paused,
    pause: () => {
      player.paused = true;
      player.pauseCalls += 1;
    },
    videoSize: () => ({ width: player.width, height: player.height }),
  };
  return player;
}

/** Dispatch a pointer event carrying viewport coordinates. jsdom has no
 *  PointerEvent constructor, but listeners key on the type string alone. */
export function pointer(el: Element, type: string, clientX: number, clientY: number): void {
  el.dispatchEvent(new MouseEvent(type, { clientX, clientY, bubbles: true }));
}

/** A wall clock the test advances by hand. */
export function manualClock(startMs = 0): { now: () => number; advance: (ms: number) => void } {
  let t = startMs;
  return {
    now: () => t,
    advance: (ms: number) => {
      t += ms;
    },
  };
}

export function overlayItem(overrides: Partial<OverlayItem> = {}): OverlayItem {
  return {
    region_id: 0,
    x1: 0.2,
    y1: 0.2,
    x2: 0.6,
    y2: 0.6,
    t_start: 0,
    t_end: 30,
    color: 'green',
    color_hex: '#00FF00',
    opacity: 0.4,
    labels_hidden: true,
    ...overrides,
  };
}

export interface FakeService extends ServicePort {
  submitted: SubmitBody[];
  hoverPayload: HoverPayload | null;
  detailPayload: DetailPayload | null;
  /** Extra overlays served alongside regions built from submissions. */
  seeded: OverlayItem[];
}

/**
 * In-memory stand-in for the annotation service. Each submitted annotation
 * becomes one overlay region (ids assigned in submission order), so apps
 * under test observe the same submit-then-see-it-back loop the real service
 * provides.
 */
export function fakeService(videoId = 'v-1'): FakeService {
  const service: FakeService = {
    submitted: [],
    hoverPayload: null,
    detailPayload: null,
    seeded: [],
    async overlays(vid: string, t: number): Promise<OverlayResponse> {
      const fromSubmissions = service.submitted.map((body, i) =>
        overlayItem({
          region_id: service.seeded.length + i,
          x1: body.x1,
          y1: body.y1,
          x2: body.x2,
          y2: body.y2,
          t_start: body.t_start,
          t_end: body.t_end,
        }),
      );
      const active = [...service.seeded, ...fromSubmissions].filter(
        (item) => item.t_start <= t && t < item.t_end,
      );
      return { video_id: vid, t, seq: service.submitted.length, overlays: active };
    },
    async hover(vid: string, regionId: number): Promise<HoverPayload> {
      if (service.hoverPayload === null) {
        throw new Error(`no hover payload seeded for region ${regionId}`);
      }
      return { ...service.hoverPayload, video_id: vid, region_id: regionId };
    },
    async detail(vid: string, regionId: number): Promise<DetailPayload> {
      if (service.detailPayload === null) {
        throw new Error(`no detail payload seeded for region ${regionId}`);
      }
      return { ...service.detailPayload, video_id: vid, region_id: regionId };
    },
    async submit(vid: string, body: Omit<SubmitBody, 'user_id'>): Promise<SubmitResponse> {
      if (vid !== videoId) {
        throw new Error(`unknown video ${vid}`);
      }
      const full: SubmitBody = { user_id: 'tester', ...body };
      service.submitted.push(full);
      return {
        annotation: { ...full, id: `a-${service.submitted.length}` },
        seq: service.submitted.length,
      };
    },
  };
  return service;
}

/** Resolve pending microtasks so fire-and-forget fetch handlers settle. */
export async function flushAsync(times = 4): Promise<void> {
  for (let i = 0; i < times; i += 1) {
    await Promise.resolve();
  }
}
