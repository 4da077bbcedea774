/**
 * End-to-end acceptance checks, driven through the assembled app with
 * scripted pointer events:
 *
 *   1. Coordinate fidelity — a drag across known fractions of the player
 *      produces a draft rect within one pixel, letterboxed players included.
 *   2. The hover popup renders at most five labels in strictly descending
 *      confidence.
 *   3. The detail view contains no user identifiers.
 */

import { afterEach, describe, expect, it, vi } from 'vitest';

import { AnnotatorApp } from '../src/app.js';
import type { DetailPayload, HoverPayload } from '../src/types.js';
import {
  fakePlayer,
  fakeRect,
  fakeService,
  flushAsync,
  manualClock,
  overlayItem,
  pointer,
  recordingPaint,
} from './helpers.js';

interface Scene {
  app: AnnotatorApp;
  root: HTMLElement;
  service: ReturnType<typeof fakeService>;
  player: ReturnType<typeof fakePlayer>;
  clock: ReturnType<typeof manualClock>;
}

function scene(canvas: { width: number; height: number }, video: { width: number; height: number }): Scene {
  const root = document.createElement('div');
  document.body.append(root);
  const service = fakeService('v-1');
  const player = fakePlayer({ time: 10, paused: false, ...video });
  const clock = manualClock(90_000);
  const app = new AnnotatorApp(
    root,
    { client: service, videoId: 'v-1', duration: 60, mediaUrl: '' },
    { player, paint: recordingPaint(), now: clock.now },
  );
  fakeRect(app.canvas, { left: 0, top: 0, ...canvas });
  fakeRect(app.timelineEl, { left: 0, top: 0, width: 600, height: 18 });
  return { app, root, service, player, clock };
}

function drag(s: Scene, from: [number, number], to: [number, number], holdMs: number): void {
  s.app.mode.setAnnotationMode(true);
  pointer(s.app.canvas, 'pointerdown', from[0], from[1]);
  s.clock.advance(holdMs);
  pointer(s.app.canvas, 'pointerup', to[0], to[1]);
}

afterEach(() => {
  document.body.replaceChildren();
});

describe('coordinate fidelity', () => {
  it('a scripted drag across known player fractions lands within one pixel', () => {
    const s = scene({ width: 640, height: 360 }, { width: 1280, height: 720 });
    // Drag from 25% to 75% of the player in both axes.
    drag(s, [0.25 * 640, 0.25 * 360], [0.75 * 640, 0.75 * 360], 2_000);

    const rect = s.app.currentDraft!.rect;
    const onePxX = 1 / 640;
    const onePxY = 1 / 360;
    expect(Math.abs(rect.x1 - 0.25)).toBeLessThanOrEqual(onePxX);
    expect(Math.abs(rect.y1 - 0.25)).toBeLessThanOrEqual(onePxY);
    expect(Math.abs(rect.x2 - 0.75)).toBeLessThanOrEqual(onePxX);
    expect(Math.abs(rect.y2 - 0.75)).toBeLessThanOrEqual(onePxY);
  });

  it('compensates letterboxing: coordinates reference the video content area', () => {
    // 800x600 element showing a 16:9 video: content box is 800x450 at y=75.
    const s = scene({ width: 800, height: 600 }, { width: 1280, height: 720 });
    drag(s, [200, 75 + 0.25 * 450], [600, 75 + 0.75 * 450], 1_000);

    const rect = s.app.currentDraft!.rect;
    expect(Math.abs(rect.x1 - 0.25)).toBeLessThanOrEqual(1 / 800);
    expect(Math.abs(rect.y1 - 0.25)).toBeLessThanOrEqual(1 / 450);
    expect(Math.abs(rect.x2 - 0.75)).toBeLessThanOrEqual(1 / 800);
    expect(Math.abs(rect.y2 - 0.75)).toBeLessThanOrEqual(1 / 450);
  });

  it('maps the hold duration onto the flagged time range', () => {
    const s = scene({ width: 640, height: 360 }, { width: 1280, height: 720 });
    drag(s, [100, 100], [300, 300], 2_000); // held 2s starting at t=10

    const draft = s.app.currentDraft!;
    expect(draft.tStart).toBe(10);
    expect(draft.tEnd).toBeCloseTo(12, 9);
  });

  it('discards degenerate drags with no visible reaction', () => {
    const s = scene({ width: 640, height: 360 }, { width: 1280, height: 720 });
    drag(s, [100, 100], [103, 300], 500); // 3px of x travel

    expect(s.app.currentDraft).toBeNull();
    expect(s.app.panelEl.style.display).toBe('none');
  });
});

describe('hover popup', () => {
  function hoverPayload(): HoverPayload {
    // Out of confidence order on purpose: the service ranks by score.
    return {
      video_id: 'v-1',
      seq: 3,
      region_id: 0,
      labels: [
        { label: { kind: 'predefined', value: 'melting' }, score: 0.92, confidence_pct: 71.5, support_count: 5 },
        { label: { kind: 'predefined', value: 'blurry' }, score: 0.81, confidence_pct: 90.0, support_count: 4 },
        { label: { kind: 'custom', value: 'left eye flickers' }, score: 0.64, confidence_pct: 83.25, support_count: 2 },
        { label: { kind: 'predefined', value: 'artificial' }, score: 0.55, confidence_pct: 77.0, support_count: 3 },
        { label: { kind: 'predefined', value: 'mismatch' }, score: 0.4, confidence_pct: 64.5, support_count: 1 },
        { label: { kind: 'predefined', value: 'distorted' }, score: 0.33, confidence_pct: 58.0, support_count: 1 },
      ],
    };
  }

  it('renders at most five labels in strictly descending confidence', async () => {
    const s = scene({ width: 640, height: 360 }, { width: 1280, height: 720 });
    s.service.seeded.push(overlayItem({ region_id: 0, x1: 0.2, y1: 0.2, x2: 0.6, y2: 0.6 }));
    s.service.hoverPayload = hoverPayload();
    s.app.start();
    await flushAsync();
    s.app.dispose();

    pointer(s.app.canvas, 'pointermove', 0.4 * 640, 0.4 * 360);
    await flushAsync();

    const rows = [...s.app.popupEl.querySelectorAll('.cm-popup-pct')].map((el) =>
      Number(el.textContent!.replace('%', '')),
    );
    expect(rows.length).toBeLessThanOrEqual(5);
    expect(rows.length).toBeGreaterThan(0);
    for (let i = 1; i < rows.length; i += 1) {
      expect(rows[i]).toBeLessThan(rows[i - 1]);
    }
    // The sixth, lowest-confidence label fell off the end.
    expect(s.app.popupEl.textContent).not.toContain('distorted');
  });
});

describe('detail view', () => {
  function detailPayload(): DetailPayload {
    return {
      video_id: 'v-1',
      seq: 3,
      region_id: 0,
      label: { kind: 'predefined', value: 'blurry' },
      score: 0.81,
      confidence_pct: 90,
      support_count: 4,
      rationales: [
        { text: 'edges smear between frames', member_count: 3 },
        { text: 'texture loses detail under motion', member_count: 1 },
      ],
    };
  }

  it('contains no user identifiers', async () => {
    const s = scene({ width: 640, height: 360 }, { width: 1280, height: 720 });
    s.service.seeded.push(overlayItem({ region_id: 0, x1: 0.2, y1: 0.2, x2: 0.6, y2: 0.6 }));
    s.service.hoverPayload = {
      video_id: 'v-1',
      seq: 3,
      region_id: 0,
      labels: [
        { label: { kind: 'predefined', value: 'blurry' }, score: 0.81, confidence_pct: 90, support_count: 4 },
      ],
    };
    s.service.detailPayload = detailPayload();
    s.app.start();
    await flushAsync();
    s.app.dispose();

    pointer(s.app.canvas, 'pointermove', 0.4 * 640, 0.4 * 360);
    await flushAsync();
    (s.app.popupEl.querySelector('.cm-popup-rows li') as HTMLElement).click();
    await flushAsync();

    const detail = s.app.popupEl.querySelector('.cm-detail') as HTMLElement;
    expect(detail).not.toBeNull();
    expect(detail.textContent).toContain('edges smear between frames');

    // Nothing rendered anywhere in the view names a person or account.
    const everything = (s.root.textContent ?? '').toLowerCase();
    for (const marker of ['user', 'author', 'annotator', 'account', '@']) {
      expect(everything).not.toContain(marker);
    }
    const attrs: string[] = [];
    for (const el of s.root.querySelectorAll('*')) {
      for (const attr of el.attributes) {
        attrs.push(`${attr.name}=${attr.value}`);
      }
    }
    expect(attrs.join(' ')).not.toMatch(/user|author|annotator/i);
  });

  it('rejects a payload that smuggles an identifier field', async () => {
    const warn = vi.spyOn(console, 'warn').mockImplementation(() => {});
    const s = scene({ width: 640, height: 360 }, { width: 1280, height: 720 });
    const doctored = {
      ...detailPayload(),
      rationales: [{ text: 'looks off', member_count: 1, username: 'ana' }],
    } as unknown as DetailPayload;
    s.service.detailPayload = doctored;
    s.service.seeded.push(overlayItem({ region_id: 0 }));
    s.service.hoverPayload = {
      video_id: 'v-1',
      seq: 1,
      region_id: 0,
      labels: [
        { label: { kind: 'predefined', value: 'blurry' }, score: 0.5, confidence_pct: 50, support_count: 1 },
      ],
    };
    s.app.start();
    await flushAsync();
    s.app.dispose();

    pointer(s.app.canvas, 'pointermove', 0.4 * 640, 0.4 * 360);
    await flushAsync();
    (s.app.popupEl.querySelector('.cm-popup-rows li') as HTMLElement).click();
    await flushAsync();

    // The guard tripped before anything rendered.
    expect(s.app.popupEl.querySelector('.cm-detail')).toBeNull();
    expect(warn).toHaveBeenCalled();
    warn.mockRestore();
  });
});
