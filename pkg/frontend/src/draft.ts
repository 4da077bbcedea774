/**
 * Draw-and-hold annotation drafting.
 *
 * A draft is born from a single gesture on the playing video: pointer down
 * pins one corner and the start time, pointer up pins the opposite corner,
 * and the wall-clock hold duration becomes the length of the flagged time
 * range. The draft then stays editable — label, confidence, reason, and the
 * time range via timeline markers — until submission freezes it.
 */

import type { ContentBox, NormalizedRect } from './geometry.js';
import { rectFromPoints, toNormalized } from './geometry.js';
import type { LabelKind } from './types.js';

/** Drags shorter than this on either screen axis are accidental clicks. */
export const MIN_DRAG_PX = 4;

/** Shortest time range a draft may carry, in seconds. An instant release
 *  still flags a moment, not a zero-length interval the service rejects. */
export const MIN_SPAN_S = 0.1;

export type DraftState = 'editing' | 'submitted';

export interface AnnotationDraft {
  rect: NormalizedRect;
  tStart: number;
  tEnd: number;
  labelKind: LabelKind;
  labelValue: string;
  /** Continuous 0..100; never binned. */
  confidencePct: number;
  reason: string;
  state: DraftState;
}

interface GestureStart {
  px: number;
  py: number;
  videoTime: number;
  wallMs: number;
}

/**
 * Tracks one in-flight drag gesture and produces a draft on release.
 * Degenerate drags (under MIN_DRAG_PX on either axis) yield null and leave
 * no trace, so stray clicks never open the draft panel.
 */
export class DraftGesture {
  private start: GestureStart | null = null;

  get active(): boolean {
    return this.start !== null;
  }

  begin(px: number, py: number, videoTime: number, wallMs: number): void {
    this.start = { px, py, videoTime, wallMs };
  }

  cancel(): void {
    this.start = null;
  }

  /**
   * Complete the gesture. Returns the draft, or null for degenerate drags.
   * The spatial rect is normalized against the current content box; the
   * time range runs from the video time at pointer-down for as long as the
   * pointer was held, clamped to the video's duration.
   */
  end(px: number, py: number, wallMs: number, box: ContentBox, duration: number): AnnotationDraft | null {
    const start = this.start;
    this.start = null;
    if (start === null) {
      return null;
    }
    if (Math.abs(px - start.px) < MIN_DRAG_PX || Math.abs(py - start.py) < MIN_DRAG_PX) {
      return null;
    }
    const rect = rectFromPoints(
      toNormalized(box, start.px, start.py),
      toNormalized(box, px, py),
    );
    const holdSeconds = Math.max((wallMs - start.wallMs) / 1000, MIN_SPAN_S);
    const tStart = Math.max(0, Math.min(start.videoTime, duration - MIN_SPAN_S));
    const tEnd = Math.min(duration, tStart + holdSeconds);
    return {
      rect,
      tStart,
      tEnd: Math.max(tEnd, tStart + MIN_SPAN_S),
      labelKind: 'predefined',
      labelValue: '',
      confidencePct: 50,
      reason: '',
      state: 'editing',
    };
  }
}

/**
 * Move the draft's start marker to a new time. Clamped to keep the range
 * inside [0, duration] and at least MIN_SPAN_S long; ignored once the draft
 * has been submitted — submission freezes both bounds.
 */
export function moveStartMarker(draft: AnnotationDraft, t: number): void {
  if (draft.state !== 'editing') {
    return;
  }
  draft.tStart = Math.min(Math.max(0, t), draft.tEnd - MIN_SPAN_S);
}

/** Counterpart of moveStartMarker for the end marker. */
export function moveEndMarker(draft: AnnotationDraft, t: number, duration: number): void {
  if (draft.state !== 'editing') {
    return;
  }
  draft.tEnd = Math.max(Math.min(t, duration), draft.tStart + MIN_SPAN_S);
}

/** Freeze the draft's spatial and temporal bounds after submission. */
export function markSubmitted(draft: AnnotationDraft): void {
  draft.state = 'submitted';
}
