/**
 * Overlay and timeline painting.
 *
 * Painting goes through a minimal structural slice of the 2D canvas API so
 * the logic can run against a recording stub where no real canvas backend
 * exists. Consensus rectangles are translucent fills in the consensus
 * color; labels are never painted — they appear only in the hover popup.
 */

import type { ContentBox } from './geometry.js';
import { toPixels } from './geometry.js';
import type { AnnotationDraft } from './draft.js';
import type { OverlayItem } from './types.js';

/** The subset of CanvasRenderingContext2D the painters need. */
export interface PaintContext {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
}

const DRAFT_STYLE = {
  strokeHex: '#FFFFFF', // pending rect outline
  fillHex: '#FFFFFF',
  fillAlpha: 0.15,
  lineWidth: 2, // px
} as const;

/**
 * Paint one frame's consensus rectangles.
 *
 * The canvas is cleared first, so an empty overlay list leaves a clean
 * frame. Regions are painted in ascending region_id order: later fills land
 * on top, making the highest region_id the visually topmost where regions
 * overlap — the same ordering hit-testing assumes.
 */
export function paintOverlays(
  ctx: PaintContext,
  canvasWidth: number,
  canvasHeight: number,
  box: ContentBox,
  items: readonly OverlayItem[],
): void {
  ctx.clearRect(0, 0, canvasWidth, canvasHeight);
  const ordered = [...items].sort((a, b) => a.region_id - b.region_id);
  for (const item of ordered) {
    const a = toPixels(box, item.x1, item.y1);
    const b = toPixels(box, item.x2, item.y2);
    ctx.globalAlpha = item.opacity;
    ctx.fillStyle = item.color_hex;
    ctx.fillRect(a.x, a.y, b.x - a.x, b.y - a.y);
  }
  ctx.globalAlpha = 1;
}

/** Paint the in-progress draft rectangle over the consensus layer. */
export function paintDraft(ctx: PaintContext, box: ContentBox, draft: AnnotationDraft): void {
  const a = toPixels(box, draft.rect.x1, draft.rect.y1);
  const b = toPixels(box, draft.rect.x2, draft.rect.y2);
  ctx.globalAlpha = DRAFT_STYLE.fillAlpha;
  ctx.fillStyle = DRAFT_STYLE.fillHex;
  ctx.fillRect(a.x, a.y, b.x - a.x, b.y - a.y);
  ctx.globalAlpha = 1;
  ctx.lineWidth = DRAFT_STYLE.lineWidth;
  ctx.strokeStyle = DRAFT_STYLE.strokeHex;
  ctx.strokeRect(a.x, a.y, b.x - a.x, b.y - a.y);
}

/** One colored span on the seek bar, in CSS pixels. */
export interface TimelineBlock {
  leftPx: number;
  widthPx: number;
  colorHex: string;
  regionId: number;
}

/** Project aggregated regions onto a timeline of the given pixel width. */
export function timelineBlocks(
  items: readonly OverlayItem[],
  duration: number,
  widthPx: number,
): TimelineBlock[] {
  if (duration <= 0 || widthPx <= 0) {
    return [];
  }
  return [...items]
    .sort((a, b) => a.region_id - b.region_id)
    .map((item) => ({
      leftPx: (item.t_start / duration) * widthPx,
      widthPx: ((item.t_end - item.t_start) / duration) * widthPx,
      colorHex: item.color_hex,
      regionId: item.region_id,
    }));
}

/** The draft's own timeline span plus its two draggable marker positions. */
export interface DraftBlock {
  leftPx: number;
  widthPx: number;
  startMarkerPx: number;
  endMarkerPx: number;
}

export function draftBlock(draft: AnnotationDraft, duration: number, widthPx: number): DraftBlock {
  const leftPx = (draft.tStart / duration) * widthPx;
  const rightPx = (draft.tEnd / duration) * widthPx;
  return {
    leftPx,
    widthPx: rightPx - leftPx,
    startMarkerPx: leftPx,
    endMarkerPx: rightPx,
  };
}

/** Invert a timeline pixel offset back to a video time, clamped to range. */
export function timeAtPx(px: number, duration: number, widthPx: number): number {
  if (widthPx <= 0) {
    return 0;
  }
  return Math.min(duration, Math.max(0, (px / widthPx) * duration));
}
