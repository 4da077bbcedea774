/**
 * Coordinate mapping between screen pixels and normalized video coordinates.
 *
 * The video element's rendered box and the video's intrinsic frame rarely
 * share an aspect ratio, so the browser letterboxes (bars above/below) or
 * pillarboxes (bars beside) the frame. Normalized coordinates must reference
 * the video content area — the region actually showing pixels — not the
 * element, or every annotation would drift on differently shaped players.
 */

/** The video content area, in CSS pixels relative to the element's box. */
export interface ContentBox {
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface NormalizedPoint {
  x: number;
  y: number;
}

export interface NormalizedRect {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

/**
 * Compute where the video frame sits inside its element.
 *
 * Mirrors `object-fit: contain`: the frame is scaled to the largest size
 * that fits entirely inside the element, then centered. Degenerate sizes
 * (zero or negative anywhere) collapse to the full element box so callers
 * never divide by zero.
 */
export function contentBox(
  elementWidth: number,
  elementHeight: number,
  videoWidth: number,
  videoHeight: number,
): ContentBox {
  if (elementWidth <= 0 || elementHeight <= 0 || videoWidth <= 0 || videoHeight <= 0) {
    return { left: 0, top: 0, width: Math.max(elementWidth, 0), height: Math.max(elementHeight, 0) };
  }
  const scale = Math.min(elementWidth / videoWidth, elementHeight / videoHeight);
  const width = videoWidth * scale;
  const height = videoHeight * scale;
  return {
    left: (elementWidth - width) / 2,
    top: (elementHeight - height) / 2,
    width,
    height,
  };
}

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

/**
 * Map a point in element-local CSS pixels to normalized content coordinates,
 * clamped to [0, 1] so drags that stray into the letterbox bars pin to the
 * frame edge instead of producing out-of-range values.
 */
export function toNormalized(box: ContentBox, px: number, py: number): NormalizedPoint {
  const w = box.width > 0 ? box.width : 1;
  const h = box.height > 0 ? box.height : 1;
  return {
    x: clamp01((px - box.left) / w),
    y: clamp01((py - box.top) / h),
  };
}

/** Map a normalized content point back to element-local CSS pixels. */
export function toPixels(box: ContentBox, nx: number, ny: number): { x: number; y: number } {
  return {
    x: box.left + nx * box.width,
    y: box.top + ny * box.height,
  };
}

/** Order two corner points into a rectangle with x1<=x2 and y1<=y2. */
export function rectFromPoints(a: NormalizedPoint, b: NormalizedPoint): NormalizedRect {
  return {
    x1: Math.min(a.x, b.x),
    y1: Math.min(a.y, b.y),
    x2: Math.max(a.x, b.x),
    y2: Math.max(a.y, b.y),
  };
}

/** True when a normalized point falls inside (or on the edge of) a rect. */
export function rectContains(rect: NormalizedRect, p: NormalizedPoint): boolean {
  return p.x >= rect.x1 && p.x <= rect.x2 && p.y >= rect.y1 && p.y <= rect.y2;
}
