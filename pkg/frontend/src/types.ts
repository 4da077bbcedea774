/**
 * Wire types for the crowdmark annotation service.
 *
 * These mirror the JSON payloads served over HTTP exactly; field names are
 * the service's snake_case names so responses can be used without mapping.
 * Coordinates are normalized fractions of the video content area in [0, 1],
 * times are seconds, and confidences travel as percentages in [0, 100].
 */

export type LabelKind = 'predefined' | 'custom';

export interface WireLabel {
  kind: LabelKind;
  value: string;
}

/** One translucent consensus rectangle, as served by GET .../overlays?t=. */
export interface OverlayItem {
  region_id: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  t_start: number;
  t_end: number;
  color: string;
  color_hex: string;
  opacity: number;
  labels_hidden: boolean;
}

export interface OverlayResponse {
  video_id: string;
  t: number;
  seq: number;
  overlays: OverlayItem[];
}

/** One ranked label row inside a hover payload. */
export interface HoverEntry {
  label: WireLabel;
  score: number;
  confidence_pct: number;
  support_count: number;
}

export interface HoverPayload {
  video_id: string;
  seq: number;
  region_id: number;
  labels: HoverEntry[];
}

/** A clustered rationale theme: representative text plus member count. */
export interface RationaleTheme {
  text: string;
  member_count: number;
}

export interface DetailPayload {
  video_id: string;
  seq: number;
  region_id: number;
  label: WireLabel;
  score: number;
  confidence_pct: number;
  support_count: number;
  rationales: RationaleTheme[];
}

export interface VideoEntry {
  video_id: string;
  duration: number;
}

/** Body for POST /videos/{id}/annotations. The service assigns the
 *  annotation id and submission timestamp when they are omitted. */
export interface SubmitBody {
  user_id: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  t_start: number;
  t_end: number;
  label_kind: LabelKind;
  label_value: string;
  confidence: number;
  reason: string | null;
}

export interface SubmitResponse {
  annotation: Record<string, unknown>;
  seq: number;
}

/** The thirteen predefined artifact labels the service accepts verbatim. */
export const PREDEFINED_LABELS: readonly string[] = [
  'blurry',
  'unnatural skin',
  'distorted',
  'strange texture',
  'strange shape',
  'strange skin folds',
  'irregular shape',
  'non-existent/unneeded object',
  'artificial',
  'mismatch',
  'melting',
  'molten metal',
  'artificial material',
] as const;
