/**
 * Hover popup and detail view models.
 *
 * These are pure view models: the DOM layer renders whatever they produce.
 * The popup shows at most five label rows in strictly descending aggregate
 * confidence; the detail view shows one label's clustered rationale themes.
 * Neither ever exposes who annotated — payloads are checked for identifier
 * fields before anything is rendered, as a hard guard against the service
 * growing a leak.
 */

import type { DetailPayload, HoverPayload, LabelKind } from './types.js';

export const MAX_POPUP_ROWS = 5;

/** Key fragments that would indicate per-user data in a read payload. */
const IDENTITY_KEY_PATTERN = /user|author|annotator|account|email|identity/i;

/**
 * Recursively scan a payload for keys that look like user identifiers and
 * throw if any appear. Read-side payloads must stay aggregate-only; this is
 * called on every hover and detail response before rendering.
 */
export function assertNoUserIdentifiers(value: unknown, path = '$'): void {
  if (Array.isArray(value)) {
    value.forEach((item, i) => assertNoUserIdentifiers(item, `${path}[${i}]`));
    return;
  }
  if (value !== null && typeof value === 'object') {
    for (const [key, child] of Object.entries(value as Record<string, unknown>)) {
      if (IDENTITY_KEY_PATTERN.test(key)) {
        throw new Error(`user identifier field ${path}.${key} in read payload`);
      }
      assertNoUserIdentifiers(child, `${path}.${key}`);
    }
  }
}

export interface PopupRow {
  labelValue: string;
  labelKind: LabelKind;
  confidencePct: number;
  scorePct: number;
  supportCount: number;
}

/**
 * Build the popup's rows: strictly descending confidence, at most five.
 *
 * The service ranks by aggregate score, which is not the same ordering, so
 * rows are re-sorted here by confidence (ties broken by score, then label
 * value, for a stable render).
 */
export function popupRows(payload: HoverPayload): PopupRow[] {
  assertNoUserIdentifiers(payload);
  const rows = payload.labels.map((entry) => ({
    labelValue: entry.label.value,
    labelKind: entry.label.kind,
    confidencePct: entry.confidence_pct,
    scorePct: entry.score * 100,
    supportCount: entry.support_count,
  }));
  rows.sort((a, b) => {
    if (b.confidencePct !== a.confidencePct) {
      return b.confidencePct - a.confidencePct;
    }
    if (b.scorePct !== a.scorePct) {
      return b.scorePct - a.scorePct;
    }
    return a.labelValue.localeCompare(b.labelValue);
  });
  return rows.slice(0, MAX_POPUP_ROWS);
}

export interface DetailView {
  regionId: number;
  labelValue: string;
  labelKind: LabelKind;
  confidencePct: number;
  scorePct: number;
  supportCount: number;
  themes: { text: string; memberCount: number }[];
}

/** Build the expanded single-label view: aggregate numbers plus clustered
 *  rationale themes. Raw individual opinions never appear here. */
export function detailView(payload: DetailPayload): DetailView {
  assertNoUserIdentifiers(payload);
  return {
    regionId: payload.region_id,
    labelValue: payload.label.value,
    labelKind: payload.label.kind,
    confidencePct: payload.confidence_pct,
    scorePct: payload.score * 100,
    supportCount: payload.support_count,
    themes: payload.rationales.map((r) => ({ text: r.text, memberCount: r.member_count })),
  };
}

/**
 * Hover lifecycle holder. Entering a region installs its rows; leaving
 * clears every trace, so a dismissed popup retains no state.
 */
export class PopupState {
  private current: { regionId: number; rows: PopupRow[] } | null = null;

  enter(regionId: number, payload: HoverPayload): PopupRow[] {
    const rows = popupRows(payload);
    this.current = { regionId, rows };
    return rows;
  }

  leave(): void {
    this.current = null;
  }

  get regionId(): number | null {
    return this.current?.regionId ?? null;
  }

  get rows(): readonly PopupRow[] {
    return this.current?.rows ?? [];
  }

  get visible(): boolean {
    return this.current !== null;
  }
}
