/**
 * Public entry point. `mount` builds the full annotator UI inside a host
 * element, resolving the video's duration from the service when the caller
 * does not supply it.
 */

import { ServiceClient } from './api.js';
import { AnnotatorApp } from './app.js';
import type { AppHooks } from './app.js';

export interface UiConfig {
  /** Base address of the annotation service. */
  serviceUrl: string;
  /** Identity sent with writes; never shown in the UI. */
  userId: string;
  /** Which registered video to open. */
  videoId: string;
  /** Video manifest: video id to media source URL. */
  mediaSources: Record<string, string>;
  /** Video length in seconds; looked up from the service when omitted. */
  duration?: number;
}

export async function mount(
  root: HTMLElement,
  config: UiConfig,
  hooks: AppHooks = {},
): Promise<AnnotatorApp> {
  const client = new ServiceClient({ baseUrl: config.serviceUrl, userId: config.userId });
  let duration = config.duration;
  if (duration === undefined) {
    const entry = (await client.videos()).find((v) => v.video_id === config.videoId);
    if (entry === undefined) {
      throw new Error(`video ${config.videoId} is not registered with the service`);
    }
    duration = entry.duration;
  }
  const app = new AnnotatorApp(
    root,
    {
      client,
      videoId: config.videoId,
      duration,
      mediaUrl: config.mediaSources[config.videoId] ?? '',
    },
    hooks,
  );
  app.start();
  return app;
}

export { ServiceClient, ServiceError } from './api.js';
export type { ClientOptions } from './api.js';
export { AnnotatorApp } from './app.js';
export type { AppConfig, AppHooks, PlayerPort, ServicePort } from './app.js';
export {
  DraftGesture,
  markSubmitted,
  moveEndMarker,
  moveStartMarker,
  MIN_DRAG_PX,
  MIN_SPAN_S,
} from './draft.js';
export type { AnnotationDraft, DraftState } from './draft.js';
export { contentBox, rectContains, rectFromPoints, toNormalized, toPixels } from './geometry.js';
export type { ContentBox, NormalizedPoint, NormalizedRect } from './geometry.js';
export { UiMode } from './mode.js';
export { OverlayPoller, POLL_INTERVAL_MS } from './poller.js';
export type { PollerPorts } from './poller.js';
export {
  draftBlock,
  paintDraft,
  paintOverlays,
  timeAtPx,
  timelineBlocks,
} from './overlays.js';
export type { DraftBlock, PaintContext, TimelineBlock } from './overlays.js';
export {
  assertNoUserIdentifiers,
  detailView,
  popupRows,
  MAX_POPUP_ROWS,
  PopupState,
} from './popup.js';
export type { DetailView, PopupRow } from './popup.js';
export { PREDEFINED_LABELS } from './types.js';
export type {
  DetailPayload,
  HoverEntry,
  HoverPayload,
  LabelKind,
  OverlayItem,
  OverlayResponse,
  RationaleTheme,
  SubmitBody,
  SubmitResponse,
  VideoEntry,
  WireLabel,
} from './types.js';
