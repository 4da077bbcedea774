/**
 * Annotator application: wires the video player, overlay canvas, timeline,
 * draft panel, and hover popup to the annotation service.
 *
 * All rendering happens on the single UI thread; network responses are
 * applied via the poller's last-write-wins gate so a slow fetch can never
 * clobber a newer frame's overlays. The canvas is addressed through the
 * PaintContext slice, and the player through PlayerPort, so both can be
 * replaced by recording fakes where no media backend exists.
 */

import { ServiceError } from './api.js';
import { contentBox, rectContains, toNormalized } from './geometry.js';
import type { ContentBox } from './geometry.js';
import {
  DraftGesture,
  markSubmitted,
  moveEndMarker,
  moveStartMarker,
} from './draft.js';
import type { AnnotationDraft } from './draft.js';
import { UiMode } from './mode.js';
import { OverlayPoller } from './poller.js';
import {
  draftBlock,
  paintDraft,
  paintOverlays,
  timelineBlocks,
} from './overlays.js';
import type { PaintContext } from './overlays.js';
import { PopupState, assertNoUserIdentifiers, detailView } from './popup.js';
import { PREDEFINED_LABELS } from './types.js';
import type {
  DetailPayload,
  HoverPayload,
  OverlayItem,
  OverlayResponse,
  SubmitBody,
  SubmitResponse,
} from './types.js';

/** Playback surface the app drives. The default adapter wraps a <video>. */
export interface PlayerPort {
  currentTime(): number;
  isPaused(): boolean;
  pause(): void;
  /** Intrinsic frame size; zeros mean "unknown, assume the element box". */
  videoSize(): { width: number; height: number };
}

/** The slice of the service client the app consumes. ServiceClient
 *  satisfies this; tests substitute in-memory fakes. */
export interface ServicePort {
  overlays(videoId: string, t: number): Promise<OverlayResponse>;
  hover(videoId: string, regionId: number): Promise<HoverPayload>;
  detail(videoId: string, regionId: number, labelValue: string): Promise<DetailPayload>;
  submit(videoId: string, body: Omit<SubmitBody, 'user_id'>): Promise<SubmitResponse>;
}

const LAYOUT = {
  timelineHeight: 18, // px
  markerWidth: 8, // px, draggable start/end handles
  popupMaxWidth: 280, // px
  customLabelChoice: '__custom__',
} as const;

const WARN_TAG = '[crowdmark-ui]';

export interface AppConfig {
  client: ServicePort;
  videoId: string;
  /** Video length in seconds, from the service's video registry. */
  duration: number;
  /** Media source for the <video> element; empty string leaves it unset. */
  mediaUrl: string;
}

export interface AppHooks {
  player?: PlayerPort;
  /** Painting target; null disables painting, undefined uses the canvas. */
  paint?: PaintContext | null;
  /** Wall clock in milliseconds; hold durations are measured on it. */
  now?: () => number;
}

function videoAdapter(video: HTMLVideoElement): PlayerPort {
  return {
    currentTime: () => video.currentTime,
    isPaused: () => video.paused,
    pause: () => {
      try {
        video.pause();
      } catch {
        // Media playback is not implemented in every embedding environment.
      }
    },
    videoSize: () => ({ width: video.videoWidth, height: video.videoHeight }),
  };
}

type MarkerDrag = 'start' | 'end' | null;

export class AnnotatorApp {
  readonly mode = new UiMode();
  readonly popup = new PopupState();

  readonly video: HTMLVideoElement;
  readonly canvas: HTMLCanvasElement;
  readonly timelineEl: HTMLElement;
  readonly panelEl: HTMLElement;
  readonly popupEl: HTMLElement;
  readonly modeButton: HTMLButtonElement;

  private readonly config: AppConfig;
  private readonly player: PlayerPort;
  private readonly paint: PaintContext | null;
  private readonly now: () => number;
  private readonly gesture = new DraftGesture();
  private readonly poller: OverlayPoller;

  private draftCurrent: AnnotationDraft | null = null;
  private overlaysCurrent: readonly OverlayItem[] = [];
  private hoveredRegion: number | null = null;
  private markerDrag: MarkerDrag = null;

  private labelSelect!: HTMLSelectElement;
  private customLabelInput!: HTMLInputElement;
  private confidenceSlider!: HTMLInputElement;
  private confidenceReadout!: HTMLElement;
  private reasonInput!: HTMLTextAreaElement;
  private panelError!: HTMLElement;

  constructor(root: HTMLElement, config: AppConfig, hooks: AppHooks = {}) {
    this.config = config;
    this.now = hooks.now ?? (() => Date.now());

    const playerWrap = document.createElement('div');
    playerWrap.className = 'cm-player';
    playerWrap.style.position = 'relative';

    this.video = document.createElement('video');
    this.video.className = 'cm-video';
    if (config.mediaUrl) {
      this.video.src = config.mediaUrl;
    }
    this.video.style.display = 'block';
    this.video.style.width = '100%';

    this.canvas = document.createElement('canvas');
    this.canvas.className = 'cm-overlay';
    this.canvas.style.position = 'absolute';
    this.canvas.style.left = '0';
    this.canvas.style.top = '0';
    this.canvas.style.width = '100%';
    this.canvas.style.height = '100%';

    playerWrap.append(this.video, this.canvas);

    this.modeButton = document.createElement('button');
    this.modeButton.className = 'cm-mode';
    this.modeButton.type = 'button';

    this.timelineEl = document.createElement('div');
    this.timelineEl.className = 'cm-timeline';
    this.timelineEl.style.position = 'relative';
    this.timelineEl.style.height = `${LAYOUT.timelineHeight}px`;
    this.timelineEl.style.background = '#222';

    this.panelEl = document.createElement('form');
    this.panelEl.className = 'cm-panel';
    this.panelEl.style.display = 'none';

    this.popupEl = document.createElement('div');
    this.popupEl.className = 'cm-popup';
    this.popupEl.style.position = 'absolute';
    this.popupEl.style.maxWidth = `${LAYOUT.popupMaxWidth}px`;
    this.popupEl.style.display = 'none';

    root.append(playerWrap, this.modeButton, this.timelineEl, this.panelEl, this.popupEl);

    this.player = hooks.player ?? videoAdapter(this.video);
    this.paint = hooks.paint !== undefined ? hooks.paint : this.acquireContext();
    this.poller = new OverlayPoller({
      fetchOverlays: (t) => config.client.overlays(config.videoId, t),
      currentTime: () => this.player.currentTime(),
      isPlaying: () => !this.player.isPaused(),
      apply: (response) => this.applyOverlays(response),
      onError: (error) => console.warn(`${WARN_TAG} overlay refresh failed`, error),
    });

    this.buildPanel();
    this.renderModeButton();
    this.bindPointerHandlers();
    this.bindTimelineHandlers();
    this.watchResize();
  }

  /** Begin polling and fetch the first frame's overlays. */
  start(): void {
    this.poller.start();
    void this.poller.refreshAt(this.player.currentTime());
  }

  dispose(): void {
    this.poller.stop();
  }

  // ---------------------------------------------------------------- state

  get currentDraft(): AnnotationDraft | null {
    return this.draftCurrent;
  }

  get overlayItems(): readonly OverlayItem[] {
    return this.overlaysCurrent;
  }

  /** Content box of the video frame within the canvas, in CSS pixels. */
  box(): ContentBox {
    const rect = this.canvas.getBoundingClientRect();
    const size = this.player.videoSize();
    if (size.width > 0 && size.height > 0) {
      return contentBox(rect.width, rect.height, size.width, size.height);
    }
    return { left: 0, top: 0, width: rect.width, height: rect.height };
  }

  // ------------------------------------------------------------- overlays

  private acquireContext(): PaintContext | null {
    try {
      return this.canvas.getContext('2d') as PaintContext | null;
    } catch {
      return null;
    }
  }

  private applyOverlays(response: OverlayResponse): void {
    assertNoUserIdentifiers(response);
    this.overlaysCurrent = response.overlays;
    this.repaint();
    this.renderTimeline();
  }

  private repaint(): void {
    if (this.paint === null) {
      return;
    }
    const rect = this.canvas.getBoundingClientRect();
    if (this.canvas.width !== Math.round(rect.width) && rect.width > 0) {
      this.canvas.width = Math.round(rect.width);
      this.canvas.height = Math.round(rect.height);
    }
    const box = this.box();
    paintOverlays(this.paint, this.canvas.width, this.canvas.height, box, this.overlaysCurrent);
    if (this.draftCurrent !== null && this.draftCurrent.state === 'editing') {
      paintDraft(this.paint, box, this.draftCurrent);
    }
  }

  // ------------------------------------------------------------- gestures

  private bindPointerHandlers(): void {
    this.canvas.addEventListener('pointerdown', (ev) => this.onPointerDown(ev as PointerEvent));
    this.canvas.addEventListener('pointerup', (ev) => this.onPointerUp(ev as PointerEvent));
    this.canvas.addEventListener('pointermove', (ev) => this.onPointerMove(ev as PointerEvent));
    this.canvas.addEventListener('pointerleave', () => this.dismissPopup());
  }

  private localPoint(ev: { clientX: number; clientY: number }): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  private onPointerDown(ev: PointerEvent): void {
    if (!this.mode.annotationMode || this.draftCurrent !== null) {
      return;
    }
    const p = this.localPoint(ev);
    this.gesture.begin(p.x, p.y, this.player.currentTime(), this.now());
  }

  private onPointerUp(ev: PointerEvent): void {
    if (!this.gesture.active) {
      return;
    }
    const p = this.localPoint(ev);
    const draft = this.gesture.end(p.x, p.y, this.now(), this.box(), this.config.duration);
    if (draft === null) {
      return; // degenerate drag: discarded without any visible reaction
    }
    this.draftCurrent = draft;
    this.showPanel();
    this.repaint();
    this.renderTimeline();
  }

  private onPointerMove(ev: PointerEvent): void {
    if (this.gesture.active || this.markerDrag !== null) {
      return;
    }
    const p = this.localPoint(ev);
    const n = toNormalized(this.box(), p.x, p.y);
    const t = this.player.currentTime();
    let topmost: OverlayItem | null = null;
    for (const item of this.overlaysCurrent) {
      if (t < item.t_start || t >= item.t_end) {
        continue;
      }
      if (rectContains(item, n) && (topmost === null || item.region_id > topmost.region_id)) {
        topmost = item;
      }
    }
    if (topmost === null) {
      this.dismissPopup();
      return;
    }
    if (topmost.region_id !== this.hoveredRegion) {
      this.hoveredRegion = topmost.region_id;
      void this.openPopup(topmost.region_id, ev.clientX, ev.clientY);
    }
  }

  // ---------------------------------------------------------------- popup

  private async openPopup(regionId: number, clientX: number, clientY: number): Promise<void> {
    try {
      const payload = await this.config.client.hover(this.config.videoId, regionId);
      if (this.hoveredRegion !== regionId) {
        return; // the pointer moved on while the fetch was in flight
      }
      const rows = this.popup.enter(regionId, payload);
      this.popupEl.replaceChildren();
      const list = document.createElement('ul');
      list.className = 'cm-popup-rows';
      for (const row of rows) {
        const li = document.createElement('li');
        const labelSpan = document.createElement('span');
        labelSpan.className = 'cm-popup-label';
        labelSpan.textContent = row.labelValue;
        const pctSpan = document.createElement('span');
        pctSpan.className = 'cm-popup-pct';
        pctSpan.textContent = `${row.confidencePct.toFixed(1)}%`;
        li.append(labelSpan, pctSpan);
        li.addEventListener('click', () => void this.openDetail(regionId, row.labelValue));
        list.append(li);
      }
      this.popupEl.append(list);
      this.popupEl.style.left = `${clientX + 12}px`;
      this.popupEl.style.top = `${clientY + 12}px`;
      this.popupEl.style.display = 'block';
    } catch (error) {
      console.warn(`${WARN_TAG} hover fetch failed`, error);
    }
  }

  private async openDetail(regionId: number, labelValue: string): Promise<void> {
    try {
      const payload = await this.config.client.detail(this.config.videoId, regionId, labelValue);
      const view = detailView(payload);
      const detail = document.createElement('div');
      detail.className = 'cm-detail';
      const heading = document.createElement('strong');
      heading.textContent = `${view.labelValue} — ${view.confidencePct.toFixed(1)}% across ${view.supportCount}`;
      detail.append(heading);
      const themes = document.createElement('ul');
      themes.className = 'cm-detail-themes';
      for (const theme of view.themes) {
        const li = document.createElement('li');
        li.textContent = `${theme.text} (${theme.memberCount})`;
        themes.append(li);
      }
      detail.append(themes);
      this.popupEl.append(detail);
    } catch (error) {
      console.warn(`${WARN_TAG} detail fetch failed`, error);
    }
  }

  private dismissPopup(): void {
    this.hoveredRegion = null;
    this.popup.leave();
    this.popupEl.style.display = 'none';
    this.popupEl.replaceChildren();
  }

  // ------------------------------------------------------------- timeline

  private bindTimelineHandlers(): void {
    this.timelineEl.addEventListener('pointerdown', (ev) => {
      const target = ev.target as HTMLElement;
      if (this.draftCurrent === null || this.draftCurrent.state !== 'editing') {
        return;
      }
      if (target.classList.contains('cm-marker-start')) {
        this.markerDrag = 'start';
      } else if (target.classList.contains('cm-marker-end')) {
        this.markerDrag = 'end';
      } else {
        return;
      }
      this.player.pause(); // adjusting the range always halts playback
    });
    this.timelineEl.addEventListener('pointermove', (ev) => {
      if (this.markerDrag === null || this.draftCurrent === null) {
        return;
      }
      const rect = this.timelineEl.getBoundingClientRect();
      const t = this.timeAt(ev.clientX - rect.left, rect.width);
      if (this.markerDrag === 'start') {
        moveStartMarker(this.draftCurrent, t);
      } else {
        moveEndMarker(this.draftCurrent, t, this.config.duration);
      }
      this.renderTimeline();
    });
    const endDrag = () => {
      this.markerDrag = null;
    };
    this.timelineEl.addEventListener('pointerup', endDrag);
    this.timelineEl.addEventListener('pointerleave', endDrag);
  }

  private timeAt(px: number, widthPx: number): number {
    if (widthPx <= 0) {
      return 0;
    }
    return Math.min(this.config.duration, Math.max(0, (px / widthPx) * this.config.duration));
  }

  private renderTimeline(): void {
    this.timelineEl.replaceChildren();
    const width = this.timelineEl.getBoundingClientRect().width;
    for (const block of timelineBlocks(this.overlaysCurrent, this.config.duration, width)) {
      const el = document.createElement('div');
      el.className = 'cm-tl-block';
      el.style.position = 'absolute';
      el.style.left = `${block.leftPx}px`;
      el.style.width = `${Math.max(block.widthPx, 1)}px`;
      el.style.top = '0';
      el.style.height = '100%';
      el.style.background = block.colorHex;
      el.style.opacity = '0.5';
      this.timelineEl.append(el);
    }
    if (this.draftCurrent === null) {
      return;
    }
    const block = draftBlock(this.draftCurrent, this.config.duration, width);
    const span = document.createElement('div');
    span.className = 'cm-tl-draft';
    span.style.position = 'absolute';
    span.style.left = `${block.leftPx}px`;
    span.style.width = `${Math.max(block.widthPx, 1)}px`;
    span.style.top = '0';
    span.style.height = '100%';
    span.style.background = '#FFFFFF';
    span.style.opacity = '0.8';
    this.timelineEl.append(span);
    if (this.draftCurrent.state === 'editing') {
      for (const side of ['start', 'end'] as const) {
        const marker = document.createElement('div');
        marker.className = `cm-tl-marker cm-marker-${side}`;
        marker.style.position = 'absolute';
        const centerPx = side === 'start' ? block.startMarkerPx : block.endMarkerPx;
        marker.style.left = `${centerPx - LAYOUT.markerWidth / 2}px`;
        marker.style.width = `${LAYOUT.markerWidth}px`;
        marker.style.top = '0';
        marker.style.height = '100%';
        marker.style.cursor = 'ew-resize';
        marker.style.background = '#DDDDDD';
        this.timelineEl.append(marker);
      }
    }
  }

  // ---------------------------------------------------------------- panel

  private buildPanel(): void {
    this.labelSelect = document.createElement('select');
    this.labelSelect.className = 'cm-label-select';
    for (const label of PREDEFINED_LABELS) {
      const option = document.createElement('option');
      option.value = label;
      option.textContent = label;
      this.labelSelect.append(option);
    }
    const custom = document.createElement('option');
    custom.value = LAYOUT.customLabelChoice;
    custom.textContent = 'custom…';
    this.labelSelect.append(custom);

    this.customLabelInput = document.createElement('input');
    this.customLabelInput.className = 'cm-label-custom';
    this.customLabelInput.type = 'text';
    this.customLabelInput.placeholder = 'describe the artifact';
    this.customLabelInput.style.display = 'none';
    this.labelSelect.addEventListener('change', () => {
      const isCustom = this.labelSelect.value === LAYOUT.customLabelChoice;
      this.customLabelInput.style.display = isCustom ? 'inline-block' : 'none';
    });

    this.confidenceSlider = document.createElement('input');
    this.confidenceSlider.className = 'cm-confidence';
    this.confidenceSlider.type = 'range';
    this.confidenceSlider.min = '0';
    this.confidenceSlider.max = '100';
    this.confidenceSlider.step = 'any'; // continuous; the scale is never binned
    this.confidenceSlider.value = '50';
    this.confidenceReadout = document.createElement('span');
    this.confidenceReadout.className = 'cm-confidence-readout';
    this.confidenceReadout.textContent = '50.0%';
    this.confidenceSlider.addEventListener('input', () => {
      const pct = Number(this.confidenceSlider.value);
      if (this.draftCurrent !== null && this.draftCurrent.state === 'editing') {
        this.draftCurrent.confidencePct = pct;
      }
      this.confidenceReadout.textContent = `${pct.toFixed(1)}%`;
    });

    this.reasonInput = document.createElement('textarea');
    this.reasonInput.className = 'cm-reason';
    this.reasonInput.placeholder = 'why does this look synthetic?';

    const submit = document.createElement('button');
    submit.className = 'cm-submit';
    submit.type = 'submit';
    submit.textContent = 'Submit annotation';

    const discard = document.createElement('button');
    discard.className = 'cm-discard';
    discard.type = 'button';
    discard.textContent = 'Discard';
    discard.addEventListener('click', () => this.clearDraft());

    this.panelError = document.createElement('div');
    this.panelError.className = 'cm-panel-error';

    this.panelEl.append(
      this.labelSelect,
      this.customLabelInput,
      this.confidenceSlider,
      this.confidenceReadout,
      this.reasonInput,
      submit,
      discard,
      this.panelError,
    );
    this.panelEl.addEventListener('submit', (ev) => {
      ev.preventDefault();
      void this.submitDraft();
    });
  }

  private showPanel(): void {
    this.panelError.textContent = '';
    this.confidenceSlider.value = String(this.draftCurrent?.confidencePct ?? 50);
    this.panelEl.style.display = 'block';
  }

  private clearDraft(): void {
    this.draftCurrent = null;
    this.panelEl.style.display = 'none';
    this.repaint();
    this.renderTimeline();
  }

  /** Read the panel controls into the draft and send it to the service. */
  async submitDraft(): Promise<boolean> {
    const draft = this.draftCurrent;
    if (draft === null || draft.state !== 'editing') {
      return false;
    }
    const isCustom = this.labelSelect.value === LAYOUT.customLabelChoice;
    draft.labelKind = isCustom ? 'custom' : 'predefined';
    draft.labelValue = isCustom ? this.customLabelInput.value.trim() : this.labelSelect.value;
    draft.confidencePct = Number(this.confidenceSlider.value);
    draft.reason = this.reasonInput.value.trim();
    if (!draft.labelValue) {
      this.panelError.textContent = 'a label is required';
      return false;
    }
    try {
      await this.config.client.submit(this.config.videoId, {
        x1: draft.rect.x1,
        y1: draft.rect.y1,
        x2: draft.rect.x2,
        y2: draft.rect.y2,
        t_start: draft.tStart,
        t_end: draft.tEnd,
        label_kind: draft.labelKind,
        label_value: draft.labelValue,
        confidence: draft.confidencePct,
        reason: draft.reason === '' ? null : draft.reason,
      });
    } catch (error) {
      this.panelError.textContent =
        error instanceof ServiceError ? `${error.code}: ${error.message}` : String(error);
      return false;
    }
    markSubmitted(draft);
    this.clearDraft();
    void this.poller.refreshAt(this.player.currentTime());
    return true;
  }

  // ----------------------------------------------------------------- mode

  private renderModeButton(): void {
    this.modeButton.textContent = this.mode.annotationMode ? 'Annotating' : 'Viewing';
    this.modeButton.onclick = () => {
      this.mode.toggle();
      this.renderModeButton();
    };
  }

  // --------------------------------------------------------------- resize

  private watchResize(): void {
    if (typeof ResizeObserver === 'undefined') {
      return;
    }
    const observer = new ResizeObserver(() => {
      this.repaint();
      this.renderTimeline();
    });
    observer.observe(this.canvas);
  }
}
