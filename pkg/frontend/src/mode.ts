/**
 * UI mode switch.
 *
 * Annotation mode arms the draw-and-hold gesture; it does not gate what the
 * viewer sees. Peer overlays stay visible in both modes — the switch only
 * decides whether pointer gestures create drafts.
 */

export class UiMode {
  private annotating = false;

  get annotationMode(): boolean {
    return this.annotating;
  }

  /** Consensus overlays render regardless of mode. */
  get overlaysVisible(): boolean {
    return true;
  }

  setAnnotationMode(on: boolean): void {
    this.annotating = on;
  }

  toggle(): boolean {
    this.annotating = !this.annotating;
    return this.annotating;
  }
}
