/**
 * Typed HTTP client for the crowdmark annotation service.
 *
 * Every method maps one-to-one onto a service route; the client adds no
 * caching or retries. Errors carry the service's error code (the exception
 * class name in the response body) alongside the HTTP status.
 */

import type {
  DetailPayload,
  HoverPayload,
  OverlayResponse,
  SubmitBody,
  SubmitResponse,
  VideoEntry,
} from './types.js';

export interface ClientOptions {
  /** Service base address, e.g. "http://127.0.0.1:8700". */
  baseUrl: string;
  /** Identity sent with writes; never rendered by the UI. */
  userId: string;
  /** Injection point for tests; defaults to the global fetch. */
  fetchFn?: typeof fetch;
}

export class ServiceError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = 'ServiceError';
    this.status = status;
    this.code = code;
  }
}

/**
 * Encode a path made of several segments. Label values may legitimately
 * contain slashes ("non-existent/unneeded object"); those must survive as
 * literal path separators, so each slash-delimited piece is encoded alone.
 */
function encodePath(value: string): string {
  return value.split('/').map(encodeURIComponent).join('/');
}

export class ServiceClient {
  readonly baseUrl: string;
  readonly userId: string;
  private readonly fetchFn: typeof fetch;

  constructor(options: ClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, '');
    this.userId = options.userId;
    this.fetchFn = options.fetchFn ?? fetch;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { 'X-User-Id': this.userId };
    let payload: string | undefined;
    if (body !== undefined) {
      headers['Content-Type'] = 'application/json';
      payload = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: payload,
    });
    const text = await response.text();
    const data: unknown = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const detail = (data as { error?: string; message?: string } | null) ?? {};
      throw new ServiceError(
        response.status,
        detail.error ?? 'HttpError',
        detail.message ?? `${method} ${path} failed with ${response.status}`,
      );
    }
    return data as T;
  }

  async health(): Promise<{ status: string; seq: number }> {
    return this.request('GET', '/health');
  }

  async videos(): Promise<VideoEntry[]> {
    const data = await this.request<{ videos: VideoEntry[] }>('GET', '/videos');
    return data.videos;
  }

  async overlays(videoId: string, t: number): Promise<OverlayResponse> {
    return this.request('GET', `/videos/${encodeURIComponent(videoId)}/overlays?t=${t}`);
  }

  async hover(videoId: string, regionId: number): Promise<HoverPayload> {
    return this.request(
      'GET',
      `/videos/${encodeURIComponent(videoId)}/regions/${regionId}/hover`,
    );
  }

  async detail(videoId: string, regionId: number, labelValue: string): Promise<DetailPayload> {
    return this.request(
      'GET',
      `/videos/${encodeURIComponent(videoId)}/regions/${regionId}/labels/${encodePath(labelValue)}`,
    );
  }

  async submit(videoId: string, body: Omit<SubmitBody, 'user_id'>): Promise<SubmitResponse> {
    const full: SubmitBody = { user_id: this.userId, ...body };
    return this.request('POST', `/videos/${encodeURIComponent(videoId)}/annotations`, full);
  }

  async deleteAnnotation(videoId: string, annotationId: string): Promise<{ deleted: string; seq: number }> {
    return this.request(
      'DELETE',
      `/videos/${encodeURIComponent(videoId)}/annotations/${encodeURIComponent(annotationId)}`,
    );
  }
}
