/** Thin typed client over the five service routes. */

import type { CanvasJson, ImageEntry, ParamsInfo, QueryBody, RankedResults } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function readDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return res.statusText;
  }
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    const res = await fetch(this.url(path), { signal });
    if (!res.ok) throw new ApiError(res.status, await readDetail(res));
    return (await res.json()) as T;
  }

  images(signal?: AbortSignal): Promise<ImageEntry[]> {
    return this.getJson("/api/images", signal);
  }

  params(signal?: AbortSignal): Promise<ParamsInfo> {
    return this.getJson("/api/params", signal);
  }

  canvas(imageId: string, signal?: AbortSignal): Promise<CanvasJson> {
    return this.getJson(`/api/canvas/${encodeURIComponent(imageId)}`, signal);
  }

  async overlaySvg(imageId: string, elements?: string[], signal?: AbortSignal): Promise<string> {
    const qs = elements && elements.length ? `?elements=${elements.join(",")}` : "";
    const res = await fetch(this.url(`/api/overlay/${encodeURIComponent(imageId)}.svg${qs}`), {
      signal,
    });
    if (!res.ok) throw new ApiError(res.status, await readDetail(res));
    return res.text();
  }

  async query(body: QueryBody, signal?: AbortSignal): Promise<RankedResults> {
    const res = await fetch(this.url("/api/query"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!res.ok) throw new ApiError(res.status, await readDetail(res));
    return (await res.json()) as RankedResults;
  }
}
