/** Thin typed client for the study service; URL building is pure and testable. */

export interface StudySummary {
  id: string;
  source_kind: string;
  width: number;
  height: number;
  value_min: number;
  value_max: number;
  photometric: string;
  embedded_window: { ww: number; wl: number } | null;
  has_mask: boolean;
  mask_provenance: string | null;
  warnings: string[];
}

export interface AutoWindowResponse {
  ww: number;
  wl: number;
  strategy: string;
  suppress: boolean;
  foreground_fraction: number;
  warnings: string[];
}

export interface HistogramResponse {
  range_min: number;
  range_max: number;
  counts: number[];
  total: number;
  warnings: string[];
}

export interface RenderParams {
  ww: number;
  wl: number;
  suppress: boolean;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    detail: string,
  ) {
    super(`${errorName} (${status}): ${detail}`);
  }
}

async function rejectFrom(response: Response): Promise<never> {
  let name = "HttpError";
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      name = body.error;
      detail = body.detail ?? "";
    }
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(response.status, name, detail);
}

export function renderUrl(base: string, studyId: string, params: RenderParams): string {
  const query = new URLSearchParams({
    ww: String(params.ww),
    wl: String(params.wl),
    suppress: String(params.suppress),
  });
  return `${base}/api/studies/${studyId}/render?${query.toString()}`;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  renderUrl(studyId: string, params: RenderParams): string {
    return renderUrl(this.base, studyId, params);
  }

  async uploadStudy(bytes: ArrayBuffer | Uint8Array, format: "dicom" | "pgm"): Promise<StudySummary> {
    const response = await this.fetchFn(`${this.base}/api/studies`, {
      method: "POST",
      headers: { "X-Format": format, "Content-Type": "application/octet-stream" },
      body: bytes as BodyInit,
    });
    if (response.status !== 201) await rejectFrom(response);
    return (await response.json()) as StudySummary;
  }

  async getStudy(studyId: string): Promise<StudySummary> {
    const response = await this.fetchFn(`${this.base}/api/studies/${studyId}`);
    if (!response.ok) await rejectFrom(response);
    return (await response.json()) as StudySummary;
  }

  async autoWindow(studyId: string, suppress: boolean, strategy: string): Promise<AutoWindowResponse> {
    const query = new URLSearchParams({ suppress: String(suppress), strategy });
    const response = await this.fetchFn(
      `${this.base}/api/studies/${studyId}/auto-window?${query.toString()}`,
    );
    if (!response.ok) await rejectFrom(response);
    return (await response.json()) as AutoWindowResponse;
  }

  async histogram(studyId: string, suppress: boolean, bins: number): Promise<HistogramResponse> {
    const query = new URLSearchParams({ suppress: String(suppress), bins: String(bins) });
    const response = await this.fetchFn(
      `${this.base}/api/studies/${studyId}/histogram?${query.toString()}`,
    );
    if (!response.ok) await rejectFrom(response);
    return (await response.json()) as HistogramResponse;
  }

  async fetchRender(url: string): Promise<ArrayBuffer> {
    const response = await this.fetchFn(url);
    if (!response.ok) await rejectFrom(response);
    return response.arrayBuffer();
  }
}
