/** Typed client for the migration-session HTTP API. */

export interface SessionSummary {
  session_id: string;
  version: number;
  total_segments: number;
  converted_by_baseline: number;
  converted_by_learned: number;
  residual_segments: number;
  residual_errors_by_code: Record<string, number>;
}

export interface SpanDoc {
  byte_start: number;
  byte_end: number;
  line: number;
}

export interface ResidualSample {
  segment_id: string;
  message: string;
  text: string;
  span: SpanDoc;
}

export interface ResidualGroup {
  code: string;
  message: string;
  count: number;
  samples: ResidualSample[];
}

export interface VerificationDoc {
  grammatical: boolean;
  equivalent_non_null: boolean;
  intentional_repair: string | null;
  divergences: unknown[];
}

export interface PreviewSite {
  segment_id: string;
  before: string;
  after: string | null;
  verification: VerificationDoc | null;
}

export interface PreviewDoc {
  preview_id: string;
  version: number;
  error_code: string;
  rule: unknown;
  sites: PreviewSite[];
}

/** Server-reported failure (induction conflict, parse error, stale preview, ...). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface ErrorDetail {
  error?: string;
  message?: string;
}

export class SessionApi {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      let kind = "HttpError";
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as { detail?: ErrorDetail };
        const detail = body.detail ?? (body as ErrorDetail);
        if (detail.error) kind = detail.error;
        if (detail.message) message = detail.message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, kind, message);
    }
    return (await response.json()) as T;
  }

  session(): Promise<SessionSummary> {
    return this.request("/session");
  }

  async residuals(code?: string): Promise<ResidualGroup[]> {
    const query = code ? `?code=${encodeURIComponent(code)}` : "";
    const body = await this.request<{ groups: ResidualGroup[] }>(`/residuals${query}`);
    return body.groups;
  }

  submitDemonstration(errorCode: string, targetText: string): Promise<PreviewDoc> {
    return this.request("/demonstrations", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ error_code: errorCode, target_text: targetText }),
    });
  }

  acceptRule(previewId: string): Promise<SessionSummary> {
    return this.request("/rules/accept", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ preview_id: previewId }),
    });
  }

  rejectRule(previewId: string): Promise<SessionSummary> {
    return this.request("/rules/reject", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ preview_id: previewId }),
    });
  }

  report(): Promise<unknown> {
    return this.request("/report");
  }
}
