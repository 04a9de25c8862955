import type {
  ModelDetailResponse,
  ModelListResponse,
  SensitivityBody,
  SessionResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** What the app needs from the backend; ApiClient is the real one. */
export interface Api {
  listModels(): Promise<ModelListResponse>;
  getModel(name: string): Promise<ModelDetailResponse>;
  getSvg(name: string): Promise<string>;
  createSession(model: string, resultType?: string): Promise<SessionResponse>;
  patchOverrides(
    session: string,
    patch: Record<string, number | null>,
  ): Promise<SessionResponse>;
  resetOverrides(session: string): Promise<SessionResponse>;
  sessionSensitivity(session: string): Promise<SensitivityBody>;
}

/** Error bodies arrive as {"detail": {"error", "detail"}} or, for request
 *  validation, as {"detail": [...]}; normalise both into an ApiError. */
async function raise(res: Response): Promise<never> {
  let code = `HTTP ${res.status}`;
  let detail = res.statusText;
  try {
    const body = (await res.json()) as { detail?: unknown };
    const d = body.detail;
    if (d && typeof d === "object" && !Array.isArray(d)) {
      const wrapped = d as { error?: string; detail?: string };
      code = wrapped.error ?? code;
      detail = wrapped.detail ?? detail;
    } else if (Array.isArray(d)) {
      code = "RequestValidation";
      detail = d
        .map((e) => (e as { msg?: string }).msg ?? JSON.stringify(e))
        .join("; ");
    } else if (typeof d === "string") {
      detail = d;
    }
  } catch {
    // non-JSON body; keep the status line
  }
  throw new ApiError(res.status, code, detail);
}

export class ApiClient implements Api {
  constructor(private readonly base: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, init);
    if (!res.ok) await raise(res);
    return (await res.json()) as T;
  }

  private body(payload: unknown, method: string): RequestInit {
    return {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    };
  }

  listModels(): Promise<ModelListResponse> {
    return this.json("/models");
  }

  getModel(name: string): Promise<ModelDetailResponse> {
    return this.json(`/models/${encodeURIComponent(name)}`);
  }

  async getSvg(name: string): Promise<string> {
    const res = await fetch(
      `${this.base}/models/${encodeURIComponent(name)}/svg`,
    );
    if (!res.ok) await raise(res);
    return res.text();
  }

  createSession(model: string, resultType = "actual"): Promise<SessionResponse> {
    return this.json(
      "/sessions",
      this.body({ model, result_type: resultType }, "POST"),
    );
  }

  patchOverrides(
    session: string,
    patch: Record<string, number | null>,
  ): Promise<SessionResponse> {
    return this.json(
      `/sessions/${encodeURIComponent(session)}/overrides`,
      this.body(patch, "PATCH"),
    );
  }

  resetOverrides(session: string): Promise<SessionResponse> {
    return this.json(`/sessions/${encodeURIComponent(session)}/overrides`, {
      method: "DELETE",
    });
  }

  sessionSensitivity(session: string): Promise<SensitivityBody> {
    return this.json(`/sessions/${encodeURIComponent(session)}/sensitivity`);
  }
}
