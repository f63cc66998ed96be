import type {
  CreateSessionResult,
  DispatchReceipt,
  ErrorBody,
  FinalizeResult,
  Payload,
  SessionInfo,
  StepResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(body.message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const data = (await response.json()) as T | { error: ErrorBody };
  if (!response.ok) {
    const error =
      data && typeof data === "object" && "error" in data
        ? (data as { error: ErrorBody }).error
        : { code: "http-error", message: `HTTP ${response.status}` };
    throw new ApiError(response.status, error);
  }
  return data as T;
}

/** Thin client for the /v1/ API; every card rule stays on the server. */
export class ApiClient {
  constructor(readonly base: string = "") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return parse<T>(response);
  }

  createSession(taxonomyVersion: string): Promise<CreateSessionResult> {
    return this.post("/v1/sessions", { taxonomy_version: taxonomyVersion });
  }

  async getSession(sessionId: string): Promise<SessionInfo> {
    const response = await fetch(
      `${this.base}/v1/sessions/${encodeURIComponent(sessionId)}`,
    );
    return parse<SessionInfo>(response);
  }

  submitStep(
    sessionId: string,
    revision: number,
    step: string,
    payload: Payload,
    param?: { category?: string; subcategory?: string },
  ): Promise<StepResult> {
    const answer: Record<string, unknown> = { step, payload, ...param };
    return this.post(`/v1/sessions/${encodeURIComponent(sessionId)}/steps`, {
      revision,
      answer,
    });
  }

  back(sessionId: string, revision: number): Promise<StepResult> {
    return this.post(`/v1/sessions/${encodeURIComponent(sessionId)}/back`, {
      revision,
    });
  }

  finalize(sessionId: string): Promise<FinalizeResult> {
    return this.post(
      `/v1/sessions/${encodeURIComponent(sessionId)}/finalize`,
      {},
    );
  }

  dispatch(recipient: string, cardId: string): Promise<DispatchReceipt> {
    return this.post("/v1/dispatch", { recipient, card_id: cardId });
  }
}
