/** Typed fetch client for the exploration service. No rendering, no state. */

import type { SessionView, StepDetail } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ExplorerApi {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly base: string = "",
    fetchFn?: FetchLike,
  ) {
    // bind so a bare global fetch keeps its expected receiver
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  async getSession(): Promise<SessionView> {
    return this.request("GET", "/api/session");
  }

  async getStep(index: number): Promise<StepDetail> {
    return this.request("GET", `/api/steps/${index}`);
  }

  /** Acquire and analyze the next station. Server replies 409 if a choice is pending. */
  async runStep(): Promise<StepDetail> {
    return this.request("POST", "/api/steps");
  }

  /** Commit the target for the pending step. Server replies 409 if nothing is pending. */
  async choose(rank: number): Promise<SessionView> {
    return this.request("POST", "/api/choice", { rank });
  }

  imageUrl(step: number, name: string): string {
    return `${this.base}/api/steps/${step}/image/${name}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError("network", `service unreachable: ${String(err)}`, 0);
    }
    if (!resp.ok) {
      let code = "http";
      let message = `${resp.status} ${resp.statusText}`;
      try {
        const parsed = (await resp.json()) as { error?: { code?: string; message?: string } };
        if (parsed.error) {
          code = parsed.error.code ?? code;
          message = parsed.error.message ?? message;
        }
      } catch {
        // non-JSON error body, keep the status line
      }
      throw new ApiError(code, message, resp.status);
    }
    return (await resp.json()) as T;
  }
}
