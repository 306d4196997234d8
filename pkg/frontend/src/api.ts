/** Thin typed client for the profiler session service. */

import type { SessionResponse, SessionSource, WindowsResponse } from "./model.js";

export interface ApiClient {
  createSession(source: SessionSource, grid?: number[]): Promise<SessionResponse>;
  getWindows(id: string, srrTarget: number): Promise<WindowsResponse>;
  deleteSession(id: string): Promise<void>;
}

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function asError(resp: Response): Promise<ServiceError> {
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    /* non-JSON error body: keep the status line */
  }
  return new ServiceError(resp.status, message);
}

export function createApiClient(baseUrl = ""): ApiClient {
  return {
    async createSession(source, grid) {
      const body: Record<string, unknown> = { source };
      if (grid) body.grid = grid;
      const resp = await fetch(`${baseUrl}/sessions`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
      if (!resp.ok) throw await asError(resp);
      return resp.json();
    },

    async getWindows(id, srrTarget) {
      const resp = await fetch(
        `${baseUrl}/sessions/${id}/windows?srr_target=${encodeURIComponent(srrTarget)}`,
      );
      if (!resp.ok) throw await asError(resp);
      return resp.json();
    },

    async deleteSession(id) {
      const resp = await fetch(`${baseUrl}/sessions/${id}`, { method: "DELETE" });
      if (!resp.ok && resp.status !== 404) throw await asError(resp);
    },
  };
}
