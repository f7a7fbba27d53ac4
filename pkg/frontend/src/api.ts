/** Fetch-based client for the study service. */

import type { ExportDoc, JudgmentBody, NextResponse, SubmitAck } from "./types.js";

/** Submit outcomes the session must distinguish: a duplicate means the
 * judgment is already recorded and the session should advance without
 * re-posting; a network failure means the record must be kept and retried. */
export type SubmitResult =
  | { kind: "ok"; ack: SubmitAck }
  | { kind: "duplicate" }
  | { kind: "invalid"; detail: string };

export class NetworkError extends Error {}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  imageUrl(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async nextTask(studyId: string, participantId: string): Promise<NextResponse> {
    const url =
      `${this.baseUrl}/studies/${encodeURIComponent(studyId)}/next` +
      `?participant=${encodeURIComponent(participantId)}`;
    const resp = await this.get(url);
    if (!resp.ok) {
      throw new Error(`next task failed: HTTP ${resp.status}`);
    }
    return (await resp.json()) as NextResponse;
  }

  async submitJudgment(studyId: string, body: JudgmentBody): Promise<SubmitResult> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(
        `${this.baseUrl}/studies/${encodeURIComponent(studyId)}/judgments`,
        {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(body),
        },
      );
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (resp.status === 409) {
      return { kind: "duplicate" };
    }
    if (resp.status === 400) {
      const doc = (await resp.json()) as { detail?: string };
      return { kind: "invalid", detail: doc.detail ?? "invalid selection" };
    }
    if (!resp.ok) {
      throw new Error(`submit failed: HTTP ${resp.status}`);
    }
    return { kind: "ok", ack: (await resp.json()) as SubmitAck };
  }

  async exportJudgments(studyId: string): Promise<ExportDoc> {
    const resp = await this.get(
      `${this.baseUrl}/studies/${encodeURIComponent(studyId)}/export`,
    );
    if (!resp.ok) {
      throw new Error(`export failed: HTTP ${resp.status}`);
    }
    return (await resp.json()) as ExportDoc;
  }

  private async get(url: string): Promise<Response> {
    try {
      return await this.fetchImpl(url);
    } catch (err) {
      throw new NetworkError(String(err));
    }
  }
}
