/** DOM-independent participant session: task loading, selection state and
 * submission with a local retry queue.
 *
 * Submissions are idempotent through the server's (participant, task)
 * duplicate guard: a judgment whose acknowledgment was lost is re-posted on
 * retry and the resulting 409 is treated as success, so the session never
 * advances without the record being durably stored, and never stores it
 * twice.
 */

import { ApiClient, NetworkError } from "./api.js";
import { isComplete, type JudgmentBody, type TaskPayload } from "./types.js";

export type SessionPhase = "idle" | "task" | "submitting" | "complete" | "failed";

export type SessionOptions = {
  retryDelayMs?: number;
  maxRetries?: number;
  sleep?: (ms: number) => Promise<void>;
};

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class TaskSession {
  phase: SessionPhase = "idle";
  task: TaskPayload | null = null;
  selected = new Set<string>();
  hidden = new Set<string>();
  answered = 0;
  total = 0;
  lastError: string | null = null;
  onChange: () => void = () => {};

  private readonly retryDelayMs: number;
  private readonly maxRetries: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(
    private readonly api: ApiClient,
    private readonly studyId: string,
    private readonly participantId: string,
    options: SessionOptions = {},
  ) {
    this.retryDelayMs = options.retryDelayMs ?? 1500;
    this.maxRetries = options.maxRetries ?? 40;
    this.sleep = options.sleep ?? defaultSleep;
  }

  async start(): Promise<void> {
    await this.loadNext();
  }

  /** Candidate ids in the served display order. */
  displayOrder(): string[] {
    return this.task ? this.task.candidates.map((c) => c.candidate_id) : [];
  }

  toggleSelection(candidateId: string): void {
    if (!this.task) return;
    if (this.selected.has(candidateId)) {
      this.selected.delete(candidateId);
    } else {
      this.selected.add(candidateId);
    }
    this.onChange();
  }

  toggleVisibility(candidateId: string): void {
    if (this.hidden.has(candidateId)) {
      this.hidden.delete(candidateId);
    } else {
      this.hidden.add(candidateId);
    }
    this.onChange();
  }

  /** Submit stays disabled until at least one candidate is selected. */
  canSubmit(): boolean {
    return this.phase === "task" && this.selected.size > 0;
  }

  /** Post the selection; on success or duplicate advance to the next task.
   * Network failures keep the record locally and retry with a delay. */
  async submit(): Promise<void> {
    if (!this.canSubmit() || !this.task) return;
    const body: JudgmentBody = {
      participant_id: this.participantId,
      task_id: this.task.task_id,
      selected: [...this.selected],
      display_order: this.displayOrder(),
    };
    this.phase = "submitting";
    this.onChange();

    for (let attempt = 0; ; attempt++) {
      try {
        const result = await this.api.submitJudgment(this.studyId, body);
        if (result.kind === "invalid") {
          this.phase = "task";
          this.lastError = result.detail;
          this.onChange();
          return;
        }
        // "ok" and "duplicate" both mean the judgment is recorded.
        break;
      } catch (err) {
        if (!(err instanceof NetworkError) || attempt >= this.maxRetries) {
          this.phase = "failed";
          this.lastError = String(err);
          this.onChange();
          return;
        }
        await this.sleep(this.retryDelayMs);
      }
    }
    await this.loadNext();
  }

  private async loadNext(): Promise<void> {
    this.task = null;
    this.selected = new Set();
    this.hidden = new Set();
    for (let attempt = 0; ; attempt++) {
      try {
        const next = await this.api.nextTask(this.studyId, this.participantId);
        if (isComplete(next)) {
          this.phase = "complete";
          this.answered = next.answered;
          this.total = next.total;
        } else {
          this.phase = "task";
          this.task = next;
          this.answered = next.progress.answered;
          this.total = next.progress.total;
        }
        this.lastError = null;
        this.onChange();
        return;
      } catch (err) {
        if (!(err instanceof NetworkError) || attempt >= this.maxRetries) {
          this.phase = "failed";
          this.lastError = String(err);
          this.onChange();
          return;
        }
        await this.sleep(this.retryDelayMs);
      }
    }
  }
}
