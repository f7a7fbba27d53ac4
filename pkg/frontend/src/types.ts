/** Wire types of the study service API (all payloads are provenance-free). */

export type BoxArray = [number, number, number, number]; // x, y, width, height

export type CandidatePayload = {
  candidate_id: string;
  box: BoxArray;
};

export type TaskPayload = {
  task_id: string;
  image: { file_name: string; url: string; width: number; height: number };
  object: { category: string; marker: [number, number] };
  candidates: CandidatePayload[];
  progress: { answered: number; total: number };
};

export type CompletionPayload = {
  complete: true;
  answered: number;
  total: number;
};

export type NextResponse = TaskPayload | CompletionPayload;

export function isComplete(r: NextResponse): r is CompletionPayload {
  return (r as CompletionPayload).complete === true;
}

export type JudgmentBody = {
  participant_id: string;
  task_id: string;
  selected: string[];
  display_order: string[];
};

export type SubmitAck = { status: "ok"; answered: number; total: number };

export type ExportDoc = {
  study_id: string;
  options: string[];
  rows: number[][];
  row_keys: [string, string][];
};
