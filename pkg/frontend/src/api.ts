/**
 * Typed client for the trialsearch JSON API.
 *
 * Every call goes to the same origin that served the bundle; the browser
 * never talks to a generation endpoint directly.
 */

export interface SearchHit {
  docno: string;
  score: number;
  title: string;
  snippet: string;
}

export interface TrialDoc {
  docno: string;
  title: string;
  conditions: string[];
  brief_summary: string;
  detailed_description: string;
  eligibility_text: string;
  gender: string;
  min_age: string;
  max_age: string;
}

export interface GenerateResponse {
  raw_generation: string;
  processed_terms: string[];
  term_count: number;
  latency_s: number;
  model_name: string;
  template_id: string;
}

export type Strategy = "generated_only" | "note" | "concat_original";

export interface SearchBody {
  note?: string;
  terms?: string[];
  strategy?: Strategy;
  k?: number;
}

export class ApiError extends Error {
  status: number;
  hint: string | null;

  constructor(status: number, message: string, hint: string | null = null) {
    super(message);
    this.status = status;
    this.hint = hint;
  }
}

async function raise(resp: Response): Promise<never> {
  let message = `${resp.status} ${resp.statusText}`;
  let hint: string | null = null;
  try {
    const body = await resp.json();
    const detail = body && body.detail !== undefined ? body.detail : body;
    if (detail && typeof detail === "object") {
      if (typeof detail.error === "string") message = detail.error;
      if (typeof detail.hint === "string") hint = detail.hint;
    } else if (typeof detail === "string") {
      message = detail;
    }
  } catch {
    // non-JSON error body, keep the status line
  }
  throw new ApiError(resp.status, message, hint);
}

export async function postSearch(body: SearchBody): Promise<SearchHit[]> {
  const resp = await fetch("/api/search", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!resp.ok) await raise(resp);
  return resp.json();
}

export async function postGenerate(note: string): Promise<GenerateResponse> {
  const resp = await fetch("/api/generate", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ note }),
  });
  if (!resp.ok) await raise(resp);
  return resp.json();
}

export async function getTrial(docno: string): Promise<TrialDoc> {
  const resp = await fetch(`/api/trials/${encodeURIComponent(docno)}`);
  if (!resp.ok) await raise(resp);
  return resp.json();
}
