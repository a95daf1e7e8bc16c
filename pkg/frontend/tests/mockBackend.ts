/** In-memory backend for headless tests: routes fetch calls, records bodies. */

import { GenerateResponse, SearchHit, TrialDoc } from "../src/api.js";

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export interface MockBackend {
  fetch: typeof fetch;
  requests: RecordedRequest[];
  searchBodies: () => unknown[];
  generateStatus: number;
  searchStatus: number;
}

export const GENERATION: GenerateResponse = {
  raw_generation: "1. diabetes\n2. insulin\n3. metformin",
  processed_terms: ["diabet", "insulin", "metformin"],
  term_count: 3,
  latency_s: 0.12,
  model_name: "mock-model",
  template_id: "a1b2c3d4e5f60718",
};

// scores descend but docnos do not, so order checks are meaningful
export const HITS: SearchHit[] = [
  { docno: "NCT00000201", score: 9.13, title: "Insulin Add-on Trial", snippet: "Adults with type 2 diabetes..." },
  { docno: "NCT00000107", score: 8.27, title: "Metformin Dose Study", snippet: "Randomized dose comparison..." },
  { docno: "NCT00000309", score: 7.51, title: "Lifestyle Program", snippet: "Diet and exercise program..." },
];

export const TRIAL: TrialDoc = {
  docno: "NCT00000201",
  title: "Insulin Add-on Trial",
  conditions: ["Type 2 Diabetes Mellitus"],
  brief_summary: "Evaluates adding insulin to oral therapy.",
  detailed_description: "A 24-week randomized trial of basal insulin.",
  eligibility_text:
    "Inclusion: adults 18 to 75 with type 2 diabetes on metformin. " +
    "Exclusion: prior insulin pump use, pregnancy.",
  gender: "All",
  min_age: "18 Years",
  max_age: "75 Years",
};

function jsonResponse(status: number, data: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => data,
  } as unknown as Response;
}

export function makeBackend(): MockBackend {
  const requests: RecordedRequest[] = [];
  const backend: MockBackend = {
    requests,
    generateStatus: 200,
    searchStatus: 200,
    searchBodies: () =>
      requests.filter((r) => r.url === "/api/search").map((r) => r.body),
    fetch: (async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const method = init?.method ?? "GET";
      const body = init?.body ? JSON.parse(String(init.body)) : null;
      requests.push({ url, method, body });

      if (url === "/api/generate") {
        if (backend.generateStatus !== 200) {
          return jsonResponse(backend.generateStatus, {
            detail: {
              error: "no generation endpoint is configured",
              hint: "search with the note text directly",
            },
          });
        }
        return jsonResponse(200, GENERATION);
      }
      if (url === "/api/search") {
        if (backend.searchStatus !== 200) {
          return jsonResponse(backend.searchStatus, {
            detail: { error: "index unavailable" },
          });
        }
        return jsonResponse(200, HITS);
      }
      const trial = url.match(/^\/api\/trials\/(.+)$/);
      if (trial) {
        if (decodeURIComponent(trial[1]) === TRIAL.docno) {
          return jsonResponse(200, TRIAL);
        }
        return jsonResponse(404, {
          detail: { error: "unknown docno", docno: decodeURIComponent(trial[1]) },
        });
      }
      return jsonResponse(404, { detail: { error: `no route: ${url}` } });
    }) as typeof fetch,
  };
  return backend;
}
