// API payload shapes, mirrored 1:1 from the server's JSON. Field names
// must stay in sync with the HTTP contract; the UI never invents data
// beyond what these carry.

export interface Recommendation {
  id: number;
  name: string;
  rank_score: number;
  n_pos: number;
  n_all: number;
  cosine: number;
  links: string[];
}

export interface AgentResponse {
  text: string;
  recommendations: Recommendation[];
  template_id: string;
}

export interface Metadata {
  title: string;
  authors: string[];
  abstract_or_summary: string;
  publication_year: number | null;
  citation_count: number | null;
  citation_sources: string[];
}

export interface AttributeValue {
  value: string | number | boolean;
  vote_tally: Record<string, number>;
  supporting_blocks: string[];
  human_override: boolean;
}

export interface DeviceRecord {
  id: number;
  name: string;
  source_kind: string;
  metadata: Metadata;
  taxonomy: Record<string, AttributeValue>;
  review_status: string;
  source_links: string[];
  embedding: string | null;
}

export interface ApiErrorBody {
  code: "bad_request" | "not_found" | "conflict" | "provider_unavailable" | "internal";
  message: string;
  retryable: boolean;
}

export class ApiError extends Error {
  readonly code: ApiErrorBody["code"];
  readonly retryable: boolean;
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.code = body.code;
    this.retryable = body.retryable;
  }
}

// One rendered conversation entry. Error turns keep the failed prompt so
// a retry affordance can resubmit it.
export type Turn =
  | { kind: "user"; text: string }
  | { kind: "agent"; response: AgentResponse }
  | { kind: "error"; message: string; retryable: boolean; prompt: string };
