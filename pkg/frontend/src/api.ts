// Typed client for the engine's HTTP API. Every user action in the UI goes
// through the documented endpoints; nothing is recomputed client-side.

export interface ResultRow {
  author: string;
  name: string;
  department: string;
  post: string;
  s_e: number;
  s_a: number;
  explanation: string[];
  provenance: string[];
}

export interface SearchPayload {
  results: ResultRow[];
  total: number;
  offset: number;
  diagnostic: string | null;
  query_terms: string[];
}

export interface FacetFilters {
  deptIn: string[];
  deptOut: string[];
  postIn: string[];
  postOut: string[];
}

export interface SearchOptions {
  useKb: boolean;
  useEmbeddings: boolean;
  limit?: number;
  offset?: number;
}

export const EMPTY_FILTERS: FacetFilters = { deptIn: [], deptOut: [], postIn: [], postOut: [] };

/** Maps UI state to the service's query parameters, 1:1 with the endpoint. */
export function buildSearchParams(
  query: string,
  filters: FacetFilters,
  options: SearchOptions,
): URLSearchParams {
  const params = new URLSearchParams();
  params.set('q', query);
  if (options.useKb) params.set('kb', '1');
  if (options.useEmbeddings) params.set('emb', '1');
  for (const d of filters.deptIn) params.append('dept_in', d);
  for (const d of filters.deptOut) params.append('dept_out', d);
  for (const p of filters.postIn) params.append('post_in', p);
  for (const p of filters.postOut) params.append('post_out', p);
  if (options.limit !== undefined) params.set('limit', String(options.limit));
  if (options.offset !== undefined && options.offset !== 0) {
    params.set('offset', String(options.offset));
  }
  return params;
}

export class ServiceError extends Error {
  constructor(message: string, readonly code?: number) {
    super(message);
  }
}

async function getJson(url: string): Promise<unknown> {
  let response: Response;
  try {
    response = await fetch(url);
  } catch {
    throw new ServiceError('service unreachable');
  }
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const message =
      body && typeof body === 'object' && 'error' in (body as Record<string, unknown>)
        ? String((body as Record<string, unknown>).error)
        : `request failed (${response.status})`;
    throw new ServiceError(message, response.status);
  }
  return body;
}

export async function fetchSearch(
  base: string,
  query: string,
  filters: FacetFilters,
  options: SearchOptions,
): Promise<SearchPayload> {
  const params = buildSearchParams(query, filters, options);
  return (await getJson(`${base}/search?${params.toString()}`)) as SearchPayload;
}

export async function fetchSuggestions(base: string, term: string, k = 8): Promise<string[]> {
  const params = new URLSearchParams({ term, k: String(k) });
  const body = (await getJson(`${base}/suggest?${params.toString()}`)) as {
    suggestions: string[];
  };
  return body.suggestions;
}
