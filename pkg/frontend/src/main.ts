import { fetchSearch, fetchSuggestions, ServiceError } from './api';
import type { SearchOptions } from './api';
import { toFilters } from './filters';
import type { FacetMode } from './filters';
import { LatestWins } from './latest';
import { renderError, renderResults, renderSuggestions } from './render';

const BASE = '';

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function setupApp(): void {
  const form = byId<HTMLFormElement>('search-form');
  const queryInput = byId<HTMLInputElement>('query');
  const kbToggle = byId<HTMLInputElement>('use-kb');
  const embToggle = byId<HTMLInputElement>('use-emb');
  const deptMode = byId<HTMLSelectElement>('dept-mode');
  const deptValues = byId<HTMLInputElement>('dept-values');
  const postMode = byId<HTMLSelectElement>('post-mode');
  const postValues = byId<HTMLInputElement>('post-values');
  const resultsBox = byId<HTMLDivElement>('results-box');
  const suggestBox = byId<HTMLDivElement>('suggest-box');

  const tickets = new LatestWins();

  async function runSearch(): Promise<void> {
    const query = queryInput.value.trim();
    if (!query) return;
    const ticket = tickets.issue();
    const filters = toFilters(
      { mode: deptMode.value as FacetMode, values: deptValues.value },
      { mode: postMode.value as FacetMode, values: postValues.value },
    );
    const options: SearchOptions = {
      useKb: kbToggle.checked,
      useEmbeddings: embToggle.checked,
    };
    try {
      const payload = await fetchSearch(BASE, query, filters, options);
      if (!tickets.isCurrent(ticket)) return; // superseded: discard
      renderResults(resultsBox, payload);
    } catch (err) {
      if (!tickets.isCurrent(ticket)) return;
      renderError(resultsBox, err instanceof ServiceError ? err.message : 'service unreachable');
    }
    refreshSuggestions(query).catch(() => renderSuggestions(suggestBox, [], () => undefined));
  }

  async function refreshSuggestions(query: string): Promise<void> {
    const terms = await fetchSuggestions(BASE, query);
    renderSuggestions(suggestBox, terms, (term) => {
      queryInput.value = `${queryInput.value.trim()} ${term}`.trim();
      void runSearch();
    });
  }

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void runSearch();
  });
  for (const widget of [kbToggle, embToggle, deptMode, deptValues, postMode, postValues]) {
    widget.addEventListener('change', () => void runSearch());
  }
}

if (typeof document !== 'undefined' && document.getElementById('search-form')) {
  setupApp();
}
