// End-to-end wiring against a mocked fetch: submitting the form populates the
// result list from the golden service payload, suggestion chips re-query, and
// network failures surface the banner.

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { setupApp } from '../src/main';
import golden from './fixtures/search_response.json';
import suggestGolden from './fixtures/suggest_response.json';

const PAGE = `
  <form id="search-form">
    <input id="query" type="text" />
    <input type="checkbox" id="use-kb" />
    <input type="checkbox" id="use-emb" />
    <select id="dept-mode"><option value="any">any</option><option value="exclude">exclude</option></select>
    <input id="dept-values" type="text" />
    <select id="post-mode"><option value="any">any</option><option value="exclude">exclude</option></select>
    <input id="post-values" type="text" />
  </form>
  <div id="suggest-box"></div>
  <div id="results-box"></div>
`;

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { 'content-type': 'application/json' },
  });
}

async function flush(): Promise<void> {
  for (let i = 0; i < 5; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

describe('app wiring', () => {
  beforeEach(() => {
    document.body.innerHTML = PAGE;
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it('submit renders the golden payload and issues the documented request', async () => {
    const calls: string[] = [];
    vi.stubGlobal(
      'fetch',
      vi.fn(async (url: string) => {
        calls.push(url);
        return url.includes('/suggest') ? jsonResponse(suggestGolden) : jsonResponse(golden);
      }),
    );
    setupApp();

    (document.getElementById('query') as HTMLInputElement).value = 'natural language processing';
    (document.getElementById('use-emb') as HTMLInputElement).checked = true;
    (document.getElementById('search-form') as HTMLFormElement).dispatchEvent(
      new Event('submit', { cancelable: true }),
    );
    await flush();

    const searchCall = calls.find((u) => u.includes('/search'));
    expect(searchCall).toBeDefined();
    const params = new URLSearchParams(searchCall!.split('?')[1]);
    expect(params.get('q')).toBe('natural language processing');
    expect(params.get('emb')).toBe('1');

    const rows = [...document.querySelectorAll('li.result')];
    expect(rows.map((r) => (r as HTMLElement).dataset.author)).toEqual(
      (golden as { results: { author: string }[] }).results.map((r) => r.author),
    );
  });

  it('clicking a suggestion chip appends the term and re-queries', async () => {
    const searches: string[] = [];
    vi.stubGlobal(
      'fetch',
      vi.fn(async (url: string) => {
        if (url.includes('/suggest')) return jsonResponse(suggestGolden);
        searches.push(url);
        return jsonResponse(golden);
      }),
    );
    setupApp();

    const query = document.getElementById('query') as HTMLInputElement;
    query.value = 'machine learning';
    (document.getElementById('search-form') as HTMLFormElement).dispatchEvent(
      new Event('submit', { cancelable: true }),
    );
    await flush();

    const chip = document.querySelector<HTMLButtonElement>('.chip.suggestion');
    expect(chip).not.toBeNull();
    const term = chip!.textContent!;
    chip!.click();
    await flush();

    expect(query.value).toBe(`machine learning ${term}`);
    const last = new URLSearchParams(searches[searches.length - 1].split('?')[1]);
    expect(last.get('q')).toBe(`machine learning ${term}`);
  });

  it('facet change re-issues the request with the mapped parameter', async () => {
    const searches: string[] = [];
    vi.stubGlobal(
      'fetch',
      vi.fn(async (url: string) => {
        if (url.includes('/suggest')) return jsonResponse(suggestGolden);
        searches.push(url);
        return jsonResponse(golden);
      }),
    );
    setupApp();

    (document.getElementById('query') as HTMLInputElement).value = 'verification';
    (document.getElementById('post-mode') as HTMLSelectElement).value = 'exclude';
    (document.getElementById('post-values') as HTMLInputElement).value = 'professor';
    (document.getElementById('post-values') as HTMLInputElement).dispatchEvent(new Event('change'));
    await flush();

    const last = new URLSearchParams(searches[searches.length - 1].split('?')[1]);
    expect(last.getAll('post_out')).toEqual(['professor']);
  });

  it('network failure shows the unreachable banner', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn(async () => {
        throw new TypeError('network down');
      }),
    );
    setupApp();

    (document.getElementById('query') as HTMLInputElement).value = 'anything';
    (document.getElementById('search-form') as HTMLFormElement).dispatchEvent(
      new Event('submit', { cancelable: true }),
    );
    await flush();

    expect(document.querySelector('.error-banner')?.textContent).toBe('service unreachable');
  });
});
