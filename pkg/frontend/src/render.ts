// DOM rendering. The result list is a pure projection of the service payload:
// rows appear in payload order, scores are printed as received, and the
// explanation vector is the primary row content.

import type { ResultRow, SearchPayload } from './api';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function isBigram(feature: string): boolean {
  return feature.includes(' ');
}

function renderRow(row: ResultRow): HTMLElement {
  const item = el('li', 'result');
  item.dataset.author = row.author;

  const head = el('div', 'result-head');
  head.appendChild(el('span', 'result-name', row.name));
  head.appendChild(el('span', 'result-affiliation', `${row.department} / ${row.post}`));
  for (const tag of row.provenance) {
    head.appendChild(el('span', `badge badge-${tag}`, tag));
  }
  item.appendChild(head);

  const chips = el('div', 'explanation');
  for (const feature of row.explanation) {
    chips.appendChild(el('span', isBigram(feature) ? 'chip bigram' : 'chip unigram', feature));
  }
  item.appendChild(chips);

  const scores = el('div', 'scores');
  scores.appendChild(el('span', 'score score-se', `S_E ${row.s_e}`));
  scores.appendChild(el('span', 'score score-sa', `S_A ${row.s_a}`));
  item.appendChild(scores);
  return item;
}

export function renderResults(container: HTMLElement, payload: SearchPayload): void {
  container.replaceChildren();
  if (payload.diagnostic) {
    container.appendChild(el('p', 'diagnostic', payload.diagnostic));
  }
  const list = el('ol', 'results');
  for (const row of payload.results) {
    list.appendChild(renderRow(row));
  }
  container.appendChild(list);
  container.appendChild(
    el('p', 'result-count', `${payload.results.length} of ${payload.total} results`),
  );
}

export function renderError(container: HTMLElement, message: string): void {
  container.replaceChildren();
  container.appendChild(el('p', 'error-banner', message));
}

export function renderSuggestions(
  container: HTMLElement,
  terms: string[],
  onPick: (term: string) => void,
): void {
  container.replaceChildren();
  for (const term of terms) {
    const chip = el('button', 'chip suggestion', term);
    chip.type = 'button';
    chip.addEventListener('click', () => onPick(term));
    container.appendChild(chip);
  }
}
