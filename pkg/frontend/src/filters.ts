// Facet widget state. Each facet (department, position) has a mode select
// (any / include / exclude) and a comma-separated value box; together they
// map onto exactly one of the dept_in/dept_out (post_in/post_out) parameter
// pairs, so a facet can never send both sides at once.

import type { FacetFilters } from './api';

export type FacetMode = 'any' | 'include' | 'exclude';

export interface FacetWidget {
  mode: FacetMode;
  values: string;
}

export function parseValues(raw: string): string[] {
  return raw
    .split(',')
    .map((v) => v.trim())
    .filter((v) => v.length > 0);
}

export function toFilters(department: FacetWidget, position: FacetWidget): FacetFilters {
  const dept = parseValues(department.values);
  const post = parseValues(position.values);
  return {
    deptIn: department.mode === 'include' ? dept : [],
    deptOut: department.mode === 'exclude' ? dept : [],
    postIn: position.mode === 'include' ? post : [],
    postOut: position.mode === 'exclude' ? post : [],
  };
}
