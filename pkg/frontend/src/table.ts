// Tabular data view: substring search across all cells plus pagination.

import { escapeHtml } from './html';
import { TableDocument } from './types';

export const DEFAULT_PAGE_SIZE = 10;

export interface TableView {
  query: string;
  page: number; // zero-based
  pageSize: number;
}

export function defaultView(): TableView {
  return { query: '', page: 0, pageSize: DEFAULT_PAGE_SIZE };
}

export function filterRows(
  table: TableDocument,
  query: string,
): (number | string)[][] {
  const needle = query.trim().toLowerCase();
  if (!needle) return table.rows;
  return table.rows.filter((row) =>
    row.some((cell) => String(cell).toLowerCase().includes(needle)),
  );
}

export function pageCount(rowCount: number, pageSize: number): number {
  return Math.max(1, Math.ceil(rowCount / pageSize));
}

export function clampPage(page: number, pages: number): number {
  return Math.min(Math.max(page, 0), pages - 1);
}

export function visibleRows(
  table: TableDocument,
  view: TableView,
): (number | string)[][] {
  const rows = filterRows(table, view.query);
  const pages = pageCount(rows.length, view.pageSize);
  const page = clampPage(view.page, pages);
  return rows.slice(page * view.pageSize, (page + 1) * view.pageSize);
}

export function renderTable(
  name: string,
  table: TableDocument,
  view: TableView,
): string {
  const rows = filterRows(table, view.query);
  const pages = pageCount(rows.length, view.pageSize);
  const page = clampPage(view.page, pages);
  const slice = rows.slice(page * view.pageSize, (page + 1) * view.pageSize);

  const head = table.columns
    .map((c) => `<th>${escapeHtml(c)}</th>`)
    .join('');
  const body = slice
    .map(
      (row) =>
        `<tr>${row.map((cell) => `<td>${escapeHtml(String(cell))}</td>`).join('')}</tr>`,
    )
    .join('');
  return (
    `<section class="table-view" data-table="${escapeHtml(name)}">` +
    `<h4>${escapeHtml(name)}</h4>` +
    `<input class="table-search" data-table="${escapeHtml(name)}" type="search"` +
    ` placeholder="search rows" value="${escapeHtml(view.query)}">` +
    `<div class="table-scroll"><table><thead><tr>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table></div>` +
    `<nav class="pager" data-table="${escapeHtml(name)}">` +
    `<button class="prev" ${page === 0 ? 'disabled' : ''}>prev</button>` +
    `<span class="page-info">page ${page + 1} of ${pages}</span>` +
    `<button class="next" ${page >= pages - 1 ? 'disabled' : ''}>next</button>` +
    `</nav></section>`
  );
}
