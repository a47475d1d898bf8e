// Material page: project chips, contribution toggles, plots, tree, tables.
//
// Private contributions carry an "incubation" badge and, since the API only
// returns private entries to their owning project, a release toggle. The
// page renders to an HTML string; the browser shell swaps it into the DOM.

import { renderChart } from './chart';
import { escapeHtml } from './html';
import { TableView, defaultView, renderTable } from './table';
import {
  TreeNode,
  countLeaves,
  expandAll,
  filterTree,
  renderTree,
  toNodes,
} from './tree';
import {
  ContributionEntry,
  MaterialDoc,
  Reference,
  displayCid,
} from './types';

export interface PageState {
  materialKey: string;
  doc: MaterialDoc | null;
  notFound: boolean;
  enabledProjects: Record<string, boolean>;
  selectedCid: string | null;
  // null until the search field is first edited: the initial tree renders
  // fully expanded, while a cleared search shows the full collapsed tree
  treeQuery: string | null;
  tableViews: Record<string, TableView>;
  patching: boolean;
}

export function initialState(materialKey: string): PageState {
  return {
    materialKey,
    doc: null,
    notFound: false,
    enabledProjects: {},
    selectedCid: null,
    treeQuery: null,
    tableViews: {},
    patching: false,
  };
}

export function loadDoc(state: PageState, doc: MaterialDoc): PageState {
  const enabledProjects: Record<string, boolean> = {};
  for (const project of Object.keys(doc.projects)) {
    enabledProjects[project] = state.enabledProjects[project] ?? true;
  }
  const next: PageState = {
    ...state,
    doc,
    notFound: false,
    enabledProjects,
  };
  const visible = visibleEntries(next);
  if (!visible.some(([, e]) => e.cid === next.selectedCid)) {
    next.selectedCid = visible[0]?.[1].cid ?? null;
  }
  return next;
}

export function markNotFound(state: PageState): PageState {
  return { ...state, doc: null, notFound: true, selectedCid: null };
}

export function toggleProject(state: PageState, project: string): PageState {
  const enabledProjects = {
    ...state.enabledProjects,
    [project]: !state.enabledProjects[project],
  };
  const next = { ...state, enabledProjects };
  const visible = visibleEntries(next);
  if (!visible.some(([, e]) => e.cid === next.selectedCid)) {
    next.selectedCid = visible[0]?.[1].cid ?? null;
  }
  return next;
}

export function selectContribution(state: PageState, cid: string): PageState {
  return { ...state, selectedCid: cid, tableViews: {}, treeQuery: null };
}

export function visibleEntries(
  state: PageState,
): [string, ContributionEntry][] {
  if (!state.doc) return [];
  const out: [string, ContributionEntry][] = [];
  for (const [project, entries] of Object.entries(state.doc.projects)) {
    if (!state.enabledProjects[project]) continue;
    for (const entry of entries) out.push([project, entry]);
  }
  return out;
}

export function selectedEntry(state: PageState): ContributionEntry | null {
  for (const [, entry] of visibleEntries(state)) {
    if (entry.cid === state.selectedCid) return entry;
  }
  return null;
}

// -- rendering ------------------------------------------------------------

export function renderPage(state: PageState): string {
  if (state.notFound) {
    return (
      `<div class="not-found"><h2>not found</h2>` +
      `<p>no material page for “${escapeHtml(state.materialKey)}”</p></div>`
    );
  }
  if (!state.doc) {
    return '<p class="loading">loading…</p>';
  }
  const doc = state.doc;
  const chips = Object.keys(doc.projects)
    .map(
      (project) =>
        `<button class="chip ${state.enabledProjects[project] ? 'enabled' : 'off'}"` +
        ` data-project="${escapeHtml(project)}">${escapeHtml(project)}</button>`,
    )
    .join('');

  const toggles = visibleEntries(state)
    .map(([project, entry]) => {
      const selected = entry.cid === state.selectedCid ? ' selected' : '';
      const badge =
        entry.visibility === 'private'
          ? ' <span class="badge incubation">incubation</span>'
          : '';
      return (
        `<button class="contribution${selected}" data-cid="${entry.cid}">` +
        `${displayCid(entry.cid)} <small>${escapeHtml(project)}</small>${badge}</button>`
      );
    })
    .join('');

  const entry = selectedEntry(state);
  return (
    `<header><h2>${escapeHtml(doc.material_key)}</h2>` +
    `<p class="built-at">built ${escapeHtml(doc.built_at)}</p></header>` +
    `<nav class="projects">${chips}</nav>` +
    `<nav class="contributions">${toggles}</nav>` +
    (entry ? renderEntry(state, entry) : '<p class="empty">nothing selected</p>')
  );
}

function renderEntry(state: PageState, entry: ContributionEntry): string {
  const plots = entry.plots
    .map(
      (p) =>
        `<figure class="plot">${renderChart(p)}` +
        `<a class="plot-download" download="${escapeHtml(p.plot_id)}.json"` +
        ` href="data:application/json,${encodeURIComponent(JSON.stringify(p))}">` +
        `download plot JSON</a></figure>`,
    )
    .join('');

  let nodes: TreeNode[] = toNodes(entry.tree);
  nodes = state.treeQuery === null ? expandAll(nodes) : filterTree(nodes, state.treeQuery);

  const tables = Object.entries(entry.tables)
    .map(([name, table]) =>
      renderTable(name, table, state.tableViews[name] ?? defaultView()),
    )
    .join('');

  const incubation =
    entry.visibility === 'private'
      ? `<div class="incubation-note"><span class="badge incubation">incubation</span>` +
        ` visible only to your project until released` +
        ` <button class="visibility-toggle" data-cid="${entry.cid}"` +
        ` data-visibility="public" ${state.patching ? 'disabled' : ''}>release publicly</button></div>`
      : `<div class="release-note"><button class="visibility-toggle" data-cid="${entry.cid}"` +
        ` data-visibility="private" ${state.patching ? 'disabled' : ''}>make private</button></div>`;

  return (
    `<article class="entry" data-cid="${entry.cid}">` +
    incubation +
    `<section class="plots">${plots}</section>` +
    `<section class="tree-panel">` +
    `<input class="tree-search" type="search" placeholder="search data"` +
    ` value="${escapeHtml(state.treeQuery ?? '')}">` +
    renderTree(nodes) +
    `<p class="leaf-count">${countLeaves(nodes)} entries</p>` +
    `</section>` +
    `<section class="tables">${tables}</section>` +
    `<section class="references">${renderReferences(entry.references)}</section>` +
    `</article>`
  );
}

function renderReferences(references: Reference[]): string {
  if (references.length === 0) return '';
  const items = references
    .map((ref) => {
      const text = escapeHtml(ref.display ?? ref.value);
      const link =
        ref.kind === 'url'
          ? `<a href="${escapeHtml(ref.value)}" rel="noopener">${text}</a>`
          : text;
      return `<li class="reference ${escapeHtml(ref.kind)}">${link}</li>`;
    })
    .join('');
  return `<ul>${items}</ul>`;
}
