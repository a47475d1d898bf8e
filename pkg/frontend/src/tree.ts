// Hierarchical data view: incremental search over nested key/value maps.
//
// A node survives a query when its key, its value, or any descendant matches
// case-insensitively. Matched subtrees auto-expand; an empty query restores
// the full collapsed tree. Collapsed branches render without their children,
// so the rendered markup contains exactly the visible nodes.

import { escapeHtml } from './html';
import { Tree } from './types';

export interface TreeNode {
  key: string;
  value: string | null; // null marks a branch
  children: TreeNode[];
  expanded: boolean;
}

export function toNodes(tree: Tree): TreeNode[] {
  return Object.entries(tree).map(([key, value]) =>
    typeof value === 'string'
      ? { key, value, children: [], expanded: false }
      : { key, value: null, children: toNodes(value), expanded: false },
  );
}

function matchesSelf(node: TreeNode, needle: string): boolean {
  if (node.key.toLowerCase().includes(needle)) return true;
  return node.value !== null && node.value.toLowerCase().includes(needle);
}

function clone(node: TreeNode, expanded: boolean): TreeNode {
  return {
    key: node.key,
    value: node.value,
    children: node.children.map((c) => clone(c, expanded)),
    expanded,
  };
}

export function filterTree(nodes: TreeNode[], query: string): TreeNode[] {
  const needle = query.trim().toLowerCase();
  if (!needle) {
    return nodes.map((n) => clone(n, false));
  }
  const kept: TreeNode[] = [];
  for (const node of nodes) {
    if (matchesSelf(node, needle)) {
      // the whole sub-dictionary contains the search string: present it
      kept.push({ ...clone(node, false), expanded: true });
      continue;
    }
    const children = filterTree(node.children, needle);
    if (children.length > 0) {
      kept.push({ key: node.key, value: node.value, children, expanded: true });
    }
  }
  return kept;
}

export function expandAll(nodes: TreeNode[]): TreeNode[] {
  return nodes.map((n) => clone(n, true));
}

export function countLeaves(nodes: TreeNode[]): number {
  let n = 0;
  for (const node of nodes) {
    if (node.value !== null) n += 1;
    else n += countLeaves(node.children);
  }
  return n;
}

export function renderTree(nodes: TreeNode[]): string {
  if (nodes.length === 0) {
    return '<p class="tree-empty">no matching data</p>';
  }
  return `<ul class="tree">${nodes.map(renderNode).join('')}</ul>`;
}

function renderNode(node: TreeNode): string {
  const key = escapeHtml(node.key);
  if (node.value !== null) {
    return (
      `<li class="leaf" data-key="${key}">` +
      `<span class="key">${key}</span>` +
      `<span class="value">${escapeHtml(node.value)}</span></li>`
    );
  }
  if (!node.expanded) {
    return `<li class="branch collapsed" data-key="${key}"><span class="key">${key}</span></li>`;
  }
  const children = node.children.map(renderNode).join('');
  return (
    `<li class="branch expanded" data-key="${key}">` +
    `<span class="key">${key}</span><ul>${children}</ul></li>`
  );
}
