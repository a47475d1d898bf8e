// Browser shell: hash routing, event delegation, settings panel.
//
// Everything testable lives in the imported modules; this file only wires
// events to the controller and swaps rendered HTML into the page.

import { ApiClient } from './api';
import { MaterialPageController } from './controller';
import { renderPage } from './page';
import { DEFAULT_PAGE_SIZE, clampPage, filterRows, pageCount } from './table';
import { Visibility } from './types';

const root = document.getElementById('app');
const keyInput = document.getElementById('api-key') as HTMLInputElement | null;
const materialInput = document.getElementById('material') as HTMLInputElement | null;

const client = new ApiClient('');
const controller = new MaterialPageController(client, (state) => {
  if (root) root.innerHTML = renderPage(state);
});

function currentMaterial(): string {
  const hash = window.location.hash.replace(/^#\/?/, '');
  return hash || 'mp-1';
}

async function navigate(): Promise<void> {
  const key = currentMaterial();
  if (materialInput) materialInput.value = key;
  await controller.load(key);
}

window.addEventListener('hashchange', () => void navigate());

keyInput?.addEventListener('change', () => {
  // held in memory only; navigating away forgets it
  client.setApiKey(keyInput.value || undefined);
  void controller.refresh();
});

materialInput?.addEventListener('change', () => {
  window.location.hash = `#/${materialInput.value.trim()}`;
});

root?.addEventListener('click', (event) => {
  const target = event.target as HTMLElement;
  const chip = target.closest<HTMLElement>('.chip');
  if (chip?.dataset.project) {
    controller.toggleProject(chip.dataset.project);
    return;
  }
  const contribution = target.closest<HTMLElement>('.contribution');
  if (contribution?.dataset.cid) {
    controller.select(contribution.dataset.cid);
    return;
  }
  const toggle = target.closest<HTMLElement>('.visibility-toggle');
  if (toggle?.dataset.cid) {
    void controller.setVisibility(
      toggle.dataset.cid,
      toggle.dataset.visibility as Visibility,
    );
    return;
  }
  const pagerButton = target.closest<HTMLElement>('.pager button');
  if (pagerButton && !pagerButton.hasAttribute('disabled')) {
    const pager = pagerButton.closest<HTMLElement>('.pager');
    const name = pager?.dataset.table;
    if (!name) return;
    const entry = controllerEntryTable(name);
    if (!entry) return;
    const view = controller.state.tableViews[name] ?? {
      query: '',
      page: 0,
      pageSize: DEFAULT_PAGE_SIZE,
    };
    const pages = pageCount(filterRows(entry, view.query).length, view.pageSize);
    const delta = pagerButton.classList.contains('next') ? 1 : -1;
    controller.setTableView(name, { page: clampPage(view.page + delta, pages) });
  }
});

root?.addEventListener('input', (event) => {
  const target = event.target as HTMLInputElement;
  if (target.classList.contains('tree-search')) {
    controller.setTreeQuery(target.value);
    refocus('.tree-search');
    return;
  }
  if (target.classList.contains('table-search') && target.dataset.table) {
    controller.setTableView(target.dataset.table, {
      query: target.value,
      page: 0,
    });
    refocus(`.table-search[data-table="${CSS.escape(target.dataset.table)}"]`);
  }
});

function controllerEntryTable(name: string) {
  for (const [, entry] of Object.entries(controller.state.doc?.projects ?? {})) {
    for (const e of entry) {
      if (e.cid === controller.state.selectedCid && e.tables[name]) {
        return e.tables[name];
      }
    }
  }
  return null;
}

function refocus(selector: string): void {
  // innerHTML swaps drop focus; put the caret back at the end
  requestAnimationFrame(() => {
    const el = root?.querySelector<HTMLInputElement>(selector);
    if (el) {
      const n = el.value.length;
      el.focus();
      el.setSelectionRange(n, n);
    }
  });
}

void navigate();
