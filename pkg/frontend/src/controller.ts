// State transitions and API calls for the material page, DOM-free.

import { ApiClient, ApiError } from './api';
import {
  PageState,
  initialState,
  loadDoc,
  markNotFound,
  selectContribution,
  toggleProject,
} from './page';
import { TableView, defaultView } from './table';
import { Visibility } from './types';

export class MaterialPageController {
  state: PageState;

  constructor(
    private readonly client: ApiClient,
    private readonly onChange: (state: PageState) => void = () => {},
  ) {
    this.state = initialState('');
  }

  private update(state: PageState): void {
    this.state = state;
    this.onChange(state);
  }

  async load(materialKey: string): Promise<void> {
    this.update(initialState(materialKey));
    await this.refresh();
  }

  /** Re-fetch the material without resetting toggles or searches. */
  async refresh(): Promise<void> {
    try {
      const doc = await this.client.getMaterial(this.state.materialKey);
      this.update(loadDoc(this.state, doc));
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.update(markNotFound(this.state));
        return;
      }
      throw error;
    }
  }

  setTreeQuery(query: string): void {
    this.update({ ...this.state, treeQuery: query });
  }

  setTableView(name: string, patch: Partial<TableView>): void {
    const current = this.state.tableViews[name] ?? defaultView();
    this.update({
      ...this.state,
      tableViews: { ...this.state.tableViews, [name]: { ...current, ...patch } },
    });
  }

  toggleProject(project: string): void {
    this.update(toggleProject(this.state, project));
  }

  select(cid: string): void {
    this.update(selectContribution(this.state, cid));
  }

  /** Flip visibility; ignored while another PATCH is in flight. */
  async setVisibility(cid: string, visibility: Visibility): Promise<boolean> {
    if (this.state.patching) return false;
    this.update({ ...this.state, patching: true });
    try {
      await this.client.setVisibility(cid, visibility);
      await this.refresh();
    } finally {
      this.update({ ...this.state, patching: false });
    }
    return true;
  }
}
