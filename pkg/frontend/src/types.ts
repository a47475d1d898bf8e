// Wire types for the /api/v1 JSON endpoints.

export type PlotKind = 'line' | 'bar' | 'scatter';

export interface PlotLayout {
  title: string;
  x_label: string;
  y_label: string;
  kind: PlotKind;
}

export interface PlotSeries {
  name: string;
  x: (number | string)[];
  y: number[];
}

export interface PlotDocument {
  plot_id: string;
  layout: PlotLayout;
  series: PlotSeries[];
  source_hash: string;
}

export interface TableDocument {
  columns: string[];
  rows: (number | string)[][];
}

// Hierarchical key/value data: nested maps with string leaves.
export type Tree = { [key: string]: string | Tree };

export interface Reference {
  kind: string;
  value: string;
  display?: string;
  warning?: boolean;
}

export type Visibility = 'public' | 'private';

export interface ContributionEntry {
  cid: string;
  visibility: Visibility;
  tree: Tree;
  tables: Record<string, TableDocument>;
  plots: PlotDocument[];
  references: Reference[];
}

export interface MaterialDoc {
  material_key: string;
  projects: Record<string, ContributionEntry[]>;
  built_at: string;
}

export function displayCid(cid: string): string {
  return cid.slice(0, 7);
}
