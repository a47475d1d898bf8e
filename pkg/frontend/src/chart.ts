// Inline SVG renderer for declarative plot documents.
//
// Series carry parallel x/y arrays; ordinates are numeric, abscissae may be
// text (categorical axis, used by bar charts). No external charting service:
// the document is rendered entirely client-side.

import { escapeHtml } from './html';
import { PlotDocument, PlotSeries } from './types';

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { top: 44, right: 24, bottom: 56, left: 72 };

const PALETTE = ['#2563eb', '#059669', '#d97706', '#dc2626', '#7c3aed', '#0d9488'];

interface Scale {
  (value: number): number;
}

function linearScale(min: number, max: number, from: number, to: number): Scale {
  const span = max - min || 1;
  return (value) => from + ((value - min) / span) * (to - from);
}

function niceTicks(min: number, max: number, count = 4): number[] {
  if (min === max) return [min];
  const step = (max - min) / count;
  return Array.from({ length: count + 1 }, (_, i) => min + i * step);
}

function formatTick(value: number): string {
  if (Math.abs(value) >= 1e5 || (value !== 0 && Math.abs(value) < 1e-3)) {
    return value.toExponential(0);
  }
  return String(Math.round(value * 1000) / 1000);
}

function isCategorical(series: PlotSeries[]): boolean {
  return series.some((s) => s.x.some((v) => typeof v === 'string'));
}

export function renderChart(plot: PlotDocument): string {
  const { layout, series } = plot;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const categorical = layout.kind === 'bar' || isCategorical(series);
  const categories = categorical ? series[0]?.x.map(String) ?? [] : [];

  const ys = series.flatMap((s) => s.y);
  let yMin = Math.min(...ys);
  let yMax = Math.max(...ys);
  if (layout.kind === 'bar') {
    // bars grow from the zero line
    yMin = Math.min(0, yMin);
    yMax = Math.max(0, yMax);
  }
  if (yMin === yMax) {
    yMin -= 1;
    yMax += 1;
  }
  const sy = linearScale(yMin, yMax, MARGIN.top + plotH, MARGIN.top);

  let xOf: (value: number | string, index: number) => number;
  if (categorical) {
    const slot = plotW / Math.max(1, categories.length);
    xOf = (_v, i) => MARGIN.left + slot * (i + 0.5);
  } else {
    const xs = series.flatMap((s) => s.x as number[]);
    const sx = linearScale(
      Math.min(...xs),
      Math.max(...xs),
      MARGIN.left,
      MARGIN.left + plotW,
    );
    xOf = (v) => sx(v as number);
  }

  const parts: string[] = [];
  parts.push(_frame(plotW, plotH));
  parts.push(_yAxis(yMin, yMax, sy, plotW));
  parts.push(
    categorical
      ? _categoryAxis(categories, xOf, plotH)
      : _numericAxis(series, plotH),
  );

  series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    if (layout.kind === 'bar') {
      parts.push(_bars(s, si, series.length, categories.length, color, sy, plotW));
    } else if (layout.kind === 'scatter') {
      parts.push(_points(s, color, xOf, sy));
    } else {
      parts.push(_line(s, color, xOf, sy));
    }
  });

  parts.push(
    `<text class="title" x="${WIDTH / 2}" y="24" text-anchor="middle">` +
      `${escapeHtml(layout.title)}</text>`,
    `<text class="x-label" x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 10}"` +
      ` text-anchor="middle">${escapeHtml(layout.x_label)}</text>`,
    `<text class="y-label" transform="rotate(-90)" x="${-(MARGIN.top + plotH / 2)}"` +
      ` y="18" text-anchor="middle">${escapeHtml(layout.y_label)}</text>`,
  );

  return (
    `<svg class="chart chart-${layout.kind}" data-plot-id="${escapeHtml(plot.plot_id)}"` +
    ` viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">` +
    parts.join('') +
    '</svg>'
  );
}

function _frame(plotW: number, plotH: number): string {
  return (
    `<rect class="plot-area" x="${MARGIN.left}" y="${MARGIN.top}"` +
    ` width="${plotW}" height="${plotH}" fill="none" stroke="#ccc"/>`
  );
}

function _yAxis(yMin: number, yMax: number, sy: Scale, plotW: number): string {
  return niceTicks(yMin, yMax)
    .map((tick) => {
      const y = sy(tick);
      return (
        `<line x1="${MARGIN.left}" x2="${MARGIN.left + plotW}" y1="${y}" y2="${y}"` +
        ` stroke="#eee"/>` +
        `<text class="tick" x="${MARGIN.left - 6}" y="${y + 4}" text-anchor="end">` +
        `${formatTick(tick)}</text>`
      );
    })
    .join('');
}

function _categoryAxis(
  categories: string[],
  xOf: (v: number | string, i: number) => number,
  plotH: number,
): string {
  const y = MARGIN.top + plotH + 16;
  return categories
    .map(
      (c, i) =>
        `<text class="tick category" x="${xOf(c, i)}" y="${y}" text-anchor="middle">` +
        `${escapeHtml(c)}</text>`,
    )
    .join('');
}

function _numericAxis(series: PlotSeries[], plotH: number): string {
  const xs = series.flatMap((s) => s.x as number[]);
  const min = Math.min(...xs);
  const max = Math.max(...xs);
  const y = MARGIN.top + plotH + 16;
  return (
    `<text class="tick" x="${MARGIN.left}" y="${y}" text-anchor="start">` +
    `${formatTick(min)}</text>` +
    `<text class="tick" x="${WIDTH - MARGIN.right}" y="${y}" text-anchor="end">` +
    `${formatTick(max)}</text>`
  );
}

function _line(
  s: PlotSeries,
  color: string,
  xOf: (v: number | string, i: number) => number,
  sy: Scale,
): string {
  const points = s.x
    .map((v, i) => `${xOf(v, i).toFixed(1)},${sy(s.y[i]).toFixed(1)}`)
    .join(' ');
  return (
    `<polyline class="series" data-name="${escapeHtml(s.name)}" points="${points}"` +
    ` fill="none" stroke="${color}" stroke-width="2"/>`
  );
}

function _points(
  s: PlotSeries,
  color: string,
  xOf: (v: number | string, i: number) => number,
  sy: Scale,
): string {
  return s.x
    .map(
      (v, i) =>
        `<circle class="series" data-name="${escapeHtml(s.name)}"` +
        ` cx="${xOf(v, i).toFixed(1)}" cy="${sy(s.y[i]).toFixed(1)}" r="3.5"` +
        ` fill="${color}"/>`,
    )
    .join('');
}

function _bars(
  s: PlotSeries,
  seriesIndex: number,
  seriesCount: number,
  categoryCount: number,
  color: string,
  sy: Scale,
  plotW: number,
): string {
  const slot = plotW / Math.max(1, categoryCount);
  const band = slot * 0.7;
  const barW = band / seriesCount;
  const baseline = sy(0);
  return s.y
    .map((value, i) => {
      const x = MARGIN.left + slot * i + (slot - band) / 2 + barW * seriesIndex;
      const top = Math.min(sy(value), baseline);
      const height = Math.abs(sy(value) - baseline);
      return (
        `<rect class="series bar" data-name="${escapeHtml(s.name)}"` +
        ` x="${x.toFixed(1)}" y="${top.toFixed(1)}"` +
        ` width="${barW.toFixed(1)}" height="${height.toFixed(1)}" fill="${color}"/>`
      );
    })
    .join('');
}
