import { readFileSync, writeFileSync } from "fs";

import { numericColumn, readCsv, requireColumns, SchemaError, Table } from "./csv.js";
import { decayFit } from "./fit.js";
import { Chart, colormap, extent, formatTick, Scale } from "./svg.js";

export type FigureKind =
  | "decay"
  | "ksweep"
  | "ingham"
  | "zygmund"
  | "control"
  | "density"
  | "directions";

export const FIGURE_KINDS: FigureKind[] = [
  "decay",
  "ksweep",
  "ingham",
  "zygmund",
  "control",
  "density",
  "directions",
];

export interface FigureJob {
  kind: FigureKind;
  input: string;
  output: string;
  /** companion JSON report (decay fit overlay parameters) */
  json?: string;
  logY?: boolean;
  fitOverlay?: boolean;
  title?: string;
}

const ZYGMUND_BOUND = Math.sqrt(5);

function logRange(values: number[]): [number, number] {
  const positive = values.filter((v) => v > 0);
  if (positive.length === 0) throw new SchemaError("no positive values for a log axis");
  return extent(positive);
}

export function renderDecay(table: Table, job: FigureJob): string {
  const [ti, ni] = requireColumns(table, ["t", "norm"], "decay");
  const ts = numericColumn(table, ti);
  const norms = numericColumn(table, ni);
  const logY = job.logY !== false;
  const chart = new Chart();
  const x = chart.xScale(extent(ts));
  const y = chart.yScale(logY ? logRange(norms) : extent(norms, 0.05), logY);
  chart.title(job.title ?? "trajectory norm with exponential fit");
  chart.axes(x, y, "t", logY ? "norm (log)" : "norm");
  chart.line(ts, norms, x, y, { stroke: "#1f77b4" }, "norm");
  if (job.fitOverlay !== false) {
    let rate: number;
    let prefactor: number;
    if (job.json) {
      const report = JSON.parse(readFileSync(job.json, "utf-8"));
      rate = Number(report.rate);
      prefactor = Number(report.prefactor);
      if (!Number.isFinite(rate) || !Number.isFinite(prefactor)) {
        throw new SchemaError(`${job.json}: expected numeric 'rate' and 'prefactor'`);
      }
    } else {
      const fit = decayFit(ts, norms);
      rate = fit.rate;
      prefactor = fit.prefactor;
    }
    const overlay = ts.map((t) => prefactor * Math.exp(-rate * t));
    chart.line(ts, overlay, x, y, { stroke: "#d62728", dash: "6 4" }, "C exp(-c t)");
    const fitStats = decayFit(ts, norms);
    chart.annotate(
      `c = ${formatTick(rate)}, C = ${formatTick(prefactor)}, ` +
        `log-fit R^2 = ${fitStats.r2.toFixed(6)}`,
      chart.plotLeft + 10,
      chart.plotBottom - 10
    );
  }
  return chart.render();
}

export function renderKsweep(table: Table, job: FigureJob): string {
  const [li, ki] = requireColumns(table, ["lambda_max", "K"], "ksweep");
  const lams = numericColumn(table, li);
  const ks = numericColumn(table, ki);
  const chart = new Chart();
  const x = chart.xScale(logRange(lams), true);
  const spanRatio = Math.max(...ks) / Math.max(Math.min(...ks), 1e-300);
  const logY = job.logY ?? spanRatio > 50;
  const y = chart.yScale(logY ? logRange(ks) : extent(ks, 0.08), logY);
  chart.title(job.title ?? "observability constant vs frequency cutoff");
  chart.axes(x, y, "lambda_max (log)", logY ? "K (log)" : "K");
  chart.line(lams, ks, x, y, { stroke: "#1f77b4", markers: true }, "K(lambda_max)");
  return chart.render();
}

export function renderIngham(table: Table, job: FigureJob): string {
  const [ti, bi] = requireColumns(table, ["T", "B"], "ingham");
  const ts = numericColumn(table, ti);
  const bs = numericColumn(table, bi);
  const chart = new Chart();
  const x = chart.xScale(extent(ts));
  const y = chart.yScale(extent(bs.concat([0]), 0.05));
  chart.title(job.title ?? "Ingham lower constant B(T)");
  chart.axes(x, y, "T", "B");
  chart.hline(0, y, { stroke: "#999", width: 1 });
  chart.line(ts, bs, x, y, { stroke: "#2ca02c", markers: true }, "B(T)");
  return chart.render();
}

export function renderZygmund(table: Table, job: FigureJob): string {
  const [li, ri] = requireColumns(table, ["lambda", "max_ratio"], "zygmund");
  const lams = numericColumn(table, li);
  const ratios = numericColumn(table, ri);
  const chart = new Chart();
  const x = chart.xScale(extent(lams, 0.02));
  const y = chart.yScale(extent(ratios.concat([1.0, ZYGMUND_BOUND]), 0.05));
  chart.title(job.title ?? "L4/L2 ratios on lattice circles");
  chart.axes(x, y, "lambda", "max ratio over trials");
  chart.scatter(lams, ratios, x, y, { fill: "#1f77b4" }, "max ratio");
  chart.hline(ZYGMUND_BOUND, y, { stroke: "#d62728", dash: "6 4" }, "sqrt(5) bound");
  return chart.render();
}

export function renderControl(table: Table, job: FigureJob): string {
  const [ti, ui, fi] = requireColumns(table, ["t", "u_norm", "f_norm"], "control");
  const ts = numericColumn(table, ti);
  const us = numericColumn(table, ui);
  const fs = numericColumn(table, fi);
  const chart = new Chart();
  const x = chart.xScale(extent(ts));
  const logY = job.logY === true;
  const all = us.concat(fs);
  const y = chart.yScale(logY ? logRange(all) : extent(all.concat([0]), 0.05), logY);
  chart.title(job.title ?? "controlled trajectory and control magnitude");
  chart.axes(x, y, "t", logY ? "norm (log)" : "norm");
  chart.line(ts, us, x, y, { stroke: "#1f77b4" }, "|u(t)|");
  chart.line(ts, fs, x, y, { stroke: "#ff7f0e", dash: "4 3" }, "|f(t)|");
  return chart.render();
}

export function renderDensity(table: Table, job: FigureJob): string {
  const [xi, yi, di] = requireColumns(table, ["x", "y", "density"], "density");
  const xs = numericColumn(table, xi);
  const ys = numericColumn(table, yi);
  const ds = numericColumn(table, di);
  const xu = Array.from(new Set(xs)).sort((a, b) => a - b);
  const yu = Array.from(new Set(ys)).sort((a, b) => a - b);
  if (xu.length * yu.length !== ds.length) {
    throw new SchemaError(
      `${table.source}: expected a full grid (${xu.length} x ${yu.length} != ${ds.length} rows)`
    );
  }
  const [dLo, dHi] = extent(ds);
  const chart = new Chart(640, 560, { right: 96 });
  chart.title(job.title ?? "time-averaged density");
  const xIndex = new Map(xu.map((v, i) => [v, i]));
  const yIndex = new Map(yu.map((v, i) => [v, i]));
  const w = (chart.plotRight - chart.plotLeft) / xu.length;
  const h = (chart.plotBottom - chart.plotTop) / yu.length;
  for (let i = 0; i < ds.length; i++) {
    const cx = chart.plotLeft + (xIndex.get(xs[i]) ?? 0) * w;
    const cy = chart.plotBottom - ((yIndex.get(ys[i]) ?? 0) + 1) * h;
    const t = dHi > dLo ? (ds[i] - dLo) / (dHi - dLo) : 0.5;
    chart.raw(
      `<rect x="${cx.toFixed(2)}" y="${cy.toFixed(2)}" width="${(w + 0.5).toFixed(2)}" ` +
        `height="${(h + 0.5).toFixed(2)}" fill="${colormap(t)}"/>`
    );
  }
  chart.raw(
    `<rect x="${chart.plotLeft}" y="${chart.plotTop}" ` +
      `width="${chart.plotRight - chart.plotLeft}" ` +
      `height="${chart.plotBottom - chart.plotTop}" fill="none" stroke="#333"/>`
  );
  // colorbar
  const barX = chart.plotRight + 18;
  const steps = 64;
  const barH = (chart.plotBottom - chart.plotTop) / steps;
  for (let i = 0; i < steps; i++) {
    const t = 1 - i / (steps - 1);
    chart.raw(
      `<rect x="${barX}" y="${(chart.plotTop + i * barH).toFixed(2)}" width="14" ` +
        `height="${(barH + 0.5).toFixed(2)}" fill="${colormap(t)}"/>`
    );
  }
  chart.annotate(formatTick(dHi), barX + 18, chart.plotTop + 10);
  chart.annotate(formatTick(dLo), barX + 18, chart.plotBottom);
  chart.annotate("x", (chart.plotLeft + chart.plotRight) / 2, chart.plotBottom + 24);
  chart.annotate("y", chart.plotLeft - 20, (chart.plotTop + chart.plotBottom) / 2);
  return chart.render();
}

export function renderDirections(table: Table, job: FigureJob): string {
  const [pi, qi, mi] = requireColumns(table, ["p", "q", "mass"], "directions");
  const ps = numericColumn(table, pi);
  const qs = numericColumn(table, qi);
  const ms = numericColumn(table, mi);
  const order = ms
    .map((m, i) => [m, i] as [number, number])
    .sort((a, b) => b[0] - a[0])
    .slice(0, 24)
    .map(([, i]) => i);
  const chart = new Chart(Math.max(480, 64 + order.length * 34), 440);
  chart.title(job.title ?? "Fourier mass per primitive direction");
  const mMax = Math.max(...ms);
  const y = chart.yScale([0, mMax * 1.08]);
  const xStep = (chart.plotRight - chart.plotLeft) / Math.max(order.length, 1);
  chart.raw(
    `<rect x="${chart.plotLeft}" y="${chart.plotTop}" ` +
      `width="${chart.plotRight - chart.plotLeft}" ` +
      `height="${chart.plotBottom - chart.plotTop}" fill="none" stroke="#333"/>`
  );
  for (const v of y.ticks(5)) {
    const py = y.apply(v).toFixed(2);
    chart.raw(
      `<line x1="${chart.plotLeft - 5}" y1="${py}" x2="${chart.plotLeft}" y2="${py}" stroke="#333"/>` +
        `<text x="${chart.plotLeft - 8}" y="${Number(py) + 4}" text-anchor="end" font-size="11">${formatTick(v)}</text>`
    );
  }
  order.forEach((rowIdx, slot) => {
    const x0 = chart.plotLeft + slot * xStep + 0.15 * xStep;
    const barTop = y.apply(ms[rowIdx]);
    chart.raw(
      `<rect x="${x0.toFixed(2)}" y="${barTop.toFixed(2)}" width="${(0.7 * xStep).toFixed(2)}" ` +
        `height="${(chart.plotBottom - barTop).toFixed(2)}" fill="#1f77b4"/>`
    );
    const cx = x0 + 0.35 * xStep;
    chart.raw(
      `<text x="${cx.toFixed(2)}" y="${chart.plotBottom + 16}" text-anchor="end" font-size="10" ` +
        `transform="rotate(-45 ${cx.toFixed(2)} ${chart.plotBottom + 16})">` +
        `(${ps[rowIdx]},${qs[rowIdx]})</text>`
    );
  });
  chart.annotate("mass fraction", 10, chart.plotTop - 8);
  return chart.render();
}

const RENDERERS: Record<FigureKind, (table: Table, job: FigureJob) => string> = {
  decay: renderDecay,
  ksweep: renderKsweep,
  ingham: renderIngham,
  zygmund: renderZygmund,
  control: renderControl,
  density: renderDensity,
  directions: renderDirections,
};

/** Render a figure job to its SVG output file; returns the SVG text. */
export function render(job: FigureJob): string {
  const renderer = RENDERERS[job.kind];
  if (!renderer) {
    throw new SchemaError(
      `unknown figure kind '${job.kind}' (known: ${FIGURE_KINDS.join(", ")})`
    );
  }
  const table = readCsv(job.input);
  const svg = renderer(table, job);
  writeFileSync(job.output, svg);
  return svg;
}
