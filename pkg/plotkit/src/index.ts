export { parseCsvText, readCsv, requireColumns, numericColumn, SchemaError, EmptyDataError } from "./csv.js";
export type { Table } from "./csv.js";
export { linearFit, decayFit } from "./fit.js";
export type { LinearFit } from "./fit.js";
export { Chart, Scale, colormap, extent, formatTick } from "./svg.js";
export {
  FIGURE_KINDS,
  render,
  renderControl,
  renderDecay,
  renderDensity,
  renderDirections,
  renderIngham,
  renderKsweep,
  renderZygmund,
} from "./figures.js";
export type { FigureJob, FigureKind } from "./figures.js";
export { main, parseArgs } from "./cli.js";
