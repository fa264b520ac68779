/** Minimal deterministic SVG chart toolkit (no DOM, no dependencies). */

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const DEFAULT_MARGINS: Margins = { top: 44, right: 24, bottom: 52, left: 72 };

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) return v.toExponential(1).replace("e+", "e");
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

function niceStep(span: number, target: number): number {
  const raw = span / Math.max(target, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

export class Scale {
  readonly log: boolean;
  private d0: number;
  private d1: number;

  constructor(
    domain: [number, number],
    readonly range: [number, number],
    log = false
  ) {
    this.log = log;
    let [a, b] = domain;
    if (log) {
      if (a <= 0 || b <= 0) throw new Error("log scale needs a positive domain");
      a = Math.log10(a);
      b = Math.log10(b);
    }
    if (a === b) {
      a -= 0.5;
      b += 0.5;
    }
    this.d0 = a;
    this.d1 = b;
  }

  apply(v: number): number {
    const t = this.log ? Math.log10(v) : v;
    const f = (t - this.d0) / (this.d1 - this.d0);
    return this.range[0] + f * (this.range[1] - this.range[0]);
  }

  ticks(count = 5): number[] {
    if (this.log) {
      const lo = Math.ceil(this.d0 - 1e-9);
      const hi = Math.floor(this.d1 + 1e-9);
      const decades: number[] = [];
      for (let k = lo; k <= hi; k++) decades.push(Math.pow(10, k));
      if (decades.length >= 2) return decades;
      // narrow log range: fall back to linear ticks inside the domain
      const lin = new Scale(
        [Math.pow(10, this.d0), Math.pow(10, this.d1)],
        this.range,
        false
      );
      return lin.ticks(count).filter((t) => t > 0);
    }
    const step = niceStep(this.d1 - this.d0, count);
    const start = Math.ceil(this.d0 / step) * step;
    // index-based stepping: immune to step underflowing the domain's ulp
    // (v += step stalls when step < ulp(v), e.g. a data range of a few ulps)
    const n = Math.floor((this.d1 + 1e-9 * step - start) / step);
    const out: number[] = [];
    for (let i = 0; i <= Math.min(n, 1000); i++) {
      const v = start + i * step;
      out.push(Math.abs(v) < 1e-12 * step ? 0 : v);
    }
    return out;
  }
}

export function extent(values: number[], padFraction = 0.0): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("no finite values to scale");
  }
  const pad = (hi - lo) * padFraction;
  return [lo - pad, hi + pad];
}

function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface SeriesStyle {
  stroke?: string;
  dash?: string;
  width?: number;
  markers?: boolean;
  fill?: string;
}

export class Chart {
  readonly margins: Margins;
  private parts: string[] = [];
  private legends: { label: string; style: SeriesStyle }[] = [];

  constructor(
    readonly width = 720,
    readonly height = 480,
    margins: Partial<Margins> = {}
  ) {
    this.margins = { ...DEFAULT_MARGINS, ...margins };
  }

  get plotLeft(): number {
    return this.margins.left;
  }

  get plotRight(): number {
    return this.width - this.margins.right;
  }

  get plotTop(): number {
    return this.margins.top;
  }

  get plotBottom(): number {
    return this.height - this.margins.bottom;
  }

  xScale(domain: [number, number], log = false): Scale {
    return new Scale(domain, [this.plotLeft, this.plotRight], log);
  }

  yScale(domain: [number, number], log = false): Scale {
    return new Scale(domain, [this.plotBottom, this.plotTop], log);
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  title(text: string): void {
    this.parts.push(
      `<text x="${this.width / 2}" y="22" text-anchor="middle" ` +
        `font-size="15" font-weight="bold">${escapeText(text)}</text>`
    );
  }

  axes(
    x: Scale,
    y: Scale,
    xLabel: string,
    yLabel: string,
    xTickFormat: (v: number) => string = formatTick
  ): void {
    const { plotLeft: l, plotRight: r, plotTop: t, plotBottom: b } = this;
    this.parts.push(
      `<rect x="${l}" y="${t}" width="${r - l}" height="${b - t}" ` +
        `fill="none" stroke="#333" stroke-width="1"/>`
    );
    for (const v of x.ticks(6)) {
      const px = x.apply(v);
      if (px < l - 1e-6 || px > r + 1e-6) continue;
      this.parts.push(
        `<line x1="${px.toFixed(2)}" y1="${b}" x2="${px.toFixed(2)}" y2="${b + 5}" stroke="#333"/>`,
        `<line x1="${px.toFixed(2)}" y1="${t}" x2="${px.toFixed(2)}" y2="${b}" stroke="#ddd" stroke-width="0.5"/>`,
        `<text x="${px.toFixed(2)}" y="${b + 18}" text-anchor="middle" font-size="11">${escapeText(
          xTickFormat(v)
        )}</text>`
      );
    }
    for (const v of y.ticks(6)) {
      const py = y.apply(v);
      if (py < t - 1e-6 || py > b + 1e-6) continue;
      this.parts.push(
        `<line x1="${l - 5}" y1="${py.toFixed(2)}" x2="${l}" y2="${py.toFixed(2)}" stroke="#333"/>`,
        `<line x1="${l}" y1="${py.toFixed(2)}" x2="${r}" y2="${py.toFixed(2)}" stroke="#ddd" stroke-width="0.5"/>`,
        `<text x="${l - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11">${escapeText(
          formatTick(v)
        )}</text>`
      );
    }
    this.parts.push(
      `<text x="${(l + r) / 2}" y="${this.height - 12}" text-anchor="middle" font-size="13">${escapeText(xLabel)}</text>`,
      `<text x="18" y="${(t + b) / 2}" text-anchor="middle" font-size="13" ` +
        `transform="rotate(-90 18 ${(t + b) / 2})">${escapeText(yLabel)}</text>`
    );
  }

  line(
    xs: number[],
    ys: number[],
    x: Scale,
    y: Scale,
    style: SeriesStyle = {},
    label?: string
  ): void {
    const stroke = style.stroke ?? "#1f77b4";
    const width = style.width ?? 1.8;
    const dash = style.dash ? ` stroke-dasharray="${style.dash}"` : "";
    const points: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (y.log && ys[i] <= 0) continue;
      points.push(`${x.apply(xs[i]).toFixed(2)},${y.apply(ys[i]).toFixed(2)}`);
    }
    this.parts.push(
      `<polyline points="${points.join(" ")}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${width}"${dash}/>`
    );
    if (style.markers) this.scatter(xs, ys, x, y, { ...style, stroke });
    if (label) this.legends.push({ label, style: { ...style, stroke } });
  }

  scatter(
    xs: number[],
    ys: number[],
    x: Scale,
    y: Scale,
    style: SeriesStyle = {},
    label?: string
  ): void {
    const fill = style.fill ?? style.stroke ?? "#1f77b4";
    for (let i = 0; i < xs.length; i++) {
      if (y.log && ys[i] <= 0) continue;
      this.parts.push(
        `<circle cx="${x.apply(xs[i]).toFixed(2)}" cy="${y.apply(ys[i]).toFixed(2)}" ` +
          `r="3" fill="${fill}"/>`
      );
    }
    if (label) this.legends.push({ label, style: { ...style, stroke: fill } });
  }

  hline(value: number, y: Scale, style: SeriesStyle = {}, label?: string): void {
    const stroke = style.stroke ?? "#d62728";
    const py = y.apply(value).toFixed(2);
    this.parts.push(
      `<line x1="${this.plotLeft}" y1="${py}" x2="${this.plotRight}" y2="${py}" ` +
        `stroke="${stroke}" stroke-width="${style.width ?? 1.4}"` +
        `${style.dash ? ` stroke-dasharray="${style.dash}"` : ""}/>`
    );
    if (label) this.legends.push({ label, style: { ...style, stroke } });
  }

  annotate(text: string, xPx: number, yPx: number): void {
    this.parts.push(
      `<text x="${xPx}" y="${yPx}" font-size="12" fill="#333">${escapeText(text)}</text>`
    );
  }

  render(): string {
    const legendParts: string[] = [];
    let ly = this.plotTop + 14;
    for (const { label, style } of this.legends) {
      const lx = this.plotRight - 170;
      legendParts.push(
        `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" ` +
          `stroke="${style.stroke}" stroke-width="${style.width ?? 1.8}"` +
          `${style.dash ? ` stroke-dasharray="${style.dash}"` : ""}/>`,
        `<text x="${lx + 28}" y="${ly}" font-size="12">${escapeText(label)}</text>`
      );
      ly += 17;
    }
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
      `font-family="Helvetica, Arial, sans-serif">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n" +
      legendParts.join("\n") +
      "\n</svg>\n"
    );
  }
}

/** Five-stop approximation of a perceptually ordered colormap. */
const COLOR_STOPS: [number, number, number][] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export function colormap(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (COLOR_STOPS.length - 1);
  const i = Math.min(COLOR_STOPS.length - 2, Math.floor(pos));
  const f = pos - i;
  const c0 = COLOR_STOPS[i];
  const c1 = COLOR_STOPS[i + 1];
  const mix = c0.map((v, k) => Math.round(v + f * (c1[k] - v)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}
