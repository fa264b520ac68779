import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import {
  EmptyDataError,
  SchemaError,
  linearFit,
  main,
  parseArgs,
  parseCsvText,
  renderDecay,
  Scale,
} from "../src/index.js";

describe("csv parsing", () => {
  it("parses header and numeric rows", () => {
    const table = parseCsvText("t,norm\n0,1.0\n1,0.5\n");
    expect(table.columns).toEqual(["t", "norm"]);
    expect(table.rows).toEqual([
      [0, 1.0],
      [1, 0.5],
    ]);
  });

  it("rejects empty files and headers without rows", () => {
    expect(() => parseCsvText("", "x.csv")).toThrow(EmptyDataError);
    expect(() => parseCsvText("t,norm\n", "x.csv")).toThrow(/no data rows/);
  });

  it("names the missing column", () => {
    const table = parseCsvText("t,wrong\n0,1\n", "bad.csv");
    expect(() => renderDecay(table, { kind: "decay", input: "bad.csv", output: "o" }))
      .toThrow(/missing column 'norm'.*decay/);
  });

  it("rejects ragged rows and non-numeric cells", () => {
    expect(() => parseCsvText("a,b\n1\n", "r.csv")).toThrow(SchemaError);
    const table = parseCsvText("t,norm\n0,oops\n", "n.csv");
    expect(() =>
      renderDecay(table, { kind: "decay", input: "n.csv", output: "o" })
    ).toThrow(/non-numeric/);
  });
});

describe("linear fit", () => {
  it("recovers an exact line", () => {
    const xs = [0, 1, 2, 3, 4];
    const ys = xs.map((x) => 2.5 - 0.75 * x);
    const fit = linearFit(xs, ys);
    expect(fit.slope).toBeCloseTo(-0.75, 12);
    expect(fit.intercept).toBeCloseTo(2.5, 12);
    expect(fit.r2).toBeCloseTo(1.0, 12);
  });

  it("reports low r2 for scattered data", () => {
    const fit = linearFit([0, 1, 2, 3], [0, 5, -4, 1]);
    expect(fit.r2).toBeLessThan(0.5);
  });
});

describe("scales", () => {
  it("maps domains linearly and logarithmically", () => {
    const lin = new Scale([0, 10], [0, 100]);
    expect(lin.apply(5)).toBeCloseTo(50);
    const log = new Scale([1, 100], [0, 100], true);
    expect(log.apply(10)).toBeCloseTo(50);
    expect(() => new Scale([0, 1], [0, 1], true)).toThrow(/positive/);
  });

  it("produces sensible ticks", () => {
    const ticks = new Scale([0, 1], [0, 100]).ticks(5);
    expect(ticks[0]).toBe(0);
    expect(ticks[ticks.length - 1]).toBeCloseTo(1);
    expect(ticks.length).toBeGreaterThanOrEqual(4);
    const log = new Scale([1, 1000], [0, 100], true);
    expect(log.ticks()).toEqual([1, 10, 100, 1000]);
  });

  it("stays finite when the data range is a few ulps wide", () => {
    // a constant-K sweep produces values differing only in the last bit
    const s = new Scale([0.99999999999999978, 1.0000000000000002], [0, 100]);
    const ticks = s.ticks(6);
    expect(ticks.length).toBeLessThan(20);
    for (const t of ticks) expect(Number.isFinite(t)).toBe(true);
  });
});

describe("cli argument handling", () => {
  it("parses a full job", () => {
    const job = parseArgs(["decay", "--in", "a.csv", "--out", "b.svg", "--no-fit"]);
    expect(job).toMatchObject({
      kind: "decay",
      input: "a.csv",
      output: "b.svg",
      fitOverlay: false,
    });
  });

  it("rejects unknown kinds and missing files with exit code 1", () => {
    expect(() => parseArgs(["sparkline"])).toThrow(/unknown figure kind/);
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    expect(main(["decay", "--in", empty, "--out", join(dir, "o.svg")])).toBe(1);
    expect(main(["decay", "--in", join(dir, "nope.csv"), "--out", join(dir, "o.svg")])).toBe(1);
  });
});
