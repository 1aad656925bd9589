import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";
import {
  renderAlphaHist,
  renderContour,
  renderLambdaCurve,
  renderPvalueHist,
  renderTail,
} from "../src/render.js";
import {
  readCells,
  readDatasetReport,
  readReplicates,
  readTail,
  readTolerance,
} from "../src/schema.js";

const FIX = join(__dirname, "fixtures");

function checkSvg(svg: string) {
  expect(svg.startsWith("<svg ")).toBe(true);
  expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  expect(svg).not.toContain("NaN");
  expect(svg).not.toContain("Infinity");
  expect(svg).not.toContain("undefined");
}

describe("schema loaders on real fixtures", () => {
  it("cells", () => {
    const cells = readCells(join(FIX, "fig3_cells.csv"));
    expect(cells.length).toBeGreaterThan(8);
    expect(cells[0].method).toBe("mle");
    expect(cells[0].rejectionRate).not.toBeNull();
  });

  it("replicates", () => {
    const reps = readReplicates(join(FIX, "fig2_replicates.csv"));
    expect(reps.some((r) => r.pValue !== null)).toBe(true);
    expect(reps.some((r) => r.method === "regression")).toBe(true);
  });

  it("tolerance", () => {
    const rows = readTolerance(join(FIX, "fig6_tolerance.csv"));
    expect(rows).toHaveLength(4);
    expect(rows[0].kind).toBe("additive");
  });

  it("dataset report and tail", () => {
    const report = readDatasetReport(join(FIX, "dataset_report.json"));
    expect(report.dataset).toBe("earthquakes");
    expect(report.fits).toHaveLength(3);
    const tail = readTail(join(FIX, "dataset_tail.csv"));
    expect(tail[0].tailProb).toBe(1.0);
  });
});

describe("figure kinds render from fixtures", () => {
  it("tail with fitted slopes", () => {
    const svg = renderTail(
      readTail(join(FIX, "dataset_tail.csv")),
      readDatasetReport(join(FIX, "dataset_report.json"))
    );
    checkSvg(svg);
    expect(svg).toContain("Tail distribution: earthquakes");
    expect(svg).toContain("continuous a=");
    expect(svg).toContain("lam=10 a=");
    expect(svg).toContain("stroke-dasharray"); // binned fits are dashed steps
  });

  it("tail renders without a fits file", () => {
    checkSvg(renderTail(readTail(join(FIX, "dataset_tail.csv")), null));
  });

  it("alpha histogram", () => {
    const reps = readReplicates(join(FIX, "fig2_replicates.csv"));
    const svg = renderAlphaHist(reps, "additive");
    checkSvg(svg);
    expect(svg).toContain("Exponent estimates");
    expect(svg).toContain("mle lam=1");
    expect(svg).toContain("mle lam=4");
    expect(svg).toContain("regression");
  });

  it("p-value histogram", () => {
    const reps = readReplicates(join(FIX, "fig2_replicates.csv"));
    const svg = renderPvalueHist(reps, "multiplicative");
    checkSvg(svg);
    expect(svg).toContain("Bootstrap p-values");
    expect(svg).toContain("mle lam=2");
  });

  it("histograms demand a noise kind when several are present", () => {
    const reps = readReplicates(join(FIX, "fig2_replicates.csv"));
    expect(() => renderAlphaHist(reps)).toThrow(/pass --noise/);
    expect(() => renderAlphaHist(reps, "bogus")).toThrow(/not present/);
  });

  it("lambda curve from the ratio sweep", () => {
    const svg = renderLambdaCurve(readCells(join(FIX, "fig3_cells.csv")));
    checkSvg(svg);
    expect(svg).toContain("Rejection rate vs binning ratio");
    expect(svg).toContain("additive s=0.1");
    expect(svg).toContain("additive s=0.2");
    expect(svg).toContain("0.05"); // the nominal-rate reference line
  });

  it("lambda curve from the sensitivity sweep", () => {
    const svg = renderLambdaCurve(readCells(join(FIX, "fig4_cells.csv")));
    checkSvg(svg);
    expect(svg).toContain("lognormal s=1");
  });

  it("tolerance contour", () => {
    const svg = renderContour(readTolerance(join(FIX, "fig6_tolerance.csv")));
    checkSvg(svg);
    expect(svg).toContain("Noise tolerance");
    expect(svg).toContain("additive");
    expect(svg).toContain("binning ratio");
  });
});

describe("determinism", () => {
  it("identical inputs give byte-identical payloads", () => {
    const reps = readReplicates(join(FIX, "fig2_replicates.csv"));
    expect(renderAlphaHist(reps, "none")).toBe(renderAlphaHist(reps, "none"));
    const cells = readCells(join(FIX, "fig3_cells.csv"));
    expect(renderLambdaCurve(cells)).toBe(renderLambdaCurve(cells));
    const tol = readTolerance(join(FIX, "fig6_tolerance.csv"));
    expect(renderContour(tol)).toBe(renderContour(tol));
  });
});

describe("schema violations fail loudly", () => {
  it("wrong table for the kind", () => {
    // a cells file fed to the replicate-based histogram names the column
    expect(() => readReplicates(join(FIX, "fig3_cells.csv"))).toThrow(/missing column 'rep'/);
  });

  it("empty CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    expect(() => readCells(empty)).toThrow(/empty CSV/);
  });
});
