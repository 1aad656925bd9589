/**
 * The five figure kinds, rendered from the simulation/dataset outputs.
 * Pure functions from parsed rows to an SVG string; no statistics are
 * computed here beyond binning values into histogram counts.
 */

import {
  FRAME,
  PALETTE,
  Scale,
  axes,
  circles,
  esc,
  fx,
  legend,
  linearScale,
  logScale,
  plotArea,
  polyline,
  svgOpen,
} from "./svg.js";
import {
  CellRow,
  DatasetReport,
  ReplicateRow,
  TailPoint,
  ToleranceRow,
} from "./schema.js";

function groupLabel(method: string, lambda: number): string {
  if (method === "regression") return "regression";
  return lambda === 1 ? "mle lam=1" : `mle lam=${+lambda.toFixed(4)}`;
}

function pickNoise(rows: ReplicateRow[], noiseKind?: string): ReplicateRow[] {
  const kinds = [...new Set(rows.map((r) => r.noiseKind))];
  if (noiseKind) {
    if (!kinds.includes(noiseKind)) {
      throw new Error(`noise kind '${noiseKind}' not present (have: ${kinds.join(", ")})`);
    }
    return rows.filter((r) => r.noiseKind === noiseKind);
  }
  if (kinds.length > 1) {
    throw new Error(`file holds several noise kinds (${kinds.join(", ")}); pass --noise`);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// tail: log-log empirical tail distribution with fitted slopes

export function renderTail(tail: TailPoint[], report: DatasetReport | null): string {
  if (tail.length === 0) throw new Error("no tail points");
  const xMin = tail[0].x;
  const xMax = tail[tail.length - 1].x;
  const pMin = tail[tail.length - 1].tailProb;
  const fr = FRAME;
  const a = plotArea(fr);
  const xs = logScale([xMin, xMax], [a.x0, a.x1]);
  const ys = logScale([Math.max(pMin / 2, 1e-12), 1], [a.y1, a.y0]);

  let s = svgOpen(fr, report ? `Tail distribution: ${report.dataset}` : "Tail distribution");
  s += axes(fr, xs, ys, "magnitude", "fraction of data >= magnitude", true);

  const stride = Math.max(1, Math.floor(tail.length / 500));
  const pts: [number, number][] = [];
  for (let i = 0; i < tail.length; i += stride) {
    pts.push([xs(tail[i].x), ys(tail[i].tailProb)]);
  }
  s += circles(pts, "#444", 1.6);

  const entries: { label: string; color: string; dash?: string }[] = [
    { label: `data (n=${tail.length})`, color: "#444" },
  ];
  if (report) {
    report.fits.forEach((fit, i) => {
      const color = PALETTE[i % PALETTE.length];
      const alpha = fit.alphaHat;
      if (fit.lambda === 1) {
        const line: [number, number][] = [
          [xs(report.xM), ys(1)],
          [xs(xMax), ys(Math.max(Math.pow(xMax / report.xM, -alpha), ys.domain[0]))],
        ];
        s += polyline(line, color, 1.5);
        entries.push({ label: `continuous a=${alpha.toFixed(2)}`, color });
      } else {
        // binned fit as a step function, constant over each bin
        const steps: [number, number][] = [];
        for (let k = 0; ; k++) {
          const lo = report.xM * Math.pow(fit.lambda, k);
          const hi = report.xM * Math.pow(fit.lambda, k + 1);
          const p = Math.pow(fit.lambda, -alpha * k);
          if (lo > xMax || p < ys.domain[0]) break;
          steps.push([xs(lo), ys(p)]);
          steps.push([xs(Math.min(hi, xMax)), ys(p)]);
        }
        s += polyline(steps, color, 1.5, "4,3");
        entries.push({
          label: `lam=${+fit.lambda.toFixed(4)} a=${alpha.toFixed(2)}`,
          color,
          dash: "4,3",
        });
      }
    });
    if (report.regressionAlpha !== null) {
      const alpha = report.regressionAlpha;
      const line: [number, number][] = [
        [xs(report.xM), ys(1)],
        [xs(xMax), ys(Math.max(Math.pow(xMax / report.xM, -alpha), ys.domain[0]))],
      ];
      s += polyline(line, "#666", 1.2, "1.5,2.5");
      entries.push({ label: `regression a=${alpha.toFixed(2)}`, color: "#666", dash: "1.5,2.5" });
    }
  }
  s += legend(fr, entries);
  return s + "</svg>\n";
}

// ---------------------------------------------------------------------------
// histograms

interface HistGroup {
  label: string;
  values: number[];
}

function histGroups(rows: ReplicateRow[], field: "alphaHat" | "pValue"): HistGroup[] {
  const byKey = new Map<string, number[]>();
  for (const r of rows) {
    const v = r[field];
    if (v === null) continue;
    const key = groupLabel(r.method, r.lambda);
    if (!byKey.has(key)) byKey.set(key, []);
    byKey.get(key)!.push(v);
  }
  if (byKey.size === 0) throw new Error(`no ${field} values in the input`);
  return [...byKey.entries()].map(([label, values]) => ({ label, values }));
}

function outlineHistogram(
  groups: HistGroup[],
  domain: [number, number],
  nBins: number,
  title: string,
  xLabel: string,
  refLine?: (g: HistGroup) => number
): string {
  const fr = FRAME;
  const a = plotArea(fr);
  const width = (domain[1] - domain[0]) / nBins;
  const counts = groups.map((g) => {
    const c = new Array(nBins).fill(0);
    for (const v of g.values) {
      let b = Math.floor((v - domain[0]) / width);
      if (b === nBins) b -= 1; // right edge belongs to the last bin
      if (b >= 0 && b < nBins) c[b] += 1;
    }
    return c;
  });
  const yMax = Math.max(...counts.flat(), 1);
  const xs = linearScale(domain, [a.x0, a.x1]);
  const ys = linearScale([0, yMax * 1.08], [a.y1, a.y0]);

  let s = svgOpen(fr, title);
  s += axes(fr, xs, ys, xLabel, "replicates per bin");
  groups.forEach((g, gi) => {
    const color = PALETTE[gi % PALETTE.length];
    const pts: [number, number][] = [[xs(domain[0]), ys(0)]];
    counts[gi].forEach((c, b) => {
      pts.push([xs(domain[0] + b * width), ys(c)]);
      pts.push([xs(domain[0] + (b + 1) * width), ys(c)]);
    });
    pts.push([xs(domain[1]), ys(0)]);
    s += polyline(pts, color, 1.4);
    if (refLine) {
      const y = ys(refLine(g));
      s += `<line x1="${a.x0}" y1="${fx(y)}" x2="${a.x1}" y2="${fx(y)}" stroke="${color}" stroke-width="0.8" stroke-dasharray="5,4" opacity="0.55"/>\n`;
    }
  });
  s += legend(fr, groups.map((g, gi) => ({
    label: `${g.label} (n=${g.values.length})`,
    color: PALETTE[gi % PALETTE.length],
  })));
  return s + "</svg>\n";
}

export function renderAlphaHist(rows: ReplicateRow[], noiseKind?: string): string {
  const picked = pickNoise(rows, noiseKind);
  const groups = histGroups(picked, "alphaHat");
  const all = groups.flatMap((g) => g.values);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const pad = (hi - lo || 1) * 0.05;
  const kind = picked[0].noiseKind;
  return outlineHistogram(
    groups,
    [lo - pad, hi + pad],
    30,
    `Exponent estimates (noise: ${kind}, sigma=${picked[0].sigma})`,
    "estimated exponent"
  );
}

export function renderPvalueHist(rows: ReplicateRow[], noiseKind?: string): string {
  const picked = pickNoise(rows, noiseKind);
  const groups = histGroups(picked, "pValue");
  const kind = picked[0].noiseKind;
  return outlineHistogram(
    groups,
    [0, 1],
    20,
    `Bootstrap p-values (noise: ${kind}, sigma=${picked[0].sigma})`,
    "p-value",
    (g) => g.values.length / 20 // height of a perfectly uniform histogram
  );
}

// ---------------------------------------------------------------------------
// lambda_curve: rejection rate against the binning ratio

export function renderLambdaCurve(cells: CellRow[]): string {
  const usable = cells.filter((c) => c.method === "mle" && c.rejectionRate !== null);
  if (usable.length === 0) throw new Error("no mle cells with rejection rates");
  const bySeries = new Map<string, CellRow[]>();
  for (const c of usable) {
    const key = c.noiseKind === "none" ? `${c.experiment}` : `${c.noiseKind} s=${c.sigma}`;
    if (!bySeries.has(key)) bySeries.set(key, []);
    bySeries.get(key)!.push(c);
  }
  const fr = FRAME;
  const a = plotArea(fr);
  const lams = usable.map((c) => c.lambda);
  const xs = logScale([Math.min(...lams), Math.max(...lams)], [a.x0, a.x1]);
  const ys = linearScale([0, 1.02], [a.y1, a.y0]);

  let s = svgOpen(fr, "Rejection rate vs binning ratio");
  s += axes(fr, xs, ys, "binning ratio", "rejection rate", true);
  const y05 = ys(0.05);
  s += `<line x1="${a.x0}" y1="${fx(y05)}" x2="${a.x1}" y2="${fx(y05)}" stroke="#333" stroke-width="0.9" stroke-dasharray="6,4"/>\n`;
  s += `<text x="${a.x1 - 4}" y="${fx(y05 - 4)}" font-size="8" fill="#333" text-anchor="end">0.05</text>\n`;

  const entries: { label: string; color: string }[] = [];
  let i = 0;
  for (const [label, rows] of bySeries) {
    const color = PALETTE[i % PALETTE.length];
    const sorted = [...rows].sort((p, q) => p.lambda - q.lambda);
    const pts: [number, number][] = sorted.map((c) => [xs(c.lambda), ys(c.rejectionRate!)]);
    s += polyline(pts, color, 1.5);
    s += circles(pts, color, 2.2);
    entries.push({ label, color });
    i += 1;
  }
  s += legend(fr, entries);
  return s + "</svg>\n";
}

// ---------------------------------------------------------------------------
// contour: noise-tolerance heat map over the (alpha, lambda) grid

function heatColor(t: number): string {
  // light -> dark blue ramp
  const from = [0xf2, 0xf7, 0xfd];
  const to = [0x08, 0x45, 0x94];
  const c = from.map((f, i) => Math.round(f + (to[i] - f) * t));
  return `#${c.map((v) => v.toString(16).padStart(2, "0")).join("")}`;
}

export function renderContour(rows: ToleranceRow[]): string {
  if (rows.length === 0) throw new Error("no tolerance rows");
  const kinds = [...new Set(rows.map((r) => r.kind))].sort();
  const alphas = [...new Set(rows.map((r) => r.alpha))].sort((a, b) => a - b);
  const lambdas = [...new Set(rows.map((r) => r.lambda))].sort((a, b) => a - b);
  const values = rows.filter((r) => r.sigmaHat !== null).map((r) => r.sigmaHat!);
  if (values.length === 0) throw new Error("every tolerance cell failed");
  const vMin = Math.min(...values);
  const vMax = Math.max(...values);

  const panelW = 230;
  const fr = {
    ...FRAME,
    width: FRAME.left + kinds.length * (panelW + 30) + FRAME.right,
    height: 300,
  };
  let s = svgOpen(fr, `Noise tolerance (n=${rows[0].n}): sigma at doubled false-positive rate`);
  kinds.forEach((kind, ki) => {
    const x0 = fr.left + ki * (panelW + 30);
    const y0 = fr.top + 16;
    const cw = panelW / lambdas.length;
    const ch = (fr.height - y0 - 60) / alphas.length;
    s += `<text x="${x0}" y="${y0 - 5}" font-size="10" font-weight="600" fill="#333">${esc(kind)}</text>\n`;
    for (let ai = 0; ai < alphas.length; ai++) {
      for (let li = 0; li < lambdas.length; li++) {
        const row = rows.find(
          (r) => r.kind === kind && r.alpha === alphas[ai] && r.lambda === lambdas[li]
        );
        const x = x0 + li * cw;
        const y = y0 + (alphas.length - 1 - ai) * ch;
        if (!row || row.sigmaHat === null) {
          s += `<rect x="${fx(x)}" y="${fx(y)}" width="${fx(cw)}" height="${fx(ch)}" fill="#eeeeee" stroke="#fff"/>\n`;
          s += `<text x="${fx(x + cw / 2)}" y="${fx(y + ch / 2 + 3)}" font-size="8" fill="#999" text-anchor="middle">n/a</text>\n`;
          continue;
        }
        const t = vMax > vMin ? (row.sigmaHat - vMin) / (vMax - vMin) : 0.5;
        s += `<rect x="${fx(x)}" y="${fx(y)}" width="${fx(cw)}" height="${fx(ch)}" fill="${heatColor(t)}" stroke="#fff"/>\n`;
        const textColor = t > 0.55 ? "#fff" : "#222";
        s += `<text x="${fx(x + cw / 2)}" y="${fx(y + ch / 2 - 2)}" font-size="9" fill="${textColor}" text-anchor="middle">${row.sigmaHat.toPrecision(3)}</text>\n`;
        if (row.meanAlphaHat !== null) {
          s += `<text x="${fx(x + cw / 2)}" y="${fx(y + ch / 2 + 9)}" font-size="7" fill="${textColor}" text-anchor="middle">a=${row.meanAlphaHat.toFixed(2)}</text>\n`;
        }
      }
    }
    // category axes
    lambdas.forEach((l, li) => {
      s += `<text x="${fx(x0 + (li + 0.5) * cw)}" y="${fx(y0 + alphas.length * ch + 12)}" font-size="9" fill="#555" text-anchor="middle">${esc(String(l))}</text>\n`;
    });
    alphas.forEach((al, ai) => {
      s += `<text x="${fx(x0 - 6)}" y="${fx(y0 + (alphas.length - 1 - ai + 0.5) * ch + 3)}" font-size="9" fill="#555" text-anchor="end">${esc(String(al))}</text>\n`;
    });
    s += `<text x="${fx(x0 + panelW / 2)}" y="${fr.height - 12}" font-size="10" fill="#222" text-anchor="middle">binning ratio</text>\n`;
  });
  s += `<text x="16" y="${fx(fr.height / 2)}" font-size="10" fill="#222" text-anchor="middle" transform="rotate(-90 16 ${fx(fr.height / 2)})">true exponent</text>\n`;
  return s + "</svg>\n";
}
