/**
 * Minimal deterministic SVG construction: fixed fonts and palette, no
 * timestamps, numbers formatted to fixed precision, so identical inputs
 * always produce byte-identical images.
 */

export const PALETTE = [
  "#1f77b4", "#d62728", "#e6a817", "#2ca02c", "#9467bd",
  "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
];

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fx(v: number): string {
  // fixed sub-pixel precision keeps payloads stable and small
  return v.toFixed(2);
}

export interface Scale {
  (v: number): number;
  ticks: number[];
  domain: [number, number];
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 0.01; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const f = ((v: number) => r0 + ((v - d0) / (d1 - d0 || 1)) * (r1 - r0)) as Scale;
  f.ticks = niceTicks(d0, d1, 5);
  f.domain = domain;
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error(`log scale needs a positive domain, got [${domain}]`);
  }
  const [l0, l1] = [Math.log10(domain[0]), Math.log10(domain[1])];
  const [r0, r1] = range;
  const f = ((v: number) => r0 + ((Math.log10(v) - l0) / (l1 - l0 || 1)) * (r1 - r0)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(l0); e <= Math.floor(l1); e++) ticks.push(Math.pow(10, e));
  if (ticks.length < 2) {
    // a narrow decade: fall back to linear ticks inside it
    for (const t of niceTicks(domain[0], domain[1], 4)) if (t > 0) ticks.push(t);
    ticks.sort((a, b) => a - b);
  }
  f.ticks = [...new Set(ticks)];
  f.domain = domain;
  return f;
}

export function tickLabel(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3)) {
    const e = Math.floor(Math.log10(Math.abs(v)));
    const m = v / Math.pow(10, e);
    return `${Math.abs(m - 1) < 1e-9 ? "" : m.toFixed(1) + "x"}1e${e}`;
  }
  return Math.abs(v) >= 100 || Number.isInteger(v) ? String(v) : v.toPrecision(3).replace(/\.?0+$/, "");
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const FRAME: Frame = { width: 560, height: 360, left: 64, right: 16, top: 34, bottom: 46 };

export function plotArea(fr: Frame): { x0: number; x1: number; y0: number; y1: number } {
  return { x0: fr.left, x1: fr.width - fr.right, y0: fr.top, y1: fr.height - fr.bottom };
}

export function svgOpen(fr: Frame, title: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fr.width}" height="${fr.height}" ` +
    `viewBox="0 0 ${fr.width} ${fr.height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${fr.width}" height="${fr.height}" fill="#ffffff"/>\n` +
    `<text x="${fr.left}" y="${fr.top - 16}" font-size="12" font-weight="600" fill="#222">${esc(title)}</text>\n`
  );
}

export function axes(
  fr: Frame,
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string,
  xLog = false
): string {
  const a = plotArea(fr);
  let s = "";
  for (const t of ys.ticks) {
    const y = ys(t);
    s += `<line x1="${a.x0}" y1="${fx(y)}" x2="${a.x1}" y2="${fx(y)}" stroke="#e8e8e8" stroke-width="0.6"/>\n`;
    s += `<text x="${a.x0 - 6}" y="${fx(y + 3)}" font-size="9" fill="#555" text-anchor="end">${esc(tickLabel(t))}</text>\n`;
  }
  for (const t of xs.ticks) {
    const x = xs(t);
    s += `<line x1="${fx(x)}" y1="${a.y0}" x2="${fx(x)}" y2="${a.y1}" stroke="#f2f2f2" stroke-width="0.6"/>\n`;
    s += `<text x="${fx(x)}" y="${a.y1 + 14}" font-size="9" fill="#555" text-anchor="middle">${esc(tickLabel(t))}</text>\n`;
  }
  s += `<rect x="${a.x0}" y="${a.y0}" width="${a.x1 - a.x0}" height="${a.y1 - a.y0}" fill="none" stroke="#333" stroke-width="1"/>\n`;
  s += `<text x="${fx((a.x0 + a.x1) / 2)}" y="${fr.height - 12}" font-size="11" fill="#222" text-anchor="middle">${esc(xLabel)}${xLog ? " (log)" : ""}</text>\n`;
  s += `<text x="14" y="${fx((a.y0 + a.y1) / 2)}" font-size="11" fill="#222" text-anchor="middle" transform="rotate(-90 14 ${fx((a.y0 + a.y1) / 2)})">${esc(yLabel)}</text>\n`;
  return s;
}

export function polyline(points: [number, number][], color: string, width = 1.4, dash = ""): string {
  const d = points.map(([x, y]) => `${fx(x)},${fx(y)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${d}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>\n`;
}

export function circles(points: [number, number][], color: string, r = 2): string {
  return points
    .map(([x, y]) => `<circle cx="${fx(x)}" cy="${fx(y)}" r="${r}" fill="${color}"/>\n`)
    .join("");
}

export function legend(fr: Frame, entries: { label: string; color: string; dash?: string }[]): string {
  const a = plotArea(fr);
  let s = "";
  entries.forEach((e, i) => {
    const y = a.y0 + 12 + 13 * i;
    const x = a.x1 - 150;
    const dashAttr = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
    s += `<line x1="${x}" y1="${fx(y - 3)}" x2="${x + 18}" y2="${fx(y - 3)}" stroke="${e.color}" stroke-width="2"${dashAttr}/>\n`;
    s += `<text x="${x + 23}" y="${fx(y)}" font-size="9" fill="#333">${esc(e.label)}</text>\n`;
  });
  return s;
}
