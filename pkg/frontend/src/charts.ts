// Plain-SVG chart primitives: pure string builders, no DOM, so the
// rendering contract is testable directly against service payload fixtures.

export interface Series {
  points: { x: number; y: number }[]; // NaN y makes a gap
  color: string;
  dashed?: boolean;
  label?: string;
}

export interface LineChartOptions {
  width?: number;
  height?: number;
  title?: string;
  xLabel?: string;
  yLabel?: string;
  marker?: number; // vertical marker (slider position), in x units
}

const MARGIN = { left: 46, right: 10, top: 22, bottom: 32 };

function finiteExtent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (lo > hi) {
    return [0, 1];
  }
  if (lo === hi) {
    return [lo - 0.5, hi + 0.5];
  }
  return [lo, hi];
}

function scale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const k = (r1 - r0) / (d1 - d0);
  return (v: number) => r0 + (v - d0) * k;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Polyline path split into segments at NaN gaps. */
export function gapPath(
  points: { x: number; y: number }[],
  sx: (v: number) => number,
  sy: (v: number) => number,
): string {
  const chunks: string[] = [];
  let pen = false;
  for (const p of points) {
    if (!Number.isFinite(p.y) || !Number.isFinite(p.x)) {
      pen = false;
      continue;
    }
    chunks.push(`${pen ? "L" : "M"}${sx(p.x).toFixed(2)} ${sy(p.y).toFixed(2)}`);
    pen = true;
  }
  return chunks.join(" ");
}

export function lineChart(series: Series[], options: LineChartOptions = {}): string {
  const width = options.width ?? 420;
  const height = options.height ?? 280;
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  const xDomain = finiteExtent(xs);
  const yDomain = finiteExtent(ys);
  const sx = scale(xDomain, [MARGIN.left, width - MARGIN.right]);
  const sy = scale(yDomain, [height - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="10">`,
  );
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" ` +
      `width="${width - MARGIN.left - MARGIN.right}" ` +
      `height="${height - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#999"/>`,
  );
  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="14" text-anchor="middle" font-size="11">` +
        `${escapeXml(options.title)}</text>`,
    );
  }
  if (options.xLabel) {
    parts.push(
      `<text x="${width / 2}" y="${height - 8}" text-anchor="middle">` +
        `${escapeXml(options.xLabel)}</text>`,
    );
  }
  if (options.yLabel) {
    parts.push(
      `<text x="12" y="${height / 2}" text-anchor="middle" ` +
        `transform="rotate(-90 12 ${height / 2})">${escapeXml(options.yLabel)}</text>`,
    );
  }
  // axis extremes as tick labels
  parts.push(
    `<text x="${MARGIN.left}" y="${height - MARGIN.bottom + 12}" text-anchor="middle">` +
      `${xDomain[0].toPrecision(3)}</text>`,
    `<text x="${width - MARGIN.right}" y="${height - MARGIN.bottom + 12}" ` +
      `text-anchor="end">${xDomain[1].toPrecision(3)}</text>`,
    `<text x="${MARGIN.left - 4}" y="${height - MARGIN.bottom}" text-anchor="end">` +
      `${yDomain[0].toPrecision(3)}</text>`,
    `<text x="${MARGIN.left - 4}" y="${MARGIN.top + 4}" text-anchor="end">` +
      `${yDomain[1].toPrecision(3)}</text>`,
  );
  if (options.marker !== undefined && Number.isFinite(options.marker)) {
    const mx = sx(options.marker).toFixed(2);
    parts.push(
      `<line x1="${mx}" y1="${MARGIN.top}" x2="${mx}" y2="${height - MARGIN.bottom}" ` +
        `stroke="#333" stroke-width="0.8" stroke-dasharray="3,3" class="marker"/>`,
    );
  }
  let legendY = MARGIN.top + 10;
  for (const s of series) {
    const d = gapPath(s.points, sx, sy);
    if (d.length > 0) {
      const dash = s.dashed ? ' stroke-dasharray="5,3"' : "";
      parts.push(
        `<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.2"${dash} ` +
          `class="series"/>`,
      );
    }
    if (s.label) {
      parts.push(
        `<text x="${width - MARGIN.right - 4}" y="${legendY}" text-anchor="end" ` +
          `fill="${s.color}">${escapeXml(s.label)}</text>`,
      );
      legendY += 11;
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

export const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];
