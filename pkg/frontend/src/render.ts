/**
 * Headless echarts rendering and extension-based output.
 *
 * Charts are rendered server-side to an SVG string; `.svg` outputs get the
 * raw markup and `.html` outputs get a minimal standalone page embedding it.
 * Rendering the same option twice yields the same bytes.
 */
import { writeFileSync } from "node:fs";
import { extname } from "node:path";
import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

export const WIDTH = 900;
export const HEIGHT = 560;

export function renderSvg(option: EChartsOption, width = WIDTH, height = HEIGHT): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  try {
    chart.setOption({ animation: false, ...option });
    return normalizeSvg(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}

/**
 * echarts names CSS classes with a process-global instance counter
 * (zr3-cls-17), so rendering the same chart twice yields different bytes.
 * Renumber the classes in order of first appearance to make output depend
 * only on content.
 */
function normalizeSvg(svg: string): string {
  const seen = new Map<string, string>();
  const renumbered = svg.replace(/zr\d+-cls-\d+/g, (token) => {
    let mapped = seen.get(token);
    if (mapped === undefined) {
      mapped = `zr-cls-${seen.size}`;
      seen.set(token, mapped);
    }
    return mapped;
  });
  // clip-path ids (zr7-c0) carry the same instance counter
  return renumbered.replace(/zr\d+-/g, "zr-");
}

export function writeFigure(path: string, svg: string): void {
  const ext = extname(path).toLowerCase();
  if (ext === ".svg") {
    writeFileSync(path, svg);
  } else if (ext === ".html") {
    const page = `<!DOCTYPE html>
<html>
<head><meta charset="utf-8"><title>signbalance figure</title></head>
<body style="margin:0">${svg}</body>
</html>
`;
    writeFileSync(path, page);
  } else {
    throw new Error(`unsupported output extension "${ext || path}"; use .svg or .html`);
  }
}
