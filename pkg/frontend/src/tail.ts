/**
 * Tail figure: folded-position occupation counts on a log count axis,
 * with a least-squares line fitted to ln(count) over positions >= 1.
 * A geometric tail shows up as a straight line whose slope is the log
 * of the per-position ratio.
 */
import type { EChartsOption } from "echarts";
import { CsvTable, numericColumn, requireColumns } from "./csv.js";

export interface TailFit {
  slope: number;
  intercept: number;
  points: number;
}

export interface TailFigure {
  option: EChartsOption;
  fit: TailFit | null;
  warning: string | null;
}

export function fitLogTail(positions: number[], counts: number[]): TailFit | null {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < positions.length; i++) {
    if (positions[i] >= 1 && counts[i] > 0) {
      xs.push(positions[i]);
      ys.push(Math.log(counts[i]));
    }
  }
  if (xs.length < 2) return null;
  const mx = xs.reduce((a, b) => a + b, 0) / xs.length;
  const my = ys.reduce((a, b) => a + b, 0) / ys.length;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < xs.length; i++) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx === 0) return null;
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx, points: xs.length };
}

export function buildTailFigure(table: CsvTable, name: string): TailFigure {
  requireColumns(table, ["position", "count"], name);
  const positions = numericColumn(table, "position");
  const counts = numericColumn(table, "count");

  const observed = positions
    .map((p, i) => [p, counts[i]] as [number, number])
    .filter(([, c]) => c > 0);
  const fit = fitLogTail(positions, counts);
  const warning = fit === null ? "degenerate input: fewer than 2 positive counts beyond position 0, no fit drawn" : null;

  const series: NonNullable<EChartsOption["series"]> = [
    {
      name: "occupation",
      type: "scatter",
      symbolSize: 8,
      data: observed,
    },
  ];
  if (fit !== null) {
    const fitted = positions
      .filter((p) => p >= 1)
      .map((p) => [p, Math.exp(fit.intercept + fit.slope * p)]);
    series.push({
      name: `fit slope ${fit.slope.toFixed(3)}`,
      type: "line",
      showSymbol: false,
      lineStyle: { type: "dashed" },
      data: fitted,
    });
  }

  return {
    option: {
      title: {
        text: "Folded position occupation",
        subtext: warning ?? `fitted slope ${fit!.slope.toFixed(4)} over ${fit!.points} positions`,
      },
      legend: { top: 48 },
      xAxis: { type: "value", name: "position" },
      yAxis: { type: "log", name: "count" },
      series,
    },
    fit,
    warning,
  };
}
