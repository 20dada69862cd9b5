/**
 * Scaling figure: median value vs n per strategy on log-log axes, with
 * sqrt(n) and sqrt(n log n) guide curves anchored at the smallest-n data
 * point so "parallel to the guide" reads as "same growth rate".
 */
import type { EChartsOption } from "echarts";
import { CsvTable, requireColumns } from "./csv.js";

export interface ScalingOptions {
  guides?: boolean;
}

interface SeriesPoint {
  n: number;
  median: number;
}

export function buildScalingOption(table: CsvTable, name: string, opts: ScalingOptions = {}): EChartsOption {
  requireColumns(table, ["n", "strategy", "median_V"], name);
  const byStrategy = new Map<string, SeriesPoint[]>();
  for (const row of table.rows) {
    const strategy = String(row.strategy);
    const n = Number(row.n);
    const median = Number(row.median_V);
    if (!Number.isFinite(n) || !Number.isFinite(median)) {
      throw new Error(`${name}: non-numeric n/median_V row`);
    }
    if (!byStrategy.has(strategy)) byStrategy.set(strategy, []);
    byStrategy.get(strategy)!.push({ n, median });
  }
  if (byStrategy.size < 2) {
    throw new Error(`${name}: need at least 2 strategies, found ${byStrategy.size}`);
  }
  for (const points of byStrategy.values()) {
    points.sort((a, b) => a.n - b.n);
  }

  const series: NonNullable<EChartsOption["series"]> = [];
  for (const [strategy, points] of byStrategy) {
    series.push({
      name: strategy,
      type: "line",
      symbolSize: 7,
      data: points.map((p) => [p.n, p.median]),
    });
  }

  if (opts.guides !== false) {
    // anchor both guides at the smallest-n point of the first strategy
    const first = [...byStrategy.values()][0][0];
    const allN = table.rows.map((r) => Number(r.n));
    const nMin = Math.min(...allN);
    const nMax = Math.max(...allN);
    const cSqrt = first.median / Math.sqrt(first.n);
    const cNlogn = first.median / Math.sqrt(first.n * Math.log(first.n));
    const samples = 40;
    const grid: number[] = [];
    for (let i = 0; i <= samples; i++) {
      grid.push(nMin * Math.pow(nMax / nMin, i / samples));
    }
    series.push({
      name: "c·sqrt(n)",
      type: "line",
      showSymbol: false,
      lineStyle: { type: "dashed" },
      data: grid.map((n) => [n, cSqrt * Math.sqrt(n)]),
    });
    series.push({
      name: "c·sqrt(n log n)",
      type: "line",
      showSymbol: false,
      lineStyle: { type: "dotted" },
      data: grid.map((n) => [n, cNlogn * Math.sqrt(n * Math.log(n))]),
    });
  }

  return {
    title: { text: "Median final value vs n" },
    legend: { top: 28 },
    xAxis: { type: "log", name: "n" },
    yAxis: { type: "log", name: "median V" },
    series,
  };
}
