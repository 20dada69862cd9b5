/**
 * Trace figure: two stacked panels over the round index t, the running
 * value V_t on top and the potential below with reference lines at the
 * cap H and at H/2. H comes from the embedded config comment; the
 * default cap is 4e^3.
 */
import type { EChartsOption } from "echarts";
import { CsvTable, numericColumn, requireColumns } from "./csv.js";

export const DEFAULT_H = 4 * Math.exp(3);

export function capFromConfig(table: CsvTable): number {
  const h = table.config["H"];
  return typeof h === "number" && Number.isFinite(h) ? h : DEFAULT_H;
}

export function buildTraceOption(table: CsvTable, name: string): EChartsOption {
  requireColumns(table, ["t", "V_t", "phi"], name);
  const t = numericColumn(table, "t");
  const v = numericColumn(table, "V_t");
  const phi = numericColumn(table, "phi");
  const H = capFromConfig(table);

  return {
    title: { text: `Value and potential trace (H = ${H.toFixed(2)})` },
    grid: [
      { top: 60, height: "32%" },
      { top: "58%", height: "32%" },
    ],
    xAxis: [
      { type: "value", gridIndex: 0, name: "t" },
      { type: "value", gridIndex: 1, name: "t" },
    ],
    yAxis: [
      { type: "value", gridIndex: 0, name: "V_t" },
      // keep the cap and half-cap lines inside the panel even when the
      // trace never gets near them (a fresh trial hovers around 1)
      { type: "value", gridIndex: 1, name: "potential", max: (v: { max: number }) => Math.max(v.max, H * 1.05) },
    ],
    series: [
      {
        name: "V_t",
        type: "line",
        xAxisIndex: 0,
        yAxisIndex: 0,
        showSymbol: false,
        data: t.map((ti, i) => [ti, v[i]]),
      },
      {
        name: "potential",
        type: "line",
        xAxisIndex: 1,
        yAxisIndex: 1,
        showSymbol: false,
        data: t.map((ti, i) => [ti, phi[i]]),
        markLine: {
          symbol: "none",
          animation: false,
          label: { formatter: "{b}", show: true, position: "insideEndTop" },
          data: [
            { name: `H = ${H.toFixed(2)}`, yAxis: H },
            { name: `H/2 = ${(H / 2).toFixed(2)}`, yAxis: H / 2 },
          ],
        },
      },
    ],
  };
}
