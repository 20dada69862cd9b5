import { describe, expect, it } from "vitest";
import { parseCsv, readCsv } from "../src/csv";
import { renderSvg } from "../src/render";
import { DEFAULT_H, buildTraceOption, capFromConfig } from "../src/trace";

const FIXTURE = new URL("./fixtures/trace.csv", import.meta.url).pathname;

describe("buildTraceOption", () => {
  it("potential panel starts at 1 on a fresh trace", () => {
    const option = buildTraceOption(readCsv(FIXTURE), FIXTURE);
    const series = option.series as { name: string; data: [number, number][] }[];
    const phi = series.find((s) => s.name === "potential")!;
    expect(phi.data[0][0]).toBe(0);
    expect(phi.data[0][1]).toBe(1.0);
  });

  it("draws cap lines at H and H/2 from the embedded config", () => {
    const table = readCsv(FIXTURE);
    const H = capFromConfig(table);
    expect(H).toBeCloseTo(4 * Math.exp(3), 9);
    const option = buildTraceOption(table, FIXTURE);
    const series = option.series as { markLine?: { data: { yAxis: number }[] } }[];
    const marks = series[1].markLine!.data.map((m) => m.yAxis);
    expect(marks).toEqual([H, H / 2]);
    const svg = renderSvg(option);
    expect(svg).toContain(`H = ${H.toFixed(2)}`);
    expect(svg).toContain(`H/2 = ${(H / 2).toFixed(2)}`);
  });

  it("falls back to the default cap when the config lacks H", () => {
    const table = parseCsv("t,x,V_t,phi\n0,0,0,1.0\n1,1,1,1.1\n", "t.csv");
    expect(capFromConfig(table)).toBe(DEFAULT_H);
    expect(DEFAULT_H).toBeCloseTo(80.3421, 3);
  });

  it("errors on a missing phi column, naming it", () => {
    const table = parseCsv("t,x,V_t\n0,0,0\n", "broken.csv");
    expect(() => buildTraceOption(table, "broken.csv")).toThrow(/missing column "phi"/);
  });

  it("renders two panels end to end", () => {
    const svg = renderSvg(buildTraceOption(readCsv(FIXTURE), FIXTURE));
    expect(svg).toContain("<svg");
    expect(svg).toContain("V_t");
  });
});
