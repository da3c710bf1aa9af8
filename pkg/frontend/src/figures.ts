import { parseCsv, requireColumns, num, SchemaError, Table } from "./csv.js";
import {
  HEIGHT,
  MARGIN,
  PALETTE,
  Series,
  WIDTH,
  linearScale,
  logScale,
  renderFrame,
} from "./svg.js";

export const FIGURE_KINDS = ["DecayVsN", "NStarVsDim", "MStarVsQ", "SweepCurve"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  figureKind: FigureKind;
  csvText: string;
  title?: string;
  xLabel?: string;
  yLabel?: string;
}

const LEFT = MARGIN.left;
const RIGHT = WIDTH - MARGIN.right;
const TOP = MARGIN.top;
const BOTTOM = HEIGHT - MARGIN.bottom;

/** Pure function of the CSV bytes and the FigureSpec. */
export function render(spec: FigureSpec): string {
  const table = parseCsv(spec.csvText);
  switch (spec.figureKind) {
    case "DecayVsN":
      return decayVsN(table, spec);
    case "NStarVsDim":
      return nStarVsDim(table, spec);
    case "MStarVsQ":
      return mStarVsQ(table, spec);
    case "SweepCurve":
      return sweepCurve(table, spec);
  }
}

/** Group rows by a key column, preserving first-appearance order. */
function groups(table: Table, key: string): Map<string, Record<string, string>[]> {
  const out = new Map<string, Record<string, string>[]>();
  for (const row of table.rows) {
    const k = row[key];
    const bucket = out.get(k);
    if (bucket) {
      bucket.push(row);
    } else {
      out.set(k, [row]);
    }
  }
  return out;
}

function decayVsN(table: Table, spec: FigureSpec): string {
  requireColumns(table, ["claim", "N", "trials", "failures", "p_hat"]);
  // zero-failure cells sit at the rule-of-three bound 3/trials
  const value = (r: Record<string, string>) =>
    num(r, "failures") === 0 ? 3 / num(r, "trials") : num(r, "p_hat");
  const xs = table.rows.map((r) => num(r, "N"));
  const ys = table.rows.map(value);
  const xScale = linearScale(Math.min(...xs), Math.max(...xs), LEFT, RIGHT);
  const yScale = logScale(Math.min(...ys), Math.max(...ys), BOTTOM, TOP);
  const series: Series[] = [];
  let hasTri = false;
  let ci = 0;
  for (const [claim, rows] of groups(table, "claim")) {
    const sorted = [...rows].sort((a, b) => num(a, "N") - num(b, "N"));
    series.push({
      label: claim,
      color: PALETTE[ci++ % PALETTE.length],
      pts: sorted.map((r) => {
        const zero = num(r, "failures") === 0;
        hasTri = hasTri || zero;
        return { x: xScale(num(r, "N")), y: yScale(value(r)), marker: zero ? "tri" : "dot" };
      }),
    });
  }
  return renderFrame({
    title: spec.title ?? "Failure probability vs N",
    xLabel: spec.xLabel ?? "N (rows per ensemble)",
    yLabel: spec.yLabel ?? "failure probability (log scale)",
    xScale,
    yScale,
    series,
    noteForTri: hasTri ? "open triangle: zero failures, plotted at the 3/trials bound" : undefined,
  });
}

function nStarVsDim(table: Table, spec: FigureSpec): string {
  requireColumns(table, ["n", "N_star_quad", "N_star_spec"]);
  const sorted = [...table.rows].sort((a, b) => num(a, "n") - num(b, "n"));
  const xs = sorted.map((r) => num(r, "n"));
  const ys = sorted.flatMap((r) => [num(r, "N_star_quad"), num(r, "N_star_spec")]);
  const xScale = linearScale(Math.min(...xs), Math.max(...xs), LEFT, RIGHT);
  const yScale = linearScale(0, Math.max(...ys), BOTTOM, TOP);
  const series: Series[] = (["N_star_quad", "N_star_spec"] as const).map((col, i) => ({
    label: col,
    color: PALETTE[i],
    pts: sorted.map((r) => ({ x: xScale(num(r, "n")), y: yScale(num(r, col)), marker: "dot" as const })),
  }));
  return renderFrame({
    title: spec.title ?? "Smallest N reaching the target failure rate, by dimension",
    xLabel: spec.xLabel ?? "n (dimension)",
    yLabel: spec.yLabel ?? "N*",
    xScale,
    yScale,
    series,
  });
}

/** m_star per q (first row of each q group carries the group's m_star),
 *  plus the 1/q reference line anchored at the smallest q. */
function mStarVsQ(table: Table, spec: FigureSpec): string {
  requireColumns(table, ["regime", "q", "m_star"]);
  const byQ = new Map<number, number>();
  for (const row of table.rows) {
    const q = num(row, "q");
    if (!byQ.has(q) && row["m_star"] !== "") {
      byQ.set(q, num(row, "m_star"));
    }
  }
  if (byQ.size === 0) {
    throw new SchemaError("no rows with a finite m_star (all sweeps saturated)");
  }
  const qs = [...byQ.keys()].sort((a, b) => a - b);
  const ms = qs.map((q) => byQ.get(q)!);
  const q0 = qs[0];
  const m0 = byQ.get(q0)!;
  const refVals = qs.map((q) => (m0 * q0) / q);
  const xScale = logScale(qs[0], qs[qs.length - 1], LEFT, RIGHT);
  const yScale = logScale(Math.min(...ms, ...refVals), Math.max(...ms, ...refVals), BOTTOM, TOP);
  const series: Series[] = [
    {
      label: "m*",
      color: PALETTE[0],
      pts: qs.map((q) => ({ x: xScale(q), y: yScale(byQ.get(q)!), marker: "dot" as const })),
    },
    {
      label: "1/q reference",
      color: PALETTE[1],
      dashed: true,
      pts: qs.map((q, i) => ({ x: xScale(q), y: yScale(refVals[i]), marker: "dot" as const })),
    },
  ];
  return renderFrame({
    title: spec.title ?? "Sample complexity vs pool size",
    xLabel: spec.xLabel ?? "q (pool size, log scale)",
    yLabel: spec.yLabel ?? "m* (log scale)",
    xScale,
    yScale,
    series,
  });
}

function sweepCurve(table: Table, spec: FigureSpec): string {
  requireColumns(table, ["regime", "q", "m", "success_prob"]);
  const xs = table.rows.map((r) => num(r, "m"));
  const xScale = logScale(Math.min(...xs), Math.max(...xs), LEFT, RIGHT);
  const yScale = linearScale(0, 1, BOTTOM, TOP);
  const series: Series[] = [];
  let ci = 0;
  const byKey = new Map<string, Record<string, string>[]>();
  for (const row of table.rows) {
    const k = `${row["regime"]} q=${row["q"]}`;
    const bucket = byKey.get(k);
    if (bucket) {
      bucket.push(row);
    } else {
      byKey.set(k, [row]);
    }
  }
  for (const [key, rows] of byKey) {
    const sorted = [...rows].sort((a, b) => num(a, "m") - num(b, "m"));
    series.push({
      label: key,
      color: PALETTE[ci++ % PALETTE.length],
      pts: sorted.map((r) => ({ x: xScale(num(r, "m")), y: yScale(num(r, "success_prob")), marker: "dot" as const })),
    });
  }
  return renderFrame({
    title: spec.title ?? "Success probability vs m",
    xLabel: spec.xLabel ?? "m (vectors per group, log scale)",
    yLabel: spec.yLabel ?? "success probability",
    xScale,
    yScale,
    series,
  });
}
