/** Chart geometry as pure data: SVG path strings plus the traced values.
 *
 * The dashboard performs no computation on data values — every plotted
 * value is copied verbatim from a response body; scaling to pixels is
 * presentation only. Window data and forecast horizons share one time axis
 * with a vertical "now" divider at the last observation.
 */

import type { Forecast, Series } from "./types.js";

export interface TracedPoint {
  epochMs: number;
  value: number; // verbatim from the response body
  source: "window" | "forecast" | "history";
}

export interface ChartModel {
  width: number;
  height: number;
  seriesPath: string;
  forecastPath: string;
  nowX: number | null;
  points: TracedPoint[];
  unit: string;
}

const STEP_MS = 3_600_000; // forecast steps are hourly

function scale(
  values: number[],
  lo: number,
  hi: number,
  size: number,
  flip = false,
): (v: number) => number {
  const span = hi - lo || 1;
  return (v: number) => {
    const t = (v - lo) / span;
    return flip ? size - t * size : t * size;
  };
}

export function buildChart(
  series: Series,
  forecast: Forecast | null,
  width = 640,
  height = 220,
): ChartModel {
  const windowPoints: TracedPoint[] = series.points.map((p) => ({
    epochMs: Date.parse(p.timestamp),
    value: p.value,
    source: "window",
  }));
  const last = windowPoints[windowPoints.length - 1];
  const forecastPoints: TracedPoint[] = (forecast?.values ?? []).map((v, i) => ({
    epochMs: (last ? last.epochMs : 0) + (i + 1) * STEP_MS,
    value: v,
    source: "forecast",
  }));
  const all = [...windowPoints, ...forecastPoints];
  if (all.length === 0) {
    return {
      width,
      height,
      seriesPath: "",
      forecastPath: "",
      nowX: null,
      points: [],
      unit: series.unit,
    };
  }
  const times = all.map((p) => p.epochMs);
  const values = all.map((p) => p.value);
  const x = scale(times, Math.min(...times), Math.max(...times), width);
  const y = scale(values, Math.min(...values), Math.max(...values), height, true);

  const path = (pts: TracedPoint[]) =>
    pts
      .map(
        (p, i) => `${i === 0 ? "M" : "L"}${x(p.epochMs).toFixed(1)},${y(p.value).toFixed(1)}`,
      )
      .join(" ");

  // the forecast path starts from the last observation so the curves join
  const forecastWithAnchor = last && forecastPoints.length > 0
    ? [last, ...forecastPoints]
    : forecastPoints;
  return {
    width,
    height,
    seriesPath: path(windowPoints),
    forecastPath: path(forecastWithAnchor),
    nowX: last ? x(last.epochMs) : null,
    points: all,
    unit: series.unit,
  };
}
