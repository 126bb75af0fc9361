/** The three dashboard sections and their endpoint bindings.
 *
 * 1. station map with the latest value per station  -> /stations + /window
 * 2. last-7-days data with the model output overlay -> /window + /forecast
 * 3. long-term historical explorer                  -> /history
 *
 * Each loader is pure data-in/data-out so the bindings are contract-testable
 * against recorded fixtures; DOM rendering lives in app.ts and isolates
 * failures per section.
 */

import { ApiClient } from "./client.js";
import { buildChart, type ChartModel } from "./charts.js";
import { buildMap, type MapModel } from "./map.js";
import type { Forecast, Series } from "./types.js";

export interface SectionSpec {
  id: "map" | "live" | "history";
  title: string;
  endpoints: string[];
}

export const SECTIONS: SectionSpec[] = [
  { id: "map", title: "Latest values by station", endpoints: ["/stations", "/window"] },
  { id: "live", title: "Last 7 days and model output", endpoints: ["/window", "/forecast"] },
  { id: "history", title: "Historical explorer", endpoints: ["/history"] },
];

export interface MapSection {
  model: MapModel;
  variable: string;
}

export async function loadMapSection(
  client: ApiClient,
  variable: string,
): Promise<MapSection> {
  const stations = await client.stations();
  const latest = new Map<string, Series>();
  for (const station of stations) {
    if (!station.variables.includes(variable)) continue;
    try {
      latest.set(station.station_id, await client.window(station.station_id, variable, 1));
    } catch {
      // a station without current data still gets a marker, just unlabeled
    }
  }
  return { model: buildMap(stations, latest), variable };
}

export interface LiveSection {
  series: Series;
  forecast: Forecast | null;
  chart: ChartModel;
}

export async function loadLiveSection(
  client: ApiClient,
  station: string,
  variable: string,
  horizon: number,
): Promise<LiveSection> {
  const series = await client.window(station, variable, 7);
  let forecast: Forecast | null = null;
  try {
    forecast = await client.forecast(station, variable, horizon);
  } catch {
    forecast = null; // no model registered: the data panel still works
  }
  return { series, forecast, chart: buildChart(series, forecast) };
}

export interface HistorySection {
  series: Series;
  chart: ChartModel;
}

export async function loadHistorySection(
  client: ApiClient,
  station: string,
  variable: string,
  from: string,
  to: string,
): Promise<HistorySection> {
  const series = await client.history(station, variable, from, to);
  return { series, chart: buildChart(series, null) };
}
