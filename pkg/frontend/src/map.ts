/** 2D station map as pure geometry: lat/lon projected into an SVG viewBox,
 * one marker per station labeled with the latest reported value. */

import type { Series, Station } from "./types.js";

export interface MapMarker {
  stationId: string;
  name: string;
  x: number;
  y: number;
  latestValue: number | null; // verbatim from the window response
  latestTimestamp: string | null;
  unit: string | null;
}

export interface MapModel {
  width: number;
  height: number;
  markers: MapMarker[];
}

export function buildMap(
  stations: Station[],
  latestByStation: Map<string, Series>,
  width = 420,
  height = 320,
  padding = 24,
): MapModel {
  const lats = stations.map((s) => s.latitude);
  const lons = stations.map((s) => s.longitude);
  const latLo = Math.min(...lats);
  const latHi = Math.max(...lats);
  const lonLo = Math.min(...lons);
  const lonHi = Math.max(...lons);
  const lonSpan = lonHi - lonLo || 1e-6;
  const latSpan = latHi - latLo || 1e-6;

  const markers = stations.map((station) => {
    const series = latestByStation.get(station.station_id);
    const lastPoint = series?.points[series.points.length - 1];
    return {
      stationId: station.station_id,
      name: station.name,
      x: padding + ((station.longitude - lonLo) / lonSpan) * (width - 2 * padding),
      // north up: higher latitudes render closer to the top
      y: padding + ((latHi - station.latitude) / latSpan) * (height - 2 * padding),
      latestValue: lastPoint ? lastPoint.value : null,
      latestTimestamp: lastPoint ? lastPoint.timestamp : null,
      unit: series ? series.unit : null,
    };
  });
  return { width, height, markers };
}
