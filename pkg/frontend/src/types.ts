/** API wire types, mirroring docs/api.md. */

export interface Station {
  station_id: string;
  name: string;
  latitude: number;
  longitude: number;
  source_id: string;
  variables: string[];
}

export interface Point {
  timestamp: string; // RFC3339
  value: number;
  quality: "measured" | "imputed" | "rejected";
}

export interface Series {
  source: string;
  station: string;
  variable: string;
  unit: string;
  points: Point[];
  loaded_at: string;
}

export interface Forecast {
  station: string;
  variable: string;
  horizon: number;
  values: number[];
  issued_at: string;
  model_version: string;
  metrics: Record<string, Record<string, number | null>>;
  stale: boolean;
  loaded_at: string;
  exog_variables: string[];
}

export interface ScenarioRequest {
  station: string;
  horizon: number;
  multipliers: Record<string, number>;
  offsets: Record<string, number>;
}

export interface ScenarioResult {
  baseline: number;
  perturbed: number;
  delta: number;
  model_version: string;
  loaded_at: string;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
