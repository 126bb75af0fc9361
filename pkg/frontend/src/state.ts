/** Shared view state for the single-page app. */

import type { ScenarioControls } from "./scenario.js";
import type { ScenarioResult } from "./types.js";

export interface ViewState {
  station: string | null;
  variable: string;
  horizon: number;
  scenarioControls: ScenarioControls;
  lastScenario: ScenarioResult | null;
  scenarioEnabled: boolean;
}

export function initialState(variable = "streamflow", horizon = 1): ViewState {
  return {
    station: null,
    variable,
    horizon,
    scenarioControls: { multipliers: {}, offsets: {} },
    lastScenario: null,
    scenarioEnabled: false,
  };
}
