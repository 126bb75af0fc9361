/** What-if scenario panel logic.
 *
 * Controls are one multiplier slider in [0, 2] and one offset input per
 * exogenous variable the model advertises. The panel stays disabled until
 * /forecast metadata advertises exog support. At most one request is in
 * flight; submissions during flight are queued latest-wins.
 */

import { ApiClient, ApiError } from "./client.js";
import type { ScenarioRequest, ScenarioResult } from "./types.js";

export interface ScenarioControls {
  multipliers: Record<string, number>;
  offsets: Record<string, number>;
}

export const SLIDER_MIN = 0;
export const SLIDER_MAX = 2;

export function defaultControls(exogVariables: string[]): ScenarioControls {
  const multipliers: Record<string, number> = {};
  const offsets: Record<string, number> = {};
  for (const variable of exogVariables) {
    multipliers[variable] = 1.0;
    offsets[variable] = 0.0;
  }
  return { multipliers, offsets };
}

export function buildScenarioRequest(
  station: string,
  horizon: number,
  controls: ScenarioControls,
): ScenarioRequest {
  return {
    station,
    horizon,
    multipliers: { ...controls.multipliers },
    offsets: { ...controls.offsets },
  };
}

export interface OverlayModel {
  baseline: number; // verbatim from the response
  perturbed: number;
  delta: number;
  overlapping: boolean; // identical curves when the perturbation is identity
  modelVersion: string;
}

export function buildOverlay(result: ScenarioResult): OverlayModel {
  return {
    baseline: result.baseline,
    perturbed: result.perturbed,
    delta: result.delta,
    overlapping: result.delta === 0,
    modelVersion: result.model_version,
  };
}

export type PanelListener = (panel: ScenarioPanel) => void;

export class ScenarioPanel {
  enabled = false;
  exogVariables: string[] = [];
  controls: ScenarioControls = { multipliers: {}, offsets: {} };
  /** controls as of the last *submitted* request */
  lastSubmitted: ScenarioControls | null = null;
  lastResult: ScenarioResult | null = null;
  lastError: string | null = null;

  private inflight: Promise<void> | null = null;
  private queued: ScenarioRequest | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly listener: PanelListener = () => {},
  ) {}

  /** Called with /forecast metadata; unlocks the panel when the model
   * advertises perturbable inputs. */
  advertise(exogVariables: string[]): void {
    this.exogVariables = [...exogVariables];
    this.enabled = exogVariables.length > 0;
    if (this.enabled && Object.keys(this.controls.multipliers).length === 0) {
      this.controls = defaultControls(exogVariables);
    }
    this.listener(this);
  }

  setMultiplier(variable: string, value: number): void {
    const clamped = Math.min(SLIDER_MAX, Math.max(SLIDER_MIN, value));
    this.controls.multipliers[variable] = clamped;
    this.listener(this);
  }

  setOffset(variable: string, value: number): void {
    this.controls.offsets[variable] = value;
    this.listener(this);
  }

  /** Submit the current controls; if a request is in flight the newest
   * submission replaces any queued one. Resolves when the panel is idle. */
  submit(station: string, horizon: number): Promise<void> {
    if (!this.enabled) {
      return Promise.resolve();
    }
    const request = buildScenarioRequest(station, horizon, this.controls);
    if (this.inflight) {
      this.queued = request; // latest wins
      return this.inflight;
    }
    this.inflight = this.send(request).then(async () => {
      while (this.queued) {
        const next = this.queued;
        this.queued = null;
        await this.send(next);
      }
      this.inflight = null;
    });
    return this.inflight;
  }

  private async send(request: ScenarioRequest): Promise<void> {
    this.lastSubmitted = {
      multipliers: { ...request.multipliers },
      offsets: { ...request.offsets },
    };
    try {
      this.lastResult = await this.client.scenario(request);
      this.lastError = null;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.lastError =
          "This model has no exogenous-forecast inputs; " + error.body.detail;
      } else if (error instanceof ApiError) {
        this.lastError = error.body.detail;
      } else {
        this.lastError = String(error);
      }
      this.lastResult = null;
    }
    this.listener(this);
  }
}
