/** DOM wiring: mounts the three sections and the scenario panel.
 *
 * Every section loads independently and failures render as an error card in
 * that section only; the rest of the page keeps working. All logic that
 * touches data lives in the pure modules (sections/charts/map/scenario);
 * this file only moves view models into elements.
 */

import { ApiClient } from "./client.js";
import {
  SECTIONS,
  loadHistorySection,
  loadLiveSection,
  loadMapSection,
  type LiveSection,
} from "./sections.js";
import { ScenarioPanel, SLIDER_MAX, SLIDER_MIN } from "./scenario.js";
import { buildOverlay } from "./scenario.js";
import { initialState } from "./state.js";
import type { ChartModel } from "./charts.js";

const API_BASE =
  (globalThis as { LAGOONTWIN_API?: string }).LAGOONTWIN_API ?? "";

const client = new ApiClient({ baseUrl: API_BASE });
const state = initialState();
const panel = new ScenarioPanel(client, renderScenarioPanel);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function errorCard(section: HTMLElement, message: string): void {
  section.replaceChildren(
    el("div", "error-card", `This panel is unavailable: ${message}`),
  );
}

function svgChart(chart: ChartModel): SVGSVGElement {
  const ns = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(ns, "svg");
  svg.setAttribute("viewBox", `0 0 ${chart.width} ${chart.height}`);
  svg.setAttribute("class", "chart");
  const series = document.createElementNS(ns, "path");
  series.setAttribute("d", chart.seriesPath);
  series.setAttribute("class", "series-line");
  svg.appendChild(series);
  if (chart.forecastPath) {
    const forecast = document.createElementNS(ns, "path");
    forecast.setAttribute("d", chart.forecastPath);
    forecast.setAttribute("class", "forecast-line");
    svg.appendChild(forecast);
  }
  if (chart.nowX !== null) {
    const divider = document.createElementNS(ns, "line");
    divider.setAttribute("x1", String(chart.nowX));
    divider.setAttribute("x2", String(chart.nowX));
    divider.setAttribute("y1", "0");
    divider.setAttribute("y2", String(chart.height));
    divider.setAttribute("class", "now-divider");
    svg.appendChild(divider);
  }
  return svg;
}

async function renderMapSection(): Promise<void> {
  const section = document.getElementById("section-map")!;
  try {
    const { model } = await loadMapSection(client, state.variable);
    const ns = "http://www.w3.org/2000/svg";
    const svg = document.createElementNS(ns, "svg");
    svg.setAttribute("viewBox", `0 0 ${model.width} ${model.height}`);
    svg.setAttribute("class", "map");
    for (const marker of model.markers) {
      const group = document.createElementNS(ns, "g");
      group.setAttribute("class", "marker");
      group.addEventListener("click", () => {
        state.station = marker.stationId;
        void renderLiveSection();
      });
      const dot = document.createElementNS(ns, "circle");
      dot.setAttribute("cx", String(marker.x));
      dot.setAttribute("cy", String(marker.y));
      dot.setAttribute("r", "6");
      group.appendChild(dot);
      const label = document.createElementNS(ns, "text");
      label.setAttribute("x", String(marker.x + 9));
      label.setAttribute("y", String(marker.y + 4));
      label.textContent =
        marker.latestValue === null
          ? marker.name
          : `${marker.name}: ${marker.latestValue} ${marker.unit ?? ""}`;
      group.appendChild(label);
      svg.appendChild(group);
    }
    section.replaceChildren(svg);
  } catch (error) {
    errorCard(section, String(error));
  }
}

function renderLive(section: HTMLElement, live: LiveSection): void {
  const header = el(
    "p",
    "panel-meta",
    `${live.series.station} / ${live.series.variable} [${live.series.unit}]` +
      (live.forecast
        ? ` — model ${live.forecast.model_version}` +
          (live.forecast.stale ? " (stale snapshot)" : "")
        : " — no model registered"),
  );
  section.replaceChildren(header, svgChart(live.chart));
}

async function renderLiveSection(): Promise<void> {
  const section = document.getElementById("section-live")!;
  if (!state.station) {
    section.replaceChildren(el("p", "panel-meta", "Pick a station on the map."));
    return;
  }
  try {
    const live = await loadLiveSection(client, state.station, state.variable, state.horizon);
    renderLive(section, live);
    panel.advertise(live.forecast?.exog_variables ?? []);
  } catch (error) {
    errorCard(section, String(error));
  }
}

async function renderHistorySection(): Promise<void> {
  const section = document.getElementById("section-history")!;
  if (!state.station) {
    section.replaceChildren(el("p", "panel-meta", "Pick a station on the map."));
    return;
  }
  const to = new Date();
  const from = new Date(to.getTime() - 90 * 86_400_000);
  try {
    const history = await loadHistorySection(
      client,
      state.station,
      state.variable,
      from.toISOString().replace(/\.\d+Z$/, "Z"),
      to.toISOString().replace(/\.\d+Z$/, "Z"),
    );
    section.replaceChildren(svgChart(history.chart));
  } catch (error) {
    errorCard(section, String(error));
  }
}

function renderScenarioPanel(): void {
  const host = document.getElementById("scenario-panel")!;
  host.replaceChildren();
  if (!panel.enabled) {
    host.appendChild(
      el("p", "panel-meta", "Scenario controls unlock when the selected " +
        "series has a model with perturbable inputs."),
    );
    return;
  }
  for (const variable of panel.exogVariables) {
    const row = el("div", "control-row");
    row.appendChild(el("label", "", `${variable} ×`));
    const slider = el("input") as HTMLInputElement;
    slider.type = "range";
    slider.min = String(SLIDER_MIN);
    slider.max = String(SLIDER_MAX);
    slider.step = "0.05";
    slider.value = String(panel.controls.multipliers[variable] ?? 1);
    slider.addEventListener("input", () => {
      panel.setMultiplier(variable, Number(slider.value));
    });
    row.appendChild(slider);
    const offset = el("input") as HTMLInputElement;
    offset.type = "number";
    offset.step = "0.1";
    offset.value = String(panel.controls.offsets[variable] ?? 0);
    offset.addEventListener("input", () => {
      panel.setOffset(variable, Number(offset.value));
    });
    row.appendChild(el("label", "", "+"));
    row.appendChild(offset);
    host.appendChild(row);
  }
  const submit = el("button", "", "Run scenario");
  submit.addEventListener("click", () => {
    if (state.station) void panel.submit(state.station, state.horizon);
  });
  host.appendChild(submit);
  if (panel.lastError) {
    host.appendChild(el("p", "error-card", panel.lastError));
  } else if (panel.lastResult) {
    const overlay = buildOverlay(panel.lastResult);
    host.appendChild(
      el(
        "p",
        overlay.overlapping ? "overlay identical" : "overlay",
        `baseline ${overlay.baseline} → perturbed ${overlay.perturbed} ` +
          `(delta ${overlay.delta}, model ${overlay.modelVersion})`,
      ),
    );
  }
}

export function mount(): void {
  const root = document.getElementById("app")!;
  for (const spec of SECTIONS) {
    const wrapper = el("section", "panel");
    wrapper.appendChild(el("h2", "", spec.title));
    const body = el("div");
    body.id = `section-${spec.id}`;
    wrapper.appendChild(body);
    if (spec.id === "live") {
      const scenarioHost = el("div");
      scenarioHost.id = "scenario-panel";
      wrapper.appendChild(scenarioHost);
    }
    root.appendChild(wrapper);
  }
  void renderMapSection();
  void renderLiveSection();
  void renderHistorySection();
  renderScenarioPanel();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount();
}
