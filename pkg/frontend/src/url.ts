/**
 * Shareable view URLs: `?dataset=ID#time=…&artifact=…&color=…`, the same
 * grammar the server parses. Unknown keys are ignored so links stay
 * forward-compatible.
 */

import { parseTimeMode, type TimeMode } from "./transforms.js";
import { colorModeSpec, parseColorMode, type ColorMode } from "./colors.js";

export interface ViewState {
  dataset: string;
  time: TimeMode;
  criterion: string;
  color: ColorMode;
  density: boolean;
  alpha: number;
  radius: number;
  transitionMs: number;
}

export const STATE_DEFAULTS = {
  time: "absolute" as TimeMode,
  criterion: "path",
  color: { kind: "year" } as ColorMode,
  density: true,
  alpha: 0.2,
  radius: 1,
  transitionMs: 400,
};

export interface StateDefaults {
  time?: string;
  artifact?: string;
  color?: string;
}

export function parseViewUrl(url: string, defaults: StateDefaults = {}): ViewState {
  const hashAt = url.indexOf("#");
  const queryPart = hashAt >= 0 ? url.slice(0, hashAt) : url;
  const fragmentPart = hashAt >= 0 ? url.slice(hashAt + 1) : "";
  const queryAt = queryPart.indexOf("?");
  const query = new URLSearchParams(queryAt >= 0 ? queryPart.slice(queryAt + 1) : "");
  const fragment = new URLSearchParams(fragmentPart);
  const pick = (key: string) => fragment.get(key) ?? query.get(key);

  const timeValue = pick("time") ?? defaults.time ?? STATE_DEFAULTS.time;
  const colorValue = pick("color") ?? defaults.color ?? colorModeSpec(STATE_DEFAULTS.color);
  const state: ViewState = {
    dataset: query.get("dataset") ?? fragment.get("dataset") ?? "",
    time: parseTimeMode(timeValue),
    criterion: pick("artifact") ?? defaults.artifact ?? STATE_DEFAULTS.criterion,
    color: parseColorMode(colorValue),
    density: STATE_DEFAULTS.density,
    alpha: STATE_DEFAULTS.alpha,
    radius: STATE_DEFAULTS.radius,
    transitionMs: STATE_DEFAULTS.transitionMs,
  };
  const density = pick("density");
  if (density !== null) state.density = density === "1" || density === "true";
  const alpha = pick("alpha");
  if (alpha !== null) {
    const parsed = Number(alpha);
    if (!Number.isFinite(parsed)) throw new Error(`bad number for alpha: ${alpha}`);
    state.alpha = parsed;
  }
  const radius = pick("radius");
  if (radius !== null) {
    const parsed = Number(radius);
    if (!Number.isInteger(parsed)) throw new Error(`bad integer for radius: ${radius}`);
    state.radius = parsed;
  }
  const duration = pick("transition");
  if (duration !== null) {
    const parsed = Number(duration);
    if (!Number.isFinite(parsed) || parsed < 0) throw new Error(`bad transition: ${duration}`);
    state.transitionMs = parsed;
  }
  return state;
}

export function serializeViewUrl(state: ViewState): string {
  const fragment = new URLSearchParams();
  fragment.set("time", state.time);
  fragment.set("artifact", state.criterion);
  fragment.set("color", colorModeSpec(state.color));
  if (state.density !== STATE_DEFAULTS.density) fragment.set("density", state.density ? "1" : "0");
  if (state.alpha !== STATE_DEFAULTS.alpha) fragment.set("alpha", String(state.alpha));
  if (state.radius !== STATE_DEFAULTS.radius) fragment.set("radius", String(state.radius));
  if (state.transitionMs !== STATE_DEFAULTS.transitionMs) {
    fragment.set("transition", String(state.transitionMs));
  }
  return `?dataset=${encodeURIComponent(state.dataset)}#${fragment.toString()}`;
}
