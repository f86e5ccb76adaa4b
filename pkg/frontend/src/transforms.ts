/**
 * Time-axis transforms, same math as the server renderer: every mode maps an
 * event into y in [0,1], with shared dataset-wide denominators for the
 * relative modes.
 */

import type { Bundle } from "./bundle.js";

export const TIME_MODES = ["absolute", "relstart", "relend", "relmedian", "normtime"] as const;
export type TimeMode = (typeof TIME_MODES)[number];

export function parseTimeMode(value: string): TimeMode {
  const lowered = value.toLowerCase();
  if (lowered === "normage") return "normtime"; // legacy alias
  if ((TIME_MODES as readonly string[]).includes(lowered)) return lowered as TimeMode;
  throw new Error(`unknown time mode ${value}`);
}

/** y coordinates for every event, in bundle (draw) order. */
export function yColumn(bundle: Bundle, mode: TimeMode): Float64Array {
  const n = bundle.nEvents;
  const y = new Float64Array(n);
  const { evTs, evArtifact, firstTs, lastTs, medianTs, ageS } = bundle;
  switch (mode) {
    case "absolute": {
      const span = bundle.tMax - bundle.tMin;
      for (let i = 0; i < n; i++) y[i] = span ? (evTs[i] - bundle.tMin) / span : 0.5;
      return y;
    }
    case "relstart": {
      const d = bundle.maxAgeS;
      for (let i = 0; i < n; i++) y[i] = d ? (evTs[i] - firstTs[evArtifact[i]]) / d : 0.5;
      return y;
    }
    case "relend": {
      const d = bundle.maxAgeS;
      for (let i = 0; i < n; i++) y[i] = d ? 1 + (evTs[i] - lastTs[evArtifact[i]]) / d : 0.5;
      return y;
    }
    case "relmedian": {
      const h = bundle.maxMedianDevS;
      for (let i = 0; i < n; i++) {
        y[i] = h ? 0.5 + (evTs[i] - medianTs[evArtifact[i]]) / (2 * h) : 0.5;
      }
      return y;
    }
    case "normtime": {
      for (let i = 0; i < n; i++) {
        const age = ageS[evArtifact[i]];
        y[i] = age ? (evTs[i] - firstTs[evArtifact[i]]) / age : 0.5;
      }
      return y;
    }
  }
}
