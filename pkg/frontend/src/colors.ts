/**
 * Dot color encodings. Classes and their default colors match the server's
 * histogram legend (carried in the bundle); per-event class codes are
 * recomputed locally. Code -1 = event carries no attribute, drawn gray.
 */

import type { Bundle } from "./bundle.js";

export const CATEGORICAL_PALETTE = [
  "#FF4A46", "#FF34FF", "#FFFF00", "#008941", "#1966FF", "#1CFFD9",
  "#C00069", "#FFDBE5", "#FF9900", "#8148D5", "#FF0066",
];

export const VARIATION_COLORS: Record<string, string> = {
  "-": "#FF4A46", // shrink
  "0": "#00AEFF", // stable
  "+": "#1FCB23", // grow
};

export const UNVALUED_COLOR = "#C0C0C0";

export interface ColorMode {
  kind: "year" | "ext" | "author" | "metric" | "delta" | "constant";
  metric?: string;
  constant?: string;
}

export function parseColorMode(value: string): ColorMode {
  const trimmed = value.trim();
  if (trimmed.startsWith("#")) {
    if (!/^#([0-9a-fA-F]{3}|[0-9a-fA-F]{6})$/.test(trimmed)) {
      throw new Error(`bad hex color ${value}`);
    }
    return { kind: "constant", constant: normalizeHex(trimmed) };
  }
  const [head, metric] = trimmed.split(":", 2);
  const aliases: Record<string, ColorMode["kind"]> = {
    year: "year", ext: "ext", type: "ext", author: "author",
    metric: "metric", delta: "delta", variation: "delta",
  };
  const kind = aliases[head.toLowerCase()];
  if (!kind) throw new Error(`unknown color mode ${value}`);
  if (metric && kind !== "metric" && kind !== "delta") {
    throw new Error(`color mode ${head} takes no metric name`);
  }
  return metric ? { kind, metric } : { kind };
}

export function colorModeSpec(mode: ColorMode): string {
  if (mode.kind === "constant") return mode.constant ?? "#000000";
  return mode.metric ? `${mode.kind}:${mode.metric}` : mode.kind;
}

function normalizeHex(hex: string): string {
  let body = hex.slice(1);
  if (body.length === 3) body = body.split("").map((c) => c + c).join("");
  return "#" + body.toUpperCase();
}

export function yearOfTs(ts: number): number {
  // civil-from-days, matching the server's vectorized calendar math
  const days = Math.floor(ts / 86400);
  const z = days + 719468;
  const era = Math.floor(z / 146097);
  const doe = z - era * 146097;
  const yoe = Math.floor(
    (doe - Math.floor(doe / 1460) + Math.floor(doe / 36524) - Math.floor(doe / 146096)) / 365,
  );
  let y = yoe + era * 400;
  const doy = doe - (365 * yoe + Math.floor(yoe / 4) - Math.floor(yoe / 100));
  const mp = Math.floor((5 * doy + 2) / 153);
  const month = mp < 10 ? mp + 3 : mp - 9;
  if (month <= 2) y += 1;
  return y;
}

export interface Classification {
  codes: Int32Array;
  labels: string[];
  colors: string[];
}

/** Per-event metric change vs. the previous valued event of the artifact. */
export function variationColumn(bundle: Bundle, metric: string): Float64Array {
  const values = bundle.evMetrics.get(metric);
  if (!values) throw new Error(`unknown metric ${metric}`);
  const out = new Float64Array(bundle.nEvents).fill(NaN);
  const lastSeen = new Float64Array(bundle.nArtifacts).fill(NaN);
  for (let i = 0; i < bundle.nEvents; i++) {
    const v = values[i];
    if (Number.isNaN(v)) continue;
    const artifact = bundle.evArtifact[i];
    const prev = lastSeen[artifact];
    out[i] = Number.isNaN(prev) ? 0 : v - prev;
    lastSeen[artifact] = v;
  }
  return out;
}

function resolveMetric(bundle: Bundle, mode: ColorMode): string {
  if (mode.metric) return mode.metric;
  if (!bundle.metrics.length) throw new Error(`color mode ${mode.kind} needs a metric`);
  return bundle.metrics[0].name;
}

export function classifyEvents(bundle: Bundle, mode: ColorMode): Classification {
  const n = bundle.nEvents;
  if (mode.kind === "constant") {
    return { codes: new Int32Array(n), labels: ["all"], colors: [mode.constant ?? "#000000"] };
  }
  if (mode.kind === "year") {
    const years = new Int32Array(n);
    const present = new Set<number>();
    for (let i = 0; i < n; i++) {
      years[i] = yearOfTs(bundle.evTs[i]);
      present.add(years[i]);
    }
    const ordered = [...present].sort((a, b) => a - b);
    const codeOf = new Map(ordered.map((year, idx) => [year, idx]));
    const codes = new Int32Array(n);
    for (let i = 0; i < n; i++) codes[i] = codeOf.get(years[i])!;
    const base = ordered[0] ?? 0;
    return {
      codes,
      labels: ordered.map(String),
      colors: ordered.map((y) => CATEGORICAL_PALETTE[(y - base) % CATEGORICAL_PALETTE.length]),
    };
  }
  if (mode.kind === "ext") {
    const codes = new Int32Array(n);
    for (let i = 0; i < n; i++) codes[i] = bundle.extCodes[bundle.evArtifact[i]];
    return {
      codes,
      labels: [...bundle.extTable],
      colors: bundle.extTable.map((_, i) => CATEGORICAL_PALETTE[i % CATEGORICAL_PALETTE.length]),
    };
  }
  if (mode.kind === "author") {
    const counts = new Int32Array(bundle.authorTable.length);
    for (let i = 0; i < n; i++) counts[bundle.evAuthor[i]]++;
    const order = bundle.authorTable
      .map((name, idx) => idx)
      .sort((a, b) => counts[b] - counts[a] || bundle.authorTable[a].localeCompare(bundle.authorTable[b]));
    const remap = new Int32Array(bundle.authorTable.length);
    order.forEach((authorIdx, rank) => (remap[authorIdx] = rank));
    const codes = new Int32Array(n);
    for (let i = 0; i < n; i++) codes[i] = remap[bundle.evAuthor[i]];
    return {
      codes,
      labels: order.map((idx) => bundle.authorTable[idx]),
      colors: order.map((_, i) => CATEGORICAL_PALETTE[i % CATEGORICAL_PALETTE.length]),
    };
  }
  const metric = resolveMetric(bundle, mode);
  if (mode.kind === "delta") {
    const deltas = variationColumn(bundle, metric);
    const codes = new Int32Array(n).fill(-1);
    for (let i = 0; i < n; i++) {
      const d = deltas[i];
      if (!Number.isNaN(d)) codes[i] = d < 0 ? 0 : d === 0 ? 1 : 2;
    }
    return {
      codes,
      labels: ["-", "0", "+"],
      colors: [VARIATION_COLORS["-"], VARIATION_COLORS["0"], VARIATION_COLORS["+"]],
    };
  }
  // metric mode: first class with value <= threshold, last class catches all
  const descriptor = bundle.metrics.find((m) => m.name === metric);
  const stops = descriptor?.stops ?? [];
  if (!stops.length) throw new Error(`metric ${metric} has no color stops`);
  const thresholds = stops.map(([t]) => (t === null ? Infinity : t));
  const values = bundle.evMetrics.get(metric)!;
  const codes = new Int32Array(n).fill(-1);
  for (let i = 0; i < n; i++) {
    const v = values[i];
    if (Number.isNaN(v)) continue;
    let cls = thresholds.length - 1;
    for (let s = 0; s < thresholds.length; s++) {
      if (v <= thresholds[s]) {
        cls = s;
        break;
      }
    }
    codes[i] = cls;
  }
  const labels = stops.map(([t], i) =>
    t === null ? `> ${formatStop(stops[i - 1]?.[0] ?? 0)}` : formatStop(t),
  );
  return { codes, labels, colors: stops.map(([, color]) => color.toUpperCase()) };
}

function formatStop(value: number | null): string {
  if (value === null) return "all";
  return Number.isInteger(value) ? String(value) : String(value);
}

/**
 * Legend + per-dot colors for a mode, honoring the bundle's stored legend
 * colors and any user overrides (the editable legend).
 */
export function resolveColors(
  bundle: Bundle,
  mode: ColorMode,
  overrides: Map<string, string>,
): Classification {
  const cls = classifyEvents(bundle, mode);
  const stored = bundle.histograms.get(colorModeSpec(mode));
  const colors = cls.labels.map((label, i) => {
    const override = overrides.get(label);
    if (override) return normalizeHex(override);
    const fromBundle = stored?.find((row) => row.label === label);
    return fromBundle ? normalizeHex(fromBundle.color) : cls.colors[i];
  });
  return { ...cls, colors };
}
