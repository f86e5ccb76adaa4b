import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { decodeBundle, type Bundle } from "../src/bundle.js";

const here = dirname(fileURLToPath(import.meta.url));

export interface ExpectedView {
  time: string;
  criterion: string;
  width: number;
  height: number;
  cx: number[];
  cy: number[];
}

export interface Expected {
  dataset_id: string;
  n_artifacts: number;
  n_events: number;
  n_commits: number;
  t_min: number;
  t_max: number;
  criteria: string[];
  color_modes: string[];
  first_ts: number[];
  histogram_year: [string, number][];
  views: ExpectedView[];
  probes: {
    x: number;
    y: number;
    r: number;
    time: string;
    criterion: string;
    ordinal: number;
    commit: string;
    ts: number;
    path: string;
  }[];
}

export function loadExpected(): Expected {
  return JSON.parse(readFileSync(join(here, "fixtures", "expected.json"), "utf-8"));
}

export async function loadFixtureBundle(): Promise<Bundle> {
  const raw = readFileSync(join(here, "fixtures", "fixture.evb"));
  return decodeBundle(raw.buffer.slice(raw.byteOffset, raw.byteOffset + raw.byteLength));
}
