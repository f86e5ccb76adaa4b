/**
 * Decoder for the server's .evb bundles:
 * "EVOSCAT1" | uint32 LE header length | JSON header | zlib column payload.
 *
 * Permutations arrive precomputed; per-event y coordinates are cheap and are
 * derived client-side from the per-artifact stats columns.
 */

export interface MetricDescriptor {
  name: string;
  unit: string;
  kind: string;
  /** [threshold, "#RRGGBB"]; null threshold = catch-all above the last stop */
  stops: [number | null, string][];
}

export interface HistogramRow {
  label: string;
  count: number;
  color: string;
}

export interface Bundle {
  datasetId: string;
  nArtifacts: number;
  nEvents: number;
  nCommits: number;
  tMin: number;
  tMax: number;
  maxAgeS: number;
  maxMedianDevS: number;
  metrics: MetricDescriptor[];
  criteria: { name: string; spec: string }[];
  colorModes: string[];
  defaults: { time: string; artifact: string; color: string };
  paths: string[];
  extCodes: Int32Array;
  extTable: string[];
  firstTs: Float64Array;
  lastTs: Float64Array;
  medianTs: Float64Array;
  ageS: Float64Array;
  artifactEvents: Int32Array;
  metricFirst: Map<string, Float64Array>;
  metricLast: Map<string, Float64Array>;
  metricDelta: Map<string, Float64Array>;
  evArtifact: Int32Array;
  evTs: Float64Array;
  evKind: Uint8Array;
  evAuthor: Int32Array;
  authorTable: string[];
  evCommit: Int32Array;
  commitTable: string[];
  evMetrics: Map<string, Float64Array>;
  permutations: Map<string, Int32Array>;
  histograms: Map<string, HistogramRow[]>;
}

const MAGIC = "EVOSCAT1";

interface SectionMeta {
  name: string;
  kind: string;
  offset: number;
  nbytes: number;
}

async function inflate(compressed: Uint8Array): Promise<Uint8Array> {
  // "deflate" in the Compression Streams spec is the zlib-wrapped format
  const copy = new Uint8Array(compressed); // fresh, non-shared backing buffer
  const stream = new Blob([copy]).stream().pipeThrough(new DecompressionStream("deflate"));
  const buf = await new Response(stream).arrayBuffer();
  return new Uint8Array(buf);
}

function sliceBuffer(raw: Uint8Array, meta: SectionMeta): ArrayBuffer {
  if (meta.offset < 0 || meta.offset + meta.nbytes > raw.byteLength) {
    throw new Error(`section ${meta.name} out of payload bounds`);
  }
  // copy so typed-array views are element-aligned
  return raw.slice(meta.offset, meta.offset + meta.nbytes).buffer as ArrayBuffer;
}

function bigintsToFloat64(big: BigInt64Array): Float64Array {
  const out = new Float64Array(big.length);
  for (let i = 0; i < big.length; i++) out[i] = Number(big[i]);
  return out;
}

export async function decodeBundle(data: ArrayBuffer): Promise<Bundle> {
  const bytes = new Uint8Array(data);
  if (bytes.length < 12) throw new Error("bundle shorter than framing");
  const decoder = new TextDecoder();
  if (decoder.decode(bytes.subarray(0, 8)) !== MAGIC) throw new Error("bad magic");
  const headerLen = new DataView(data, 8, 4).getUint32(0, true);
  if (12 + headerLen > bytes.length) throw new Error("header extends past end of stream");
  const header = JSON.parse(decoder.decode(bytes.subarray(12, 12 + headerLen)));
  if (header.format_version !== 1) {
    throw new Error(`unsupported format version ${header.format_version}`);
  }
  const raw = await inflate(bytes.subarray(12 + headerLen));
  if (raw.length !== header.payload.nbytes_raw) {
    throw new Error("decompressed payload has unexpected size");
  }

  const sections = new Map<string, SectionMeta>();
  for (const meta of header.sections as SectionMeta[]) sections.set(meta.name, meta);

  const need = (name: string): SectionMeta => {
    const meta = sections.get(name);
    if (!meta) throw new Error(`missing section ${name}`);
    return meta;
  };
  const i32 = (name: string) => new Int32Array(sliceBuffer(raw, need(name)));
  const u8 = (name: string) => new Uint8Array(sliceBuffer(raw, need(name)));
  const f64 = (name: string) => new Float64Array(sliceBuffer(raw, need(name)));
  const i64 = (name: string) => bigintsToFloat64(new BigInt64Array(sliceBuffer(raw, need(name))));
  const json = (name: string) => {
    const meta = need(name);
    return JSON.parse(decoder.decode(raw.subarray(meta.offset, meta.offset + meta.nbytes)));
  };

  const tsDeltas = new BigInt64Array(sliceBuffer(raw, need("event.ts")));
  const evTs = new Float64Array(tsDeltas.length);
  let acc = 0n;
  for (let i = 0; i < tsDeltas.length; i++) {
    acc += tsDeltas[i];
    evTs[i] = Number(acc);
  }

  const commitMeta = need("event.commit_table");
  let commitTable: string[];
  if (commitMeta.kind === "hex20") {
    const packed = u8("event.commit_table");
    commitTable = [];
    for (let off = 0; off < packed.length; off += 20) {
      let hex = "";
      for (let i = 0; i < 20; i++) hex += packed[off + i].toString(16).padStart(2, "0");
      commitTable.push(hex);
    }
  } else {
    commitTable = json("event.commit_table");
  }

  const metricNames: string[] = (header.metrics as MetricDescriptor[]).map((m) => m.name);
  const metricMap = (prefix: string) => {
    const out = new Map<string, Float64Array>();
    for (const name of metricNames) out.set(name, f64(`${prefix}.${name}`));
    return out;
  };

  const permutations = new Map<string, Int32Array>();
  for (const { name } of header.criteria as { name: string }[]) {
    const perm = i32(`perm.${name}`);
    if (perm.length !== header.n_artifacts) throw new Error(`bad permutation ${name}`);
    permutations.set(name, perm);
  }

  const histograms = new Map<string, HistogramRow[]>();
  const histJson = json("histograms") as Record<string, [string, number, string][]>;
  for (const [mode, rows] of Object.entries(histJson)) {
    histograms.set(mode, rows.map(([label, count, color]) => ({ label, count, color })));
  }

  return {
    datasetId: header.dataset_id,
    nArtifacts: header.n_artifacts,
    nEvents: header.n_events,
    nCommits: header.n_commits,
    tMin: header.t_min,
    tMax: header.t_max,
    maxAgeS: header.max_age_s,
    maxMedianDevS: header.max_median_dev_s,
    metrics: header.metrics,
    criteria: header.criteria,
    colorModes: header.color_modes,
    defaults: header.defaults,
    paths: json("artifact.paths"),
    extCodes: i32("artifact.ext_code"),
    extTable: json("artifact.ext_table"),
    firstTs: i64("artifact.first_ts"),
    lastTs: i64("artifact.last_ts"),
    medianTs: i64("artifact.median_ts"),
    ageS: i64("artifact.age_s"),
    artifactEvents: i32("artifact.n_events"),
    metricFirst: metricMap("artifact.metric_first"),
    metricLast: metricMap("artifact.metric_last"),
    metricDelta: metricMap("artifact.metric_delta"),
    evArtifact: i32("event.artifact"),
    evTs,
    evKind: u8("event.kind"),
    evAuthor: i32("event.author"),
    authorTable: json("event.author_table"),
    evCommit: i32("event.commit"),
    commitTable,
    evMetrics: metricMap("event.metric"),
    permutations,
    histograms,
  };
}

export interface EventDetails {
  path: string;
  commit: string;
  ts: number;
  author: string;
  metrics: Record<string, number>;
}

export function eventDetails(bundle: Bundle, ordinal: number): EventDetails {
  const artifact = bundle.evArtifact[ordinal];
  const metrics: Record<string, number> = {};
  for (const [name, col] of bundle.evMetrics) {
    if (!Number.isNaN(col[ordinal])) metrics[name] = col[ordinal];
  }
  return {
    path: bundle.paths[artifact],
    commit: bundle.commitTable[bundle.evCommit[ordinal]],
    ts: bundle.evTs[ordinal],
    author: bundle.authorTable[bundle.evAuthor[ordinal]],
    metrics,
  };
}
