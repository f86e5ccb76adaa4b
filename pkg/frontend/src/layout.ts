/**
 * Artifact-axis layout: an artifact at rank r under a criterion sits at
 * x = (r + 0.5) / n; layout changes animate by linear interpolation of the
 * per-artifact x between the two permutations.
 */

import type { Bundle } from "./bundle.js";

export function rankOf(perm: Int32Array): Int32Array {
  const ranks = new Int32Array(perm.length);
  for (let rank = 0; rank < perm.length; rank++) ranks[perm[rank]] = rank;
  return ranks;
}

/** Per-artifact x positions for one criterion. */
export function artifactX(bundle: Bundle, criterion: string): Float64Array {
  const perm = bundle.permutations.get(criterion);
  if (!perm) throw new Error(`criterion ${criterion} not in bundle`);
  const ranks = rankOf(perm);
  const n = bundle.nArtifacts;
  const xs = new Float64Array(n);
  for (let i = 0; i < n; i++) xs[i] = (ranks[i] + 0.5) / n;
  return xs;
}

/** Per-event x positions (events in bundle draw order). */
export function xColumn(bundle: Bundle, criterion: string): Float64Array {
  const perArtifact = artifactX(bundle, criterion);
  const xs = new Float64Array(bundle.nEvents);
  for (let i = 0; i < bundle.nEvents; i++) xs[i] = perArtifact[bundle.evArtifact[i]];
  return xs;
}

/**
 * Linear interpolation between two layouts; progress 0 = from, 1 = to.
 * Endpoints are exact so a finished transition equals the target layout.
 */
export function interpolateX(from: Float64Array, to: Float64Array, progress: number): Float64Array {
  if (progress <= 0) return from.slice();
  if (progress >= 1) return to.slice();
  const out = new Float64Array(from.length);
  for (let i = 0; i < from.length; i++) out[i] = from[i] + (to[i] - from[i]) * progress;
  return out;
}
