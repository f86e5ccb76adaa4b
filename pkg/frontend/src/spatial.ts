/**
 * Uniform grid over unit layout space for hover lookups; same contract as
 * the server's index (nearest by Euclidean distance within a radius, ties to
 * the lower event ordinal).
 */

const MEAN_OCCUPANCY = 8;

export class GridIndex {
  readonly dim: number;
  private readonly cell: number;
  private readonly cells: Int32Array[];

  constructor(private xs: Float64Array, private ys: Float64Array) {
    const n = xs.length;
    const minCells = Math.max(1, Math.ceil(n / MEAN_OCCUPANCY));
    this.dim = Math.ceil(Math.sqrt(minCells));
    this.cell = 1 / this.dim;
    const buckets: number[][] = Array.from({ length: this.dim * this.dim }, () => []);
    for (let i = 0; i < n; i++) {
      const cx = Math.min(Math.max(Math.floor(xs[i] * this.dim), 0), this.dim - 1);
      const cy = Math.min(Math.max(Math.floor(ys[i] * this.dim), 0), this.dim - 1);
      buckets[cx * this.dim + cy].push(i);
    }
    this.cells = buckets.map((b) => Int32Array.from(b));
  }

  nearest(x: number, y: number, radius: number): number | null {
    if (this.xs.length === 0 || radius <= 0) return null;
    const cx = Math.min(Math.max(Math.floor(x * this.dim), 0), this.dim - 1);
    const cy = Math.min(Math.max(Math.floor(y * this.dim), 0), this.dim - 1);
    let bestD2 = radius * radius;
    let best: number | null = null;
    for (let ring = 0; ring <= this.dim; ring++) {
      const lower = (ring - 1) * this.cell;
      if (ring > 1 && lower * lower > bestD2) break;
      for (let gx = cx - ring; gx <= cx + ring; gx++) {
        if (gx < 0 || gx >= this.dim) continue;
        for (let gy = cy - ring; gy <= cy + ring; gy++) {
          if (gy < 0 || gy >= this.dim) continue;
          if (Math.max(Math.abs(gx - cx), Math.abs(gy - cy)) !== ring) continue;
          for (const i of this.cells[gx * this.dim + gy]) {
            const dx = this.xs[i] - x;
            const dy = this.ys[i] - y;
            const d2 = dx * dx + dy * dy;
            if (d2 < bestD2 || (d2 === bestD2 && (best === null || i < best))) {
              bestD2 = d2;
              best = i;
            }
          }
        }
      }
    }
    return best;
  }
}
