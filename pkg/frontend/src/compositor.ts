/**
 * Software rasterizer with the same compositing semantics as the server:
 * dots drawn in event order, source-over with a fixed alpha in density mode,
 * flattened onto white. k exact overlaps reach opacity 1-(1-a)^k.
 */

export interface Viewport {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

export const FULL_VIEW: Viewport = { x0: 0, x1: 1, y0: 0, y1: 1 };

export interface RasterOptions {
  width: number;
  height: number;
  viewport?: Viewport;
  density: boolean;
  dotAlpha: number;
  dotRadiusPx: number;
}

export interface RasterResult {
  /** RGBA pixels, opaque, white background. */
  pixels: Uint8ClampedArray;
  dotsDrawn: number;
}

function stampOffsets(radius: number): [number, number][] {
  if (radius <= 1) return [[0, 0]];
  const r = radius - 0.5;
  const offsets: [number, number][] = [];
  for (let dy = -radius; dy <= radius; dy++) {
    for (let dx = -radius; dx <= radius; dx++) {
      if (dx * dx + dy * dy <= r * r) offsets.push([dx, dy]);
    }
  }
  return offsets;
}

function hexChannels(hex: string): [number, number, number] {
  let body = hex.replace("#", "");
  if (body.length === 3) body = body.split("").map((c) => c + c).join("");
  return [
    parseInt(body.slice(0, 2), 16) / 255,
    parseInt(body.slice(2, 4), 16) / 255,
    parseInt(body.slice(4, 6), 16) / 255,
  ];
}

export function rasterize(
  xs: Float64Array,
  ys: Float64Array,
  colorCodes: Int32Array,
  classColors: string[],
  unvaluedColor: string,
  options: RasterOptions,
): RasterResult {
  const { width: w, height: h } = options;
  const vp = options.viewport ?? FULL_VIEW;
  const alpha = options.density ? options.dotAlpha : 1.0;
  const offsets = stampOffsets(options.dotRadiusPx);

  const lut: [number, number, number][] = [hexChannels(unvaluedColor)];
  for (const color of classColors) lut.push(hexChannels(color));

  // premultiplied accumulation buffers
  const premul = new Float64Array(w * h * 3);
  const coverage = new Float64Array(w * h);
  const spanX = vp.x1 - vp.x0;
  const spanY = vp.y1 - vp.y0;
  let dotsDrawn = 0;

  for (let i = 0; i < xs.length; i++) {
    const x = xs[i];
    const y = ys[i];
    if (x < vp.x0 || x > vp.x1 || y < vp.y0 || y > vp.y1) continue;
    dotsDrawn++;
    const px = Math.min(Math.floor(((x - vp.x0) / spanX) * w), w - 1);
    const row = h - 1 - Math.min(Math.floor(((y - vp.y0) / spanY) * h), h - 1);
    const [r, g, b] = lut[colorCodes[i] + 1];
    for (const [dx, dy] of offsets) {
      const cx = px + dx;
      const cy = row + dy;
      if (cx < 0 || cx >= w || cy < 0 || cy >= h) continue;
      const p = cy * w + cx;
      const keep = 1 - alpha;
      premul[p * 3] = r * alpha + premul[p * 3] * keep;
      premul[p * 3 + 1] = g * alpha + premul[p * 3 + 1] * keep;
      premul[p * 3 + 2] = b * alpha + premul[p * 3 + 2] * keep;
      coverage[p] = alpha + coverage[p] * keep;
    }
  }

  const pixels = new Uint8ClampedArray(w * h * 4);
  for (let p = 0; p < w * h; p++) {
    const white = 1 - coverage[p];
    pixels[p * 4] = (premul[p * 3] + white) * 255;
    pixels[p * 4 + 1] = (premul[p * 3 + 1] + white) * 255;
    pixels[p * 4 + 2] = (premul[p * 3 + 2] + white) * 255;
    pixels[p * 4 + 3] = 255;
  }
  return { pixels, dotsDrawn };
}
