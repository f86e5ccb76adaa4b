/**
 * Interactive scatterplot app: control panel, canvas with zoom/pan/hover,
 * animated layout transitions, editable histogram legend, URL sync and PNG
 * export. Consumes the read-only server API; all layout math is shared with
 * the headless renderer.
 */

import { decodeBundle, eventDetails, type Bundle } from "./bundle.js";
import { artifactX, interpolateX } from "./layout.js";
import { yColumn } from "./transforms.js";
import { colorModeSpec, parseColorMode, resolveColors, UNVALUED_COLOR } from "./colors.js";
import { rasterize, type Viewport, FULL_VIEW } from "./compositor.js";
import { GridIndex } from "./spatial.js";
import { parseViewUrl, serializeViewUrl, STATE_DEFAULTS, type ViewState } from "./url.js";

interface CatalogEntry {
  id: string;
  artifacts: number;
  events: number;
  criteria: string[];
  color_modes: string[];
  defaults: { time: string; artifact: string; color: string };
}

export class App {
  private bundle: Bundle | null = null;
  private state: ViewState;
  private viewport: Viewport = { ...FULL_VIEW };
  private overrides = new Map<string, string>();
  private artifactXs: Float64Array | null = null; // current (possibly mid-transition)
  private targetXs: Float64Array | null = null;
  private animation: number | null = null;
  private index: GridIndex | null = null;
  private catalog: CatalogEntry[] = [];

  constructor(
    private root: Document,
    private serverBase: string = "",
  ) {
    this.state = parseViewUrl(window.location.search + window.location.hash);
  }

  private el<T extends HTMLElement>(id: string): T {
    const found = this.root.getElementById(id);
    if (!found) throw new Error(`missing #${id}`);
    return found as T;
  }

  async start(): Promise<void> {
    const resp = await fetch(`${this.serverBase}/datasets`);
    this.catalog = await resp.json();
    const select = this.el<HTMLSelectElement>("dataset");
    select.innerHTML = "";
    for (const entry of this.catalog) {
      const option = this.root.createElement("option");
      option.value = entry.id;
      option.textContent = `${entry.id} (${entry.events} events)`;
      select.appendChild(option);
    }
    if (!this.state.dataset && this.catalog.length) this.state.dataset = this.catalog[0].id;
    select.value = this.state.dataset;
    this.wireControls();
    await this.loadDataset(this.state.dataset);
  }

  private entry(): CatalogEntry | undefined {
    return this.catalog.find((e) => e.id === this.state.dataset);
  }

  private async loadDataset(id: string): Promise<void> {
    this.state.dataset = id;
    const entry = this.entry();
    const resp = await fetch(`${this.serverBase}/datasets/${id}/bundle`);
    this.bundle = await decodeBundle(await resp.arrayBuffer());
    if (entry && !entry.criteria.includes(this.state.criterion)) {
      this.state.criterion = entry.defaults.artifact;
    }
    this.overrides.clear();
    this.viewport = { ...FULL_VIEW };
    this.artifactXs = artifactX(this.bundle, this.state.criterion);
    this.targetXs = this.artifactXs;
    this.fillSelectors();
    this.redraw();
    this.syncUrl();
  }

  private fillSelectors(): void {
    if (!this.bundle) return;
    const criterion = this.el<HTMLSelectElement>("criterion");
    criterion.innerHTML = "";
    for (const { name } of this.bundle.criteria) {
      const option = this.root.createElement("option");
      option.value = name;
      option.textContent = name;
      criterion.appendChild(option);
    }
    criterion.value = this.state.criterion;

    const color = this.el<HTMLSelectElement>("color");
    color.innerHTML = "";
    for (const spec of this.bundle.colorModes) {
      const option = this.root.createElement("option");
      option.value = spec;
      option.textContent = spec;
      color.appendChild(option);
    }
    color.value = colorModeSpec(this.state.color);
    this.el<HTMLSelectElement>("time").value = this.state.time;
    this.el<HTMLInputElement>("density").checked = this.state.density;
    this.el<HTMLInputElement>("alpha").value = String(this.state.alpha);
    this.el<HTMLInputElement>("transition").value = String(this.state.transitionMs);
  }

  private wireControls(): void {
    this.el<HTMLSelectElement>("dataset").addEventListener("change", (e) => {
      void this.loadDataset((e.target as HTMLSelectElement).value);
    });
    this.el<HTMLSelectElement>("time").addEventListener("change", (e) => {
      this.state.time = (e.target as HTMLSelectElement).value as ViewState["time"];
      this.redraw();
      this.syncUrl();
    });
    this.el<HTMLSelectElement>("criterion").addEventListener("change", (e) => {
      this.setCriterion((e.target as HTMLSelectElement).value);
    });
    this.el<HTMLSelectElement>("color").addEventListener("change", (e) => {
      this.state.color = parseColorMode((e.target as HTMLSelectElement).value);
      this.overrides.clear();
      this.redraw();
      this.syncUrl();
    });
    this.el<HTMLInputElement>("density").addEventListener("change", (e) => {
      this.state.density = (e.target as HTMLInputElement).checked;
      this.redraw();
      this.syncUrl();
    });
    this.el<HTMLInputElement>("alpha").addEventListener("input", (e) => {
      this.state.alpha = Number((e.target as HTMLInputElement).value);
      this.redraw();
      this.syncUrl();
    });
    this.el<HTMLInputElement>("transition").addEventListener("input", (e) => {
      this.state.transitionMs = Number((e.target as HTMLInputElement).value);
      this.syncUrl();
    });
    this.el<HTMLButtonElement>("export").addEventListener("click", () => this.exportPng());
    this.el<HTMLButtonElement>("reset-zoom").addEventListener("click", () => {
      this.viewport = { ...FULL_VIEW };
      this.redraw();
    });

    const canvas = this.el<HTMLCanvasElement>("plot");
    canvas.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });
    canvas.addEventListener("mousedown", (e) => this.onDragStart(e));
    canvas.addEventListener("mousemove", (e) => this.onHover(e));
    canvas.addEventListener("mouseleave", () => this.hideTooltip());
  }

  /** Switch sort criterion, animating per-artifact x between the layouts. */
  setCriterion(name: string): void {
    if (!this.bundle) return;
    const from = this.targetXs ?? artifactX(this.bundle, this.state.criterion);
    const to = artifactX(this.bundle, name);
    this.state.criterion = name;
    this.targetXs = to;
    this.syncUrl();
    if (this.animation !== null) cancelAnimationFrame(this.animation);
    const duration = this.state.transitionMs;
    if (duration <= 0) {
      this.artifactXs = to;
      this.redraw();
      return;
    }
    const started = performance.now();
    const step = (now: number) => {
      const progress = Math.min((now - started) / duration, 1);
      this.artifactXs = interpolateX(from, to, progress);
      this.redraw(progress < 1);
      if (progress < 1) {
        this.animation = requestAnimationFrame(step);
      } else {
        this.animation = null;
      }
    };
    this.animation = requestAnimationFrame(step);
  }

  private eventXs(): Float64Array {
    const bundle = this.bundle!;
    const per = this.artifactXs ?? artifactX(bundle, this.state.criterion);
    const xs = new Float64Array(bundle.nEvents);
    for (let i = 0; i < bundle.nEvents; i++) xs[i] = per[bundle.evArtifact[i]];
    return xs;
  }

  redraw(transient = false): void {
    if (!this.bundle) return;
    const canvas = this.el<HTMLCanvasElement>("plot");
    const ctx = canvas.getContext("2d")!;
    const xs = this.eventXs();
    const ys = yColumn(this.bundle, this.state.time);
    const cls = resolveColors(this.bundle, this.state.color, this.overrides);
    const { pixels, dotsDrawn } = rasterize(xs, ys, cls.codes, cls.colors, UNVALUED_COLOR, {
      width: canvas.width,
      height: canvas.height,
      viewport: this.viewport,
      density: this.state.density,
      dotAlpha: this.state.alpha,
      dotRadiusPx: this.state.radius,
    });
    const image = ctx.createImageData(canvas.width, canvas.height);
    image.data.set(pixels);
    ctx.putImageData(image, 0, 0);
    this.el("status").textContent = `${dotsDrawn} events in view`;
    if (!transient) {
      this.index = new GridIndex(xs, ys);
      this.renderLegend(cls.labels, cls.colors);
    }
  }

  private renderLegend(labels: string[], colors: string[]): void {
    const bundle = this.bundle!;
    const legend = this.el("legend");
    legend.innerHTML = "";
    const rows = bundle.histograms.get(colorModeSpec(this.state.color));
    const counts = new Map(rows?.map((r) => [r.label, r.count]) ?? []);
    const maxCount = Math.max(1, ...(rows?.map((r) => r.count) ?? [1]));
    labels.forEach((label, i) => {
      const row = this.root.createElement("div");
      row.className = "legend-row";
      const swatch = this.root.createElement("input");
      swatch.type = "color";
      swatch.value = colors[i];
      swatch.title = `edit color for ${label || "(none)"}`;
      swatch.addEventListener("input", () => {
        this.overrides.set(label, swatch.value);
        this.redraw();
      });
      const count = counts.get(label) ?? 0;
      const bar = this.root.createElement("div");
      bar.className = "legend-bar";
      bar.style.width = `${Math.round((100 * count) / maxCount)}px`;
      bar.style.background = colors[i];
      const text = this.root.createElement("span");
      text.textContent = `${label || "(none)"} — ${count}`;
      row.append(swatch, bar, text);
      legend.appendChild(row);
    });
  }

  // --- interaction ---------------------------------------------------------

  private canvasToUnit(e: MouseEvent): { x: number; y: number } {
    const canvas = this.el<HTMLCanvasElement>("plot");
    const rect = canvas.getBoundingClientRect();
    const fx = (e.clientX - rect.left) / rect.width;
    const fy = (e.clientY - rect.top) / rect.height;
    return {
      x: this.viewport.x0 + fx * (this.viewport.x1 - this.viewport.x0),
      y: this.viewport.y0 + (1 - fy) * (this.viewport.y1 - this.viewport.y0),
    };
  }

  private onWheel(e: WheelEvent): void {
    e.preventDefault();
    const { x, y } = this.canvasToUnit(e);
    const factor = e.deltaY < 0 ? 0.85 : 1 / 0.85;
    const vp = this.viewport;
    const nx0 = x - (x - vp.x0) * factor;
    const nx1 = x + (vp.x1 - x) * factor;
    const ny0 = y - (y - vp.y0) * factor;
    const ny1 = y + (vp.y1 - y) * factor;
    if (nx1 - nx0 > 1e-6 && ny1 - ny0 > 1e-6) {
      this.viewport = { x0: nx0, x1: nx1, y0: ny0, y1: ny1 };
      this.redraw();
    }
  }

  private onDragStart(down: MouseEvent): void {
    const startVp = { ...this.viewport };
    const canvas = this.el<HTMLCanvasElement>("plot");
    const rect = canvas.getBoundingClientRect();
    const move = (e: MouseEvent) => {
      const dx = ((e.clientX - down.clientX) / rect.width) * (startVp.x1 - startVp.x0);
      const dy = ((e.clientY - down.clientY) / rect.height) * (startVp.y1 - startVp.y0);
      this.viewport = {
        x0: startVp.x0 - dx,
        x1: startVp.x1 - dx,
        y0: startVp.y0 + dy,
        y1: startVp.y1 + dy,
      };
      this.redraw(true);
    };
    const up = () => {
      window.removeEventListener("mousemove", move);
      window.removeEventListener("mouseup", up);
      this.redraw();
    };
    window.addEventListener("mousemove", move);
    window.addEventListener("mouseup", up);
  }

  private onHover(e: MouseEvent): void {
    if (!this.bundle || !this.index || e.buttons) return;
    const { x, y } = this.canvasToUnit(e);
    const canvas = this.el<HTMLCanvasElement>("plot");
    const radius = (8 / canvas.width) * (this.viewport.x1 - this.viewport.x0);
    const ordinal = this.index.nearest(x, y, radius);
    const tooltip = this.el("tooltip");
    if (ordinal === null) {
      this.hideTooltip();
      return;
    }
    const details = eventDetails(this.bundle, ordinal);
    const when = new Date(details.ts * 1000).toISOString().replace("T", " ").slice(0, 19);
    tooltip.textContent = `${details.path} @ ${when} (${details.commit.slice(0, 10)}, ${details.author})`;
    tooltip.style.display = "block";
    tooltip.style.left = `${e.clientX + 12}px`;
    tooltip.style.top = `${e.clientY + 12}px`;
  }

  private hideTooltip(): void {
    this.el("tooltip").style.display = "none";
  }

  /** Save the canvas at display resolution. */
  exportPng(): void {
    const canvas = this.el<HTMLCanvasElement>("plot");
    const link = this.root.createElement("a");
    link.download = `${this.state.dataset}-${this.state.criterion}-${this.state.time}.png`;
    link.href = canvas.toDataURL("image/png");
    link.click();
  }

  private syncUrl(): void {
    const url = serializeViewUrl(this.state);
    window.history.replaceState(null, "", url);
  }
}
