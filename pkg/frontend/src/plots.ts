import { makeScale, Scale } from "./scales";
import { BrushSelection, PlotSpec, Rect, ResultBundle } from "./types";

const WIDTH = 340;
const HEIGHT = 240;
const MARGIN = { left: 58, right: 14, top: 10, bottom: 34 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const TECH_COLORS = [
  "#2e7d32", "#c62828", "#1565c0", "#ef6c00", "#6a1b9a",
  "#00838f", "#9e9d24", "#4e342e", "#37474f", "#ad1457",
];

const POLARITY_SHAPES: Record<string, string> = {
  optimistic: "circle",
  pessimistic: "triangle",
  reference: "square",
  custom: "diamond",
};

export interface PlotCallbacks {
  onBrush(plotId: string, brush: BrushSelection | null): void;
  onPointClick(rowIndex: number): void;
}

export function technologyColor(bundle: ResultBundle, technology: string): string {
  const all = [...new Set(bundle.text.get("technology")?.filter((t): t is string => t !== null) ?? [])].sort();
  const index = all.indexOf(technology);
  return TECH_COLORS[(index < 0 ? 0 : index) % TECH_COLORS.length] ?? "#555";
}

function shapePath(shape: string, cx: number, cy: number, r: number): string {
  switch (shape) {
    case "triangle":
      return `M${cx},${cy - r} L${cx + r},${cy + r} L${cx - r},${cy + r} Z`;
    case "square":
      return `M${cx - r},${cy - r} h${2 * r} v${2 * r} h${-2 * r} Z`;
    case "diamond":
      return `M${cx},${cy - r} L${cx + r},${cy} L${cx},${cy + r} L${cx - r},${cy} Z`;
    default:
      return "";
  }
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-2) return value.toExponential(1);
  return String(Math.round(value * 100) / 100);
}

const SVG_NS = "http://www.w3.org/2000/svg";

/** One linked scatter plot: dims filtered-out points, supports click-drag
 * brushing (drag to select, click on empty space to clear) and point-click
 * detail callbacks. Rendering never mutates the bundle. */
export class ScatterPlot {
  readonly spec: PlotSpec;
  private readonly bundle: ResultBundle;
  private readonly callbacks: PlotCallbacks;
  private readonly svg: SVGSVGElement;
  private readonly pointsGroup: SVGGElement;
  private readonly brushRect: SVGRectElement;
  private xScale: Scale;
  private yScale: Scale;
  private dragStart: { px: number; py: number } | null = null;

  constructor(container: HTMLElement, bundle: ResultBundle, spec: PlotSpec,
              callbacks: PlotCallbacks) {
    this.bundle = bundle;
    this.spec = spec;
    this.callbacks = callbacks;

    const xs = bundle.numeric.get(spec.x) ?? new Float64Array(0);
    const ys = bundle.numeric.get(spec.y) ?? new Float64Array(0);
    this.xScale = makeScale(xs, spec.logX, PLOT_W);
    this.yScale = makeScale(ys, spec.logY, PLOT_H);

    const figure = document.createElement("figure");
    figure.className = "plot";
    const caption = document.createElement("figcaption");
    caption.textContent = spec.title;
    figure.appendChild(caption);

    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    this.svg.setAttribute("width", String(WIDTH));
    this.svg.setAttribute("height", String(HEIGHT));
    figure.appendChild(this.svg);

    this.drawAxes();
    this.pointsGroup = document.createElementNS(SVG_NS, "g");
    this.svg.appendChild(this.pointsGroup);

    this.brushRect = document.createElementNS(SVG_NS, "rect");
    this.brushRect.setAttribute("class", "brush");
    this.brushRect.setAttribute("display", "none");
    this.svg.appendChild(this.brushRect);

    this.svg.addEventListener("pointerdown", (e) => this.beginDrag(e));
    this.svg.addEventListener("pointermove", (e) => this.moveDrag(e));
    this.svg.addEventListener("pointerup", (e) => this.endDrag(e));
    container.appendChild(figure);
  }

  private toPlotCoords(event: PointerEvent): { px: number; py: number } {
    const box = this.svg.getBoundingClientRect();
    const sx = WIDTH / box.width;
    const sy = HEIGHT / box.height;
    return {
      px: (event.clientX - box.left) * sx - MARGIN.left,
      py: PLOT_H - ((event.clientY - box.top) * sy - MARGIN.top),
    };
  }

  private beginDrag(event: PointerEvent): void {
    this.svg.setPointerCapture(event.pointerId);
    this.dragStart = this.toPlotCoords(event);
  }

  private moveDrag(event: PointerEvent): void {
    if (!this.dragStart) return;
    const now = this.toPlotCoords(event);
    this.showBrushRect(this.dragStart, now);
  }

  private endDrag(event: PointerEvent): void {
    if (!this.dragStart) return;
    const start = this.dragStart;
    this.dragStart = null;
    const end = this.toPlotCoords(event);
    const moved = Math.abs(end.px - start.px) > 3 || Math.abs(end.py - start.py) > 3;
    if (!moved) {
      this.brushRect.setAttribute("display", "none");
      const hit = this.hitTest(start.px, start.py);
      if (hit >= 0) {
        this.callbacks.onPointClick(hit);
      } else {
        this.callbacks.onBrush(this.spec.id, null); // click-away clears
      }
      return;
    }
    const rect: Rect = {
      x0: this.xScale.fromPixel(Math.min(start.px, end.px)),
      x1: this.xScale.fromPixel(Math.max(start.px, end.px)),
      y0: this.yScale.fromPixel(Math.min(start.py, end.py)),
      y1: this.yScale.fromPixel(Math.max(start.py, end.py)),
    };
    this.callbacks.onBrush(this.spec.id, { x: this.spec.x, y: this.spec.y, rect });
  }

  private showBrushRect(a: { px: number; py: number }, b: { px: number; py: number }): void {
    const x = Math.min(a.px, b.px) + MARGIN.left;
    const y = MARGIN.top + PLOT_H - Math.max(a.py, b.py);
    this.brushRect.setAttribute("x", String(x));
    this.brushRect.setAttribute("y", String(y));
    this.brushRect.setAttribute("width", String(Math.abs(a.px - b.px)));
    this.brushRect.setAttribute("height", String(Math.abs(a.py - b.py)));
    this.brushRect.setAttribute("display", "block");
  }

  private hitTest(px: number, py: number): number {
    const xs = this.bundle.numeric.get(this.spec.x);
    const ys = this.bundle.numeric.get(this.spec.y);
    if (!xs || !ys) return -1;
    let best = -1;
    let bestDist = 36; // 6px radius
    for (let row = 0; row < this.bundle.rowCount; row++) {
      const x = this.xScale.toPixel(xs[row] ?? NaN);
      const y = this.yScale.toPixel(ys[row] ?? NaN);
      if (Number.isNaN(x) || Number.isNaN(y)) continue;
      const d = (x - px) ** 2 + (y - py) ** 2;
      if (d < bestDist) {
        best = row;
        bestDist = d;
      }
    }
    return best;
  }

  private drawAxes(): void {
    const axes = document.createElementNS(SVG_NS, "g");
    axes.setAttribute("class", "axes");
    const frame = document.createElementNS(SVG_NS, "rect");
    frame.setAttribute("x", String(MARGIN.left));
    frame.setAttribute("y", String(MARGIN.top));
    frame.setAttribute("width", String(PLOT_W));
    frame.setAttribute("height", String(PLOT_H));
    axes.appendChild(frame);
    const labels: Array<[number, number, string, string]> = [
      [MARGIN.left, HEIGHT - 12, formatTick(this.xScale.lo), "start"],
      [MARGIN.left + PLOT_W, HEIGHT - 12, formatTick(this.xScale.hi), "end"],
      [MARGIN.left - 6, MARGIN.top + PLOT_H, formatTick(this.yScale.lo), "end"],
      [MARGIN.left - 6, MARGIN.top + 10, formatTick(this.yScale.hi), "end"],
    ];
    for (const [x, y, text, anchor] of labels) {
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(x));
      label.setAttribute("y", String(y));
      label.setAttribute("text-anchor", anchor);
      label.textContent = text;
      axes.appendChild(label);
    }
    this.svg.appendChild(axes);
  }

  render(visible: Set<number>, activeBrush: BrushSelection | null): void {
    this.pointsGroup.replaceChildren();
    const xs = this.bundle.numeric.get(this.spec.x);
    const ys = this.bundle.numeric.get(this.spec.y);
    if (!xs || !ys) return;
    const technologies = this.bundle.text.get("technology");
    const polarities = this.bundle.text.get("polarity");
    for (let row = 0; row < this.bundle.rowCount; row++) {
      const xPixel = this.xScale.toPixel(xs[row] ?? NaN);
      const yPixel = this.yScale.toPixel(ys[row] ?? NaN);
      if (Number.isNaN(xPixel) || Number.isNaN(yPixel)) continue;
      const cx = MARGIN.left + xPixel;
      const cy = MARGIN.top + PLOT_H - yPixel;
      const color = technologyColor(this.bundle, technologies?.[row] ?? "");
      const shape = POLARITY_SHAPES[polarities?.[row] ?? "custom"] ?? "diamond";
      let node: SVGElement;
      if (shape === "circle") {
        node = document.createElementNS(SVG_NS, "circle");
        node.setAttribute("cx", String(cx));
        node.setAttribute("cy", String(cy));
        node.setAttribute("r", "3.2");
      } else {
        node = document.createElementNS(SVG_NS, "path");
        node.setAttribute("d", shapePath(shape, cx, cy, 3.6));
      }
      node.setAttribute("fill", color);
      node.setAttribute("class", visible.has(row) ? "pt" : "pt dim");
      node.setAttribute("data-row", String(row));
      this.pointsGroup.appendChild(node);
    }

    if (activeBrush) {
      const x0 = this.xScale.toPixel(Math.max(activeBrush.rect.x0, -Number.MAX_VALUE));
      const x1 = this.xScale.toPixel(activeBrush.rect.x1);
      const y0 = this.yScale.toPixel(Math.max(activeBrush.rect.y0, -Number.MAX_VALUE));
      const y1 = this.yScale.toPixel(activeBrush.rect.y1);
      this.brushRect.setAttribute("x", String(MARGIN.left + Math.min(x0, x1)));
      this.brushRect.setAttribute("y", String(MARGIN.top + PLOT_H - Math.max(y0, y1)));
      this.brushRect.setAttribute("width", String(Math.abs(x1 - x0)));
      this.brushRect.setAttribute("height", String(Math.abs(y1 - y0)));
      this.brushRect.setAttribute("display", "block");
    } else {
      this.brushRect.setAttribute("display", "none");
    }
  }
}
