import { loadBundle, parseBundle } from "./bundle";
import { refinedConfig } from "./exportConfig";
import {
  emptyFilterState,
  visibleIndices,
  withBrush,
  withCategories,
  withRange,
} from "./filters";
import { ScatterPlot, technologyColor } from "./plots";
import { BrushSelection, DEFAULT_PLOTS, FilterState, ResultBundle } from "./types";
import "./style.css";

const SLIDER_COLUMNS: Array<{ column: string; label: string; mode: "max" | "min" }> = [
  { column: "total_power_mw", label: "Max total power [mW]", mode: "max" },
  { column: "utilization", label: "Max occupancy [s/s]", mode: "max" },
  { column: "lifetime_s", label: "Min lifetime [s]", mode: "min" },
  { column: "accuracy", label: "Min accuracy", mode: "min" },
];

const CATEGORY_COLUMNS = ["technology", "polarity", "opt_target"];

class App {
  private bundle: ResultBundle;
  private state: FilterState = emptyFilterState();
  private initialVisible: number;
  private plots: ScatterPlot[] = [];
  private root: HTMLElement;
  private header!: HTMLElement;
  private exportButton!: HTMLButtonElement;
  private detail!: HTMLElement;

  constructor(root: HTMLElement, bundle: ResultBundle) {
    this.root = root;
    this.bundle = bundle;
    this.initialVisible = bundle.rowCount;
    this.buildLayout();
    this.update();
  }

  private buildLayout(): void {
    this.root.replaceChildren();

    this.header = document.createElement("header");
    this.root.appendChild(this.header);

    const controls = document.createElement("section");
    controls.className = "controls";
    for (const slider of SLIDER_COLUMNS) {
      if (!this.bundle.numeric.has(slider.column)) continue;
      controls.appendChild(this.buildSlider(slider.column, slider.label, slider.mode));
    }
    for (const column of CATEGORY_COLUMNS) {
      controls.appendChild(this.buildCategoryGroup(column));
    }
    const actions = document.createElement("div");
    actions.className = "actions";
    const clear = document.createElement("button");
    clear.textContent = "Clear filters & brushes";
    clear.addEventListener("click", () => {
      this.state = emptyFilterState();
      this.buildLayout();
      this.update();
    });
    actions.appendChild(clear);
    this.exportButton = document.createElement("button");
    this.exportButton.textContent = "Export refined config";
    this.exportButton.addEventListener("click", () => this.exportConfig());
    actions.appendChild(this.exportButton);
    controls.appendChild(actions);
    this.root.appendChild(controls);

    const grid = document.createElement("section");
    grid.className = "plot-grid";
    this.plots = [];
    for (const spec of DEFAULT_PLOTS) {
      if (!this.bundle.numeric.has(spec.x) || !this.bundle.numeric.has(spec.y)) continue;
      this.plots.push(
        new ScatterPlot(grid, this.bundle, spec, {
          onBrush: (plotId, brush) => this.handleBrush(plotId, brush),
          onPointClick: (row) => this.showDetail(row),
        })
      );
    }
    this.root.appendChild(grid);

    this.detail = document.createElement("aside");
    this.detail.className = "detail hidden";
    this.root.appendChild(this.detail);
  }

  private buildSlider(column: string, label: string, mode: "max" | "min"): HTMLElement {
    const wrap = document.createElement("label");
    wrap.className = "slider";
    const caption = document.createElement("span");
    caption.textContent = label;
    wrap.appendChild(caption);
    const input = document.createElement("input");
    input.type = "number";
    input.step = "any";
    input.placeholder = "off";
    input.addEventListener("change", () => {
      const value = input.value === "" ? undefined : Number(input.value);
      this.state =
        mode === "max"
          ? withRange(this.state, column, undefined, value)
          : withRange(this.state, column, value, undefined);
      this.update();
    });
    wrap.appendChild(input);
    return wrap;
  }

  private buildCategoryGroup(column: string): HTMLElement {
    const values = [...new Set(
      (this.bundle.text.get(column) ?? []).filter((v): v is string => v !== null)
    )].sort();
    const group = document.createElement("fieldset");
    group.className = "categories";
    const legend = document.createElement("legend");
    legend.textContent = column;
    group.appendChild(legend);
    const boxes: HTMLInputElement[] = [];
    for (const value of values) {
      const item = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = true;
      box.addEventListener("change", () => {
        const included = boxes.filter((b) => b.checked).map((b) => b.value);
        this.state = withCategories(
          this.state, column, included.length === values.length ? null : included
        );
        this.update();
      });
      box.value = value;
      boxes.push(box);
      item.appendChild(box);
      const swatch = document.createElement("span");
      if (column === "technology") {
        swatch.style.color = technologyColor(this.bundle, value);
        swatch.textContent = "● ";
      }
      item.appendChild(swatch);
      item.appendChild(document.createTextNode(value));
      group.appendChild(item);
    }
    return group;
  }

  private handleBrush(plotId: string, brush: BrushSelection | null): void {
    this.state = withBrush(this.state, plotId, brush);
    this.update();
  }

  private showDetail(row: number): void {
    const lines: string[] = [];
    for (const column of this.bundle.columns) {
      const numeric = this.bundle.numeric.get(column.name);
      const text = this.bundle.text.get(column.name);
      const raw = numeric ? numeric[row] : text?.[row];
      if (raw === null || raw === undefined || (typeof raw === "number" && Number.isNaN(raw))) {
        continue;
      }
      const unit = column.unit ? ` ${column.unit}` : "";
      lines.push(`<tr><td>${column.name}</td><td>${String(raw)}${unit}</td></tr>`);
    }
    this.detail.innerHTML =
      `<h2>row ${row}</h2><table>${lines.join("")}</table><button>close</button>`;
    this.detail.classList.remove("hidden");
    this.detail.querySelector("button")?.addEventListener("click", () => {
      this.detail.classList.add("hidden");
    });
  }

  private exportConfig(): void {
    const visible = visibleIndices(this.bundle, this.state);
    const refined = refinedConfig(this.bundle, visible);
    if (refined === null) return;
    const blob = new Blob([JSON.stringify(refined.config, null, 2) + "\n"], {
      type: "application/json",
    });
    const url = URL.createObjectURL(blob);
    const link = document.createElement("a");
    link.href = url;
    link.download = "refined_config.json";
    link.click();
    URL.revokeObjectURL(url);
  }

  private update(): void {
    const visible = visibleIndices(this.bundle, this.state);
    const visibleSet = new Set(visible);
    this.header.innerHTML =
      `<strong>${visible.length}</strong> of ${this.bundle.rowCount} rows visible ` +
      `<small>fingerprint ${this.bundle.configFingerprint.slice(0, 12)}</small>`;
    for (const plot of this.plots) {
      plot.render(visibleSet, this.state.brushes[plot.spec.id] ?? null);
    }
    const exportable = refinedConfig(this.bundle, visible) !== null;
    this.exportButton.disabled = !exportable;
    this.exportButton.title = exportable
      ? "Download a config covering the visible rows"
      : "Nothing visible to export";
  }
}

function showError(root: HTMLElement, message: string): void {
  root.replaceChildren();
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = message;
  root.appendChild(banner);
  const picker = document.createElement("input");
  picker.type = "file";
  picker.accept = "application/json";
  picker.addEventListener("change", async () => {
    const file = picker.files?.[0];
    if (!file) return;
    try {
      const bundle = parseBundle(JSON.parse(await file.text()));
      new App(root, bundle);
    } catch (error) {
      showError(root, `could not load bundle: ${String(error)}`);
    }
  });
  root.appendChild(picker);
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  try {
    const bundle = await loadBundle("/bundle.json");
    new App(root, bundle);
  } catch (error) {
    showError(root, `no bundle at /bundle.json (${String(error)}); pick a file instead`);
  }
}

boot();
