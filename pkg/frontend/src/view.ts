/** DOM rendering: gallery, parameter form, result cards, match view.
 *
 * Every number shown on a card is the raw API value (the exact JSON
 * serialization rides in a data attribute, the visible text is a rounded
 * rendering of the same number) so nothing on screen can drift from the
 * service's answers.
 */

import type { ExplorerStore } from "./state.js";
import { applyOverlayToggles } from "./overlay.js";
import type { CanvasJson, ResultRecord } from "./types.js";
import { OVERLAY_ELEMENTS } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function scoreChip(doc: Document, name: string, value: number | null): HTMLElement {
  const chip = el(doc, "span", `score score-${name.replace("_", "-")}`);
  chip.dataset.field = name;
  chip.dataset.exact = JSON.stringify(value);
  chip.textContent = value === null ? `${name}: –` : `${name}: ${value.toFixed(4)}`;
  chip.title = `${name} = ${JSON.stringify(value)}`;
  return chip;
}

export function renderErrorBanner(doc: Document, message: string, onRetry: () => void): HTMLElement {
  const banner = el(doc, "div", "error-banner");
  banner.appendChild(el(doc, "span", "error-text", message));
  const retry = el(doc, "button", "retry", "retry");
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  return banner;
}

export function renderGallery(doc: Document, store: ExplorerStore): HTMLElement {
  const wrap = el(doc, "section", "gallery");
  const controls = el(doc, "div", "gallery-controls");
  const filter = el(doc, "input", "label-filter") as HTMLInputElement;
  filter.placeholder = "filter by label";
  filter.value = store.state.labelFilter;
  filter.addEventListener("input", () => store.setLabelFilter(filter.value));
  controls.appendChild(filter);

  const pages = Math.max(1, Math.ceil(store.filteredCount() / store.state.pageSize));
  const pager = el(doc, "div", "pager");
  const prev = el(doc, "button", "page-prev", "<");
  prev.disabled = store.state.page <= 0;
  prev.addEventListener("click", () => store.setPage(store.state.page - 1));
  const next = el(doc, "button", "page-next", ">");
  next.disabled = store.state.page >= pages - 1;
  next.addEventListener("click", () => store.setPage(store.state.page + 1));
  pager.append(prev, el(doc, "span", "page-info", `${store.state.page + 1}/${pages}`), next);
  controls.appendChild(pager);
  wrap.appendChild(controls);

  const grid = el(doc, "div", "gallery-grid");
  const visible = store.visibleCorpus();
  if (!visible.length) {
    grid.appendChild(el(doc, "p", "empty-state", "no images in the corpus match"));
  }
  for (const entry of visible) {
    const card = el(doc, "button", "gallery-card");
    card.dataset.imageId = entry.image_id;
    if (entry.image_id === store.state.selectedQueryId) card.classList.add("selected");
    card.appendChild(el(doc, "span", "gallery-id", entry.image_id));
    card.appendChild(el(doc, "span", "gallery-label", entry.label ?? "(unlabeled)"));
    card.addEventListener("click", () => store.selectQuery(entry.image_id));
    grid.appendChild(card);
  }
  wrap.appendChild(grid);
  return wrap;
}

interface FieldSpec {
  key: "k" | "norm" | "beta" | "sort" | "wa" | "combine" | "latp_mode";
  label: string;
  kind: "number" | "select";
  choices?: (string | null)[];
  step?: string;
}

export function renderForm(doc: Document, store: ExplorerStore, onRun: () => void): HTMLElement {
  const info = store.state.paramsInfo;
  const form = el(doc, "form", "param-form");
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    onRun();
  });

  const extract = el(doc, "div", "extract-echo");
  if (info) {
    const e = info.extract;
    extract.textContent =
      `index params: correction ${e.correction_deg}°, opening ${e.cone_opening_deg}°, ` +
      `length scale ${e.cone_scale}, base scale ${e.cone_base_scale}, ` +
      `poseline fallback ${e.poseline_fallback ? "on" : "off"}`;
  }
  form.appendChild(extract);

  const fields: FieldSpec[] = [
    { key: "k", label: "results k", kind: "number", step: "1" },
    { key: "norm", label: "normalization", kind: "select", choices: info?.choices.norm ?? [] },
    { key: "beta", label: "threshold β", kind: "number", step: "any" },
    { key: "sort", label: "sort", kind: "select", choices: info?.choices.sort ?? [] },
    { key: "wa", label: "feature weight", kind: "number", step: "0.05" },
    { key: "combine", label: "fusion", kind: "select", choices: info?.choices.combine ?? [] },
    { key: "latp_mode", label: "baseline mode", kind: "select", choices: info?.choices.latp_mode ?? [] },
  ];
  for (const spec of fields) {
    const row = el(doc, "label", `field field-${spec.key}`);
    row.appendChild(el(doc, "span", "field-label", spec.label));
    if (spec.kind === "select") {
      const select = doc.createElement("select");
      select.name = spec.key;
      for (const choice of spec.choices ?? []) {
        const opt = doc.createElement("option");
        opt.value = String(choice);
        opt.textContent = String(choice);
        select.appendChild(opt);
      }
      select.value = String(store.state.form[spec.key]);
      select.addEventListener("change", () => store.setParam(spec.key, select.value as never));
      row.appendChild(select);
    } else {
      const input = doc.createElement("input");
      input.type = "number";
      input.name = spec.key;
      if (spec.step) input.step = spec.step;
      const value = store.state.form[spec.key];
      input.value = value === null ? "" : String(value);
      if (spec.key === "beta" && info) {
        input.placeholder = `auto (${info.defaults.beta_by_norm[store.state.form.norm]})`;
      }
      input.addEventListener("change", () => {
        const raw = input.value.trim();
        if (spec.key === "beta") store.setParam("beta", raw === "" ? null : Number(raw));
        else if (spec.key === "k") store.setParam("k", Math.round(Number(raw)));
        else store.setParam(spec.key, Number(raw) as never);
      });
      row.appendChild(input);
    }
    const fieldError = store.state.fieldErrors[spec.key];
    if (fieldError) row.appendChild(el(doc, "span", "field-error", fieldError));
    form.appendChild(row);
  }

  const baselineRow = el(doc, "label", "field field-baseline");
  baselineRow.appendChild(el(doc, "span", "field-label", "pose baseline"));
  const baseline = doc.createElement("input");
  baseline.type = "checkbox";
  baseline.name = "baseline";
  baseline.checked = store.state.form.baseline === "latp";
  baseline.addEventListener("change", () =>
    store.setParam("baseline", baseline.checked ? "latp" : null),
  );
  baselineRow.appendChild(baseline);
  form.appendChild(baselineRow);

  if (store.state.fieldErrors.form) {
    form.appendChild(el(doc, "p", "field-error form-error", store.state.fieldErrors.form));
  }

  const run = el(doc, "button", "run-query", store.state.resultsStale ? "re-run" : "run");
  run.type = "submit";
  if (store.state.resultsStale) run.classList.add("stale-affordance");
  run.disabled = store.state.loading;
  form.appendChild(run);
  return form;
}

export async function renderResultCard(
  doc: Document,
  store: ExplorerStore,
  record: ResultRecord,
  onInspect: (record: ResultRecord) => void,
): Promise<HTMLElement> {
  const card = el(doc, "article", "result-card");
  card.dataset.targetId = record.target_id;
  card.dataset.rCr = JSON.stringify(record.r_cr);
  const head = el(doc, "header", "result-head");
  head.appendChild(el(doc, "span", "result-target", record.target_id));
  const inspect = el(doc, "button", "inspect", "inspect match");
  inspect.addEventListener("click", () => onInspect(record));
  head.appendChild(inspect);
  card.appendChild(head);

  const overlayHost = el(doc, "div", "overlay-host");
  const baselineRun = store.state.results?.params.baseline === "latp";
  try {
    const elements = baselineRun ? ["poselines", "latp_skeletons"] : undefined;
    overlayHost.innerHTML = await store.api.overlaySvg(record.target_id, elements);
    applyOverlayToggles(overlayHost, store.state.overlayToggles);
  } catch (err) {
    overlayHost.appendChild(el(doc, "p", "overlay-error", String(err)));
  }
  card.appendChild(overlayHost);

  const scores = el(doc, "div", "scores");
  scores.append(
    scoreChip(doc, "r_cr", record.r_cr),
    scoreChip(doc, "r_hr", record.r_hr),
    scoreChip(doc, "r_nmd", record.r_nmd),
  );
  if (record.r_combi1 !== null) scores.appendChild(scoreChip(doc, "r_combi1", record.r_combi1));
  if (record.r_combi2 !== null) scores.appendChild(scoreChip(doc, "r_combi2", record.r_combi2));
  if (record.r_a !== null) scores.appendChild(scoreChip(doc, "r_a", record.r_a));
  card.appendChild(scores);
  return card;
}

export async function renderResults(
  doc: Document,
  store: ExplorerStore,
  onInspect: (record: ResultRecord) => void,
): Promise<HTMLElement> {
  const wrap = el(doc, "section", "results");
  const results = store.state.results;
  if (!results) {
    wrap.appendChild(el(doc, "p", "results-empty", "no query run yet"));
    return wrap;
  }
  if (store.state.resultsStale) {
    wrap.classList.add("stale");
    wrap.appendChild(
      el(doc, "p", "stale-note", "parameters changed since this run: results are stale"),
    );
  }
  const meta = el(doc, "p", "results-meta");
  meta.textContent = `query ${results.query_id}, ${results.records.length} results`;
  meta.dataset.params = JSON.stringify(results.params);
  wrap.appendChild(meta);
  const grid = el(doc, "div", "results-grid");
  for (const record of results.records) {
    grid.appendChild(await renderResultCard(doc, store, record, onInspect));
  }
  wrap.appendChild(grid);
  return wrap;
}

function midpoint(line: CanvasPoselineLike): [number, number] {
  return [(line.top[0] + line.bottom[0]) / 2, (line.top[1] + line.bottom[1]) / 2];
}

type CanvasPoselineLike = { top: [number, number]; bottom: [number, number] };

const SVG_NS = "http://www.w3.org/2000/svg";

/** Side-by-side match view composed purely from service responses:
 * the two overlay SVGs plus connectors between matched poselines taken
 * from the canvas JSONs. Layer toggles re-style in place, no re-query. */
export async function renderMatchView(
  doc: Document,
  store: ExplorerStore,
  record: ResultRecord,
): Promise<HTMLElement> {
  const wrap = el(doc, "section", "match-view");
  wrap.dataset.queryId = record.query_id;
  wrap.dataset.targetId = record.target_id;

  const toggles = el(doc, "div", "overlay-toggle-bar");
  for (const name of OVERLAY_ELEMENTS) {
    const label = el(doc, "label", `overlay-toggle toggle-${name}`);
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.checked = store.state.overlayToggles[name] ?? false;
    box.dataset.toggle = name;
    box.addEventListener("change", () => {
      store.setOverlayToggle(name, box.checked);
      for (const host of Array.from(wrap.querySelectorAll(".panel-host"))) {
        applyOverlayToggles(host, store.state.overlayToggles);
      }
    });
    label.append(box, doc.createTextNode(name));
    toggles.appendChild(label);
  }
  wrap.appendChild(toggles);

  const baselineRun = store.state.results?.params.baseline === "latp";
  const elements = baselineRun ? ["poselines", "latp_skeletons"] : undefined;
  const [svgQ, svgT, canvasQ, canvasT] = await Promise.all([
    store.api.overlaySvg(record.query_id, elements),
    store.api.overlaySvg(record.target_id, elements),
    store.api.canvas(record.query_id),
    store.api.canvas(record.target_id),
  ]);

  const gap = 40;
  const width = canvasQ.width + gap + canvasT.width;
  const height = Math.max(canvasQ.height, canvasT.height);
  const outer = doc.createElementNS(SVG_NS, "svg");
  outer.setAttribute("viewBox", `0 0 ${width} ${height}`);
  outer.setAttribute("class", "match-panels");

  const mount = (svgText: string, x: number, w: number, h: number, cls: string) => {
    const host = doc.createElementNS(SVG_NS, "svg");
    host.setAttribute("x", String(x));
    host.setAttribute("y", "0");
    host.setAttribute("width", String(w));
    host.setAttribute("height", String(h));
    host.setAttribute("class", `panel-host ${cls}`);
    const parsed = el(doc, "div");
    parsed.innerHTML = svgText;
    const inner = parsed.querySelector("svg");
    if (inner) {
      host.setAttribute("viewBox", inner.getAttribute("viewBox") ?? `0 0 ${w} ${h}`);
      for (const child of Array.from(inner.childNodes)) host.appendChild(child);
    }
    outer.appendChild(host);
    return host;
  };
  mount(svgQ, 0, canvasQ.width, canvasQ.height, "panel-query");
  mount(svgT, canvasQ.width + gap, canvasT.width, canvasT.height, "panel-target");

  const connectors = doc.createElementNS(SVG_NS, "g");
  connectors.setAttribute("class", "connectors");
  const distances = record.matched.distances;
  let best = -1;
  for (let i = 0; i < distances.length; i++) {
    const d = distances[i];
    if (d !== null && (best < 0 || d < (distances[best] ?? Infinity))) best = i;
  }
  record.matched.pairs.forEach(([qi, ti], n) => {
    const lineQ = canvasQ.poselines[qi];
    const lineT = canvasT.poselines[ti];
    if (!lineQ || !lineT) return;
    const [qx, qy] = midpoint(lineQ);
    const [tx, ty] = midpoint(lineT);
    const connector = doc.createElementNS(SVG_NS, "line");
    connector.setAttribute("class", n === best ? "connector connector-best" : "connector");
    connector.setAttribute("x1", String(qx));
    connector.setAttribute("y1", String(qy));
    connector.setAttribute("x2", String(tx + canvasQ.width + gap));
    connector.setAttribute("y2", String(ty));
    connector.setAttribute("stroke", n === best ? "#ff2020" : "#3070ff");
    connector.setAttribute("stroke-dasharray", "4 4");
    const tooltip = doc.createElementNS(SVG_NS, "title");
    const value = distances[n];
    tooltip.textContent = value === null ? "distance: –" : `distance: ${value.toFixed(2)}`;
    connector.appendChild(tooltip);
    connectors.appendChild(connector);
  });
  outer.appendChild(connectors);
  wrap.appendChild(outer);
  for (const host of Array.from(wrap.querySelectorAll(".panel-host"))) {
    applyOverlayToggles(host, store.state.overlayToggles);
  }
  return wrap;
}
