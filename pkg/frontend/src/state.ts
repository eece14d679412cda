/** Explorer state: corpus listing, parameter form, results, staleness.
 *
 * The form mirrors /api/params. Results always carry the exact body that
 * produced them, and any later form edit marks them stale instead of
 * auto-refetching (re-running on every slider move would hammer large
 * corpora). One query may be in flight at a time; starting a new one
 * aborts the old, and state only ever updates from the latest response.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ImageEntry, ParamsInfo, QueryBody, RankedResults } from "./types.js";
import { OVERLAY_ELEMENTS, type OverlayToggles } from "./types.js";

export interface ExplorerState {
  corpus: ImageEntry[];
  paramsInfo: ParamsInfo | null;
  selectedQueryId: string | null;
  form: QueryBody;
  results: RankedResults | null;
  resultsStale: boolean;
  loading: boolean;
  error: string | null;
  fieldErrors: Record<string, string>;
  labelFilter: string;
  page: number;
  pageSize: number;
  overlayToggles: OverlayToggles;
}

export function defaultToggles(): OverlayToggles {
  const toggles: OverlayToggles = {};
  for (const name of OVERLAY_ELEMENTS) toggles[name] = name !== "latp_skeletons";
  return toggles;
}

export function initialState(): ExplorerState {
  return {
    corpus: [],
    paramsInfo: null,
    selectedQueryId: null,
    form: {
      query_id: "",
      k: 10,
      norm: "none",
      beta: null,
      sort: "cr_desc",
      wa: 0.5,
      combine: "none",
      baseline: null,
      latp_mode: "min",
      latp_robust: false,
    },
    results: null,
    resultsStale: false,
    loading: false,
    error: null,
    fieldErrors: {},
    labelFilter: "",
    page: 0,
    pageSize: 24,
    overlayToggles: defaultToggles(),
  };
}

export type Listener = (state: ExplorerState) => void;

export class ExplorerStore {
  state: ExplorerState = initialState();
  private listeners: Listener[] = [];
  private inflight: AbortController | null = null;
  private runCounter = 0;

  constructor(public api: ApiClient) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  private patch(partial: Partial<ExplorerState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  async loadCorpus(): Promise<void> {
    this.patch({ error: null });
    try {
      const [corpus, paramsInfo] = await Promise.all([this.api.images(), this.api.params()]);
      const form = {
        ...this.state.form,
        k: paramsInfo.defaults.k,
        norm: paramsInfo.defaults.norm,
        sort: paramsInfo.defaults.sort,
        wa: paramsInfo.defaults.wa,
        combine: paramsInfo.defaults.combine,
        baseline: paramsInfo.defaults.baseline,
      };
      this.patch({ corpus, paramsInfo, form });
    } catch (err) {
      this.patch({ error: `service unreachable: ${String(err)}` });
    }
  }

  visibleCorpus(): ImageEntry[] {
    const filter = this.state.labelFilter.trim().toLowerCase();
    const all = filter
      ? this.state.corpus.filter((e) => (e.label ?? "").toLowerCase().includes(filter))
      : this.state.corpus;
    const start = this.state.page * this.state.pageSize;
    return all.slice(start, start + this.state.pageSize);
  }

  filteredCount(): number {
    const filter = this.state.labelFilter.trim().toLowerCase();
    return filter
      ? this.state.corpus.filter((e) => (e.label ?? "").toLowerCase().includes(filter)).length
      : this.state.corpus.length;
  }

  setLabelFilter(filter: string): void {
    this.patch({ labelFilter: filter, page: 0 });
  }

  setPage(page: number): void {
    const pages = Math.max(1, Math.ceil(this.filteredCount() / this.state.pageSize));
    this.patch({ page: Math.min(Math.max(page, 0), pages - 1) });
  }

  selectQuery(imageId: string): void {
    this.patch({
      selectedQueryId: imageId,
      form: { ...this.state.form, query_id: imageId },
      resultsStale: this.state.results !== null,
    });
  }

  /** Any form edit after a run leaves the shown results visibly stale. */
  setParam<K extends keyof QueryBody>(key: K, value: QueryBody[K]): void {
    if (this.state.form[key] === value) return;
    this.patch({
      form: { ...this.state.form, [key]: value },
      resultsStale: this.state.results !== null,
      fieldErrors: {},
    });
  }

  setOverlayToggle(name: string, on: boolean): void {
    this.patch({ overlayToggles: { ...this.state.overlayToggles, [name]: on } });
  }

  /** POST the current form; a newer run aborts a pending one. */
  async runQuery(): Promise<RankedResults | null> {
    if (!this.state.form.query_id) {
      this.patch({ error: "select a query image first" });
      return null;
    }
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const runId = ++this.runCounter;
    const body = { ...this.state.form };
    this.patch({ loading: true, error: null, fieldErrors: {} });
    try {
      const results = await this.api.query(body, controller.signal);
      if (runId !== this.runCounter) return null; // superseded
      this.patch({ results, resultsStale: false, loading: false });
      return results;
    } catch (err) {
      if (controller.signal.aborted || runId !== this.runCounter) return null;
      if (err instanceof ApiError && err.status === 422) {
        this.patch({ loading: false, fieldErrors: mapFieldError(err.detail) });
      } else {
        this.patch({ loading: false, error: String(err) });
      }
      return null;
    }
  }
}

/** Route a validation message to the form field it talks about. */
export function mapFieldError(detail: string): Record<string, string> {
  const lower = detail.toLowerCase();
  const byKeyword: [string, string][] = [
    ["norm", "norm"],
    ["sort", "sort"],
    ["combine", "combine"],
    ["combi", "combine"],
    ["w_a", "wa"],
    ["wa", "wa"],
    ["beta", "beta"],
    ["filter_threshold", "beta"],
    ["k", "k"],
  ];
  for (const [needle, field] of byKeyword) {
    if (lower.includes(needle)) return { [field]: detail };
  }
  return { form: detail };
}
