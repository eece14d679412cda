import { describe, expect, test, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExplorerStore, initialState, mapFieldError } from "../src/state.js";
import type { ImageEntry, ParamsInfo, RankedResults } from "../src/types.js";

const PARAMS_INFO: ParamsInfo = {
  extract: { correction_deg: 20, cone_opening_deg: 80, cone_scale: 10, cone_base_scale: 0, poseline_fallback: true, bisection_fallback: false, fallback_multiplier: 3, conf_threshold: 0.1 },
  defaults: {
    k: 10, norm: "none", beta: null,
    beta_by_norm: { none: 150, image: 0.15, bbox: 0.15, ar: 150 },
    sort: "cr_desc", wa: 0.5, combine: "none", baseline: null,
  },
  choices: {
    norm: ["none", "image", "bbox", "ar"],
    sort: ["cr_desc", "hr_desc", "nmd_desc", "hr_md_lex", "combi1_asc", "combi2_asc", "a_asc"],
    combine: ["multiplicative", "additive", "none"],
    baseline: [null, "latp"],
    latp_mode: ["min", "bipart"],
    elements: ["poselines", "cones", "regions", "centers", "lines", "latp_skeletons"],
  },
  features_attached: false,
  corpus_size: 4,
};

const CORPUS: ImageEntry[] = [
  { image_id: "a_000", label: "annunciation" },
  { image_id: "a_001", label: "annunciation" },
  { image_id: "n_000", label: "nativity" },
  { image_id: "n_001", label: "nativity" },
];

function resultsFor(queryId: string, body: Record<string, unknown>): RankedResults {
  return {
    query_id: queryId,
    records: [],
    params: { ...body },
  };
}

function mockedStore(overrides: Partial<ApiClient> = {}): ExplorerStore {
  const api = new ApiClient("http://test.invalid");
  api.images = vi.fn(async () => CORPUS);
  api.params = vi.fn(async () => PARAMS_INFO);
  api.query = vi.fn(async (body) => resultsFor(body.query_id, body as never));
  Object.assign(api, overrides);
  return new ExplorerStore(api);
}

describe("corpus browsing", () => {
  test("loads corpus and adopts service defaults", async () => {
    const store = mockedStore();
    await store.loadCorpus();
    expect(store.state.corpus).toHaveLength(4);
    expect(store.state.form.k).toBe(10);
    expect(store.state.form.norm).toBe("none");
    expect(store.state.error).toBeNull();
  });

  test("service down produces a visible error", async () => {
    const store = mockedStore({
      images: vi.fn(async () => {
        throw new Error("ECONNREFUSED");
      }),
    });
    await store.loadCorpus();
    expect(store.state.error).toMatch(/unreachable/);
  });

  test("label filter narrows the gallery", async () => {
    const store = mockedStore();
    await store.loadCorpus();
    store.setLabelFilter("annunciation");
    expect(store.visibleCorpus().map((e) => e.image_id)).toEqual(["a_000", "a_001"]);
    store.setLabelFilter("");
    expect(store.visibleCorpus()).toHaveLength(4);
  });

  test("paging clamps to the filtered range", async () => {
    const store = mockedStore();
    await store.loadCorpus();
    store.state = { ...store.state, pageSize: 3 };
    store.setPage(99);
    expect(store.state.page).toBe(1);
    expect(store.visibleCorpus()).toHaveLength(1);
  });
});

describe("parameters and staleness", () => {
  test("selecting a query fills the form", async () => {
    const store = mockedStore();
    await store.loadCorpus();
    store.selectQuery("n_000");
    expect(store.state.form.query_id).toBe("n_000");
    expect(store.state.resultsStale).toBe(false); // nothing run yet
  });

  test("changing any parameter after a run marks results stale", async () => {
    const store = mockedStore();
    await store.loadCorpus();
    store.selectQuery("a_000");
    await store.runQuery();
    expect(store.state.results).not.toBeNull();
    expect(store.state.resultsStale).toBe(false);
    store.setParam("norm", "ar");
    expect(store.state.resultsStale).toBe(true);
    await store.runQuery();
    expect(store.state.resultsStale).toBe(false);
  });

  test("posted parameters equal the echoed ones", async () => {
    const store = mockedStore();
    await store.loadCorpus();
    store.selectQuery("a_000");
    store.setParam("k", 5);
    store.setParam("norm", "ar");
    const results = await store.runQuery();
    expect(results?.params.k).toBe(5);
    expect(results?.params.norm).toBe("ar");
  });

  test("running without a selection is a user error, not a request", async () => {
    const store = mockedStore();
    await store.loadCorpus();
    const results = await store.runQuery();
    expect(results).toBeNull();
    expect(store.state.error).toMatch(/select a query/);
    expect(store.api.query).not.toHaveBeenCalled();
  });
});

describe("single in-flight query", () => {
  test("a newer run supersedes a pending one", async () => {
    let release: ((r: RankedResults) => void) | null = null;
    const slow = new Promise<RankedResults>((resolve) => (release = resolve));
    const api = {
      query: vi
        .fn()
        .mockImplementationOnce(() => slow)
        .mockImplementationOnce(async (body: { query_id: string }) =>
          resultsFor(body.query_id, { run: 2 }),
        ),
    };
    const store = mockedStore(api as never);
    await store.loadCorpus();
    store.selectQuery("a_000");
    const first = store.runQuery();
    store.selectQuery("n_000");
    const second = store.runQuery();
    release?.(resultsFor("a_000", { run: 1 }));
    const [r1, r2] = await Promise.all([first, second]);
    expect(r1).toBeNull(); // superseded: must not touch state
    expect(r2?.query_id).toBe("n_000");
    expect(store.state.results?.query_id).toBe("n_000");
  });
});

describe("validation errors", () => {
  test("field errors land next to the offending field", () => {
    expect(mapFieldError("filter_threshold must be positive")).toEqual({
      beta: "filter_threshold must be positive",
    });
    expect(mapFieldError("'bogus' is not a valid NormMode")).toEqual({
      norm: "'bogus' is not a valid NormMode",
    });
    expect(Object.keys(mapFieldError("something else entirely"))).toEqual(["form"]);
  });

  test("422 from the API becomes a field error", async () => {
    const { ApiError } = await import("../src/api.js");
    const store = mockedStore({
      query: vi.fn(async () => {
        throw new ApiError(422, "filter_threshold must be positive");
      }),
    } as never);
    await store.loadCorpus();
    store.selectQuery("a_000");
    await store.runQuery();
    expect(store.state.fieldErrors.beta).toMatch(/filter_threshold/);
    expect(store.state.error).toBeNull();
  });
});

test("initial state has sane defaults", () => {
  const state = initialState();
  expect(state.form.sort).toBe("cr_desc");
  expect(state.overlayToggles.poselines).toBe(true);
  expect(state.overlayToggles.latp_skeletons).toBe(false);
});
