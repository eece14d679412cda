/** End-to-end: the explorer driving a real served synthetic index. */

import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { ExplorerApp } from "../src/app.js";
import { hiddenClasses } from "../src/overlay.js";
import type { RankedResults } from "../src/types.js";
import { serveSyntheticIndex, type ServedIndex } from "./server.js";

let service: ServedIndex;

beforeAll(async () => {
  service = await serveSyntheticIndex(8417);
});

afterAll(() => {
  service?.stop();
});

function freshApp(): ExplorerApp {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return new ExplorerApp(root, service.baseUrl);
}

async function flushMicrotasks(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
}

describe("query flow against the live service", () => {
  test("select a query, k=5: five cards whose r_cr match the API byte-for-byte", async () => {
    const app = freshApp();
    await app.start();
    expect(app.store.state.corpus.length).toBe(50);

    const queryId = app.store.state.corpus[0].image_id;
    app.store.selectQuery(queryId);
    app.store.setParam("k", 5);
    app.store.setParam("norm", "ar");
    await app.runQuery();
    await app.render();

    const cards = Array.from(document.querySelectorAll(".result-card"));
    expect(cards).toHaveLength(5);

    const direct = await fetch(`${service.baseUrl}/api/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ query_id: queryId, k: 5, norm: "ar" }),
    });
    const directBody = (await direct.json()) as RankedResults;
    expect(directBody.records).toHaveLength(5);

    for (let i = 0; i < 5; i++) {
      const shown = (cards[i] as HTMLElement).dataset.rCr;
      const wire = JSON.stringify(directBody.records[i].r_cr);
      expect(shown).toBe(wire); // byte-for-byte
      expect((cards[i] as HTMLElement).dataset.targetId).toBe(directBody.records[i].target_id);
    }
    for (const card of cards) {
      expect(card.querySelector(".overlay-host svg")).not.toBeNull();
    }
    document.body.innerHTML = "";
  });

  test("posted parameters come back verbatim in the results echo", async () => {
    const app = freshApp();
    await app.start();
    app.store.selectQuery(app.store.state.corpus[3].image_id);
    app.store.setParam("k", 4);
    app.store.setParam("norm", "image");
    app.store.setParam("sort", "hr_desc");
    const results = await app.store.runQuery();
    expect(results?.params.norm_mode).toBe("image");
    expect(results?.params.sort_method).toBe("hr_desc");
    expect(results?.params.k).toBe(4);
    document.body.innerHTML = "";
  });

  test("parameter edits mark rendered results stale until re-run", async () => {
    const app = freshApp();
    await app.start();
    app.store.selectQuery(app.store.state.corpus[0].image_id);
    await app.runQuery();
    await app.render();
    expect(document.querySelector(".results")!.classList.contains("stale")).toBe(false);

    app.store.setParam("norm", "bbox");
    await flushMicrotasks();
    await app.render();
    expect(document.querySelector(".results")!.classList.contains("stale")).toBe(true);
    expect(document.querySelector(".run-query")!.textContent).toBe("re-run");

    await app.runQuery();
    await app.render();
    expect(document.querySelector(".results")!.classList.contains("stale")).toBe(false);
    document.body.innerHTML = "";
  });

  test("self never appears among its own results", async () => {
    const app = freshApp();
    await app.start();
    const queryId = app.store.state.corpus[7].image_id;
    app.store.selectQuery(queryId);
    app.store.setParam("k", 49);
    const results = await app.store.runQuery();
    expect(results?.records.map((r) => r.target_id)).not.toContain(queryId);
    document.body.innerHTML = "";
  });

  test("pose-baseline runs rank by ascending distance", async () => {
    const app = freshApp();
    await app.start();
    app.store.selectQuery(app.store.state.corpus[0].image_id);
    app.store.setParam("baseline", "latp");
    app.store.setParam("k", 6);
    const results = await app.store.runQuery();
    const values = results!.records.map((r) => r.r_a);
    expect(values.every((v) => v !== null)).toBe(true);
    expect([...values].sort((a, b) => (a as number) - (b as number))).toEqual(values);
    document.body.innerHTML = "";
  });
});

describe("match inspection and overlay layers", () => {
  test("inspect renders two panels with labeled connectors", async () => {
    const app = freshApp();
    await app.start();
    app.store.selectQuery(app.store.state.corpus[0].image_id);
    app.store.setParam("k", 5);
    app.store.setParam("norm", "ar");
    const results = await app.store.runQuery();
    await app.inspect(results!.records[0]);

    const view = document.querySelector(".match-view")!;
    expect(view.querySelectorAll(".panel-host")).toHaveLength(2);
    const connectors = view.querySelectorAll("line.connector, line.connector-best");
    expect(connectors.length).toBe(results!.records[0].matched.pairs.length);
    const tooltips = Array.from(view.querySelectorAll("line title")).map((t) => t.textContent);
    for (const tip of tooltips) expect(tip).toMatch(/^distance: /);
    document.body.innerHTML = "";
  });

  test("toggling an overlay class changes only that class, no re-query", async () => {
    const app = freshApp();
    await app.start();
    app.store.selectQuery(app.store.state.corpus[0].image_id);
    app.store.setParam("norm", "ar");
    const results = await app.store.runQuery();
    await app.inspect(results!.records[0]);

    const view = document.querySelector(".match-view")!;
    const panel = view.querySelector(".panel-host")!;
    const countsBefore = {
      poseline: panel.querySelectorAll(".poseline").length,
      cone: panel.querySelectorAll(".cone").length,
      center: panel.querySelectorAll(".center").length,
    };
    expect(hiddenClasses(panel)).toEqual([]);

    const queriesBefore = app.store.state.results;
    const box = view.querySelector('input[data-toggle="cones"]') as HTMLInputElement;
    box.checked = false;
    box.dispatchEvent(new window.Event("change"));

    for (const host of Array.from(view.querySelectorAll(".panel-host"))) {
      expect(hiddenClasses(host)).toEqual(["cones"]);
    }
    // nothing re-fetched, nothing else touched
    expect(app.store.state.results).toBe(queriesBefore);
    expect(panel.querySelectorAll(".poseline")).toHaveLength(countsBefore.poseline);
    expect(panel.querySelectorAll(".cone")).toHaveLength(countsBefore.cone);
    expect(panel.querySelectorAll(".center")).toHaveLength(countsBefore.center);

    box.checked = true;
    box.dispatchEvent(new window.Event("change"));
    expect(hiddenClasses(panel)).toEqual([]);
    document.body.innerHTML = "";
  });

  test("gallery click selects the query", async () => {
    const app = freshApp();
    await app.start();
    const card = document.querySelector(".gallery-card") as HTMLButtonElement;
    const imageId = card.dataset.imageId!;
    card.click();
    await flushMicrotasks();
    expect(app.store.state.selectedQueryId).toBe(imageId);
    expect(app.store.state.form.query_id).toBe(imageId);
    document.body.innerHTML = "";
  });

  test("label filter narrows the gallery grid", async () => {
    const app = freshApp();
    await app.start();
    app.store.setLabelFilter("dialogue");
    await flushMicrotasks();
    const labels = Array.from(document.querySelectorAll(".gallery-label")).map(
      (n) => n.textContent,
    );
    expect(labels.length).toBeGreaterThan(0);
    expect(labels.every((l) => l === "dialogue")).toBe(true);
    document.body.innerHTML = "";
  });
});

describe("failure surfaces", () => {
  test("unreachable service shows an error banner with retry", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new ExplorerApp(root, "http://127.0.0.1:9");
    await app.start();
    const banner = document.querySelector(".error-banner");
    expect(banner).not.toBeNull();
    expect(banner!.querySelector("button.retry")).not.toBeNull();
    document.body.innerHTML = "";
  });

  test("invalid parameter surfaces inline at the field", async () => {
    const app = freshApp();
    await app.start();
    app.store.selectQuery(app.store.state.corpus[0].image_id);
    app.store.setParam("beta", -5);
    await app.runQuery();
    await app.render();
    expect(app.store.state.fieldErrors.beta ?? app.store.state.fieldErrors.form).toBeTruthy();
    const inline = document.querySelector(".field-error");
    expect(inline).not.toBeNull();
    document.body.innerHTML = "";
  });
});
