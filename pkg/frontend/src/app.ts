/** Application shell: wires the store to the DOM sections. */

import { ApiClient } from "./api.js";
import { ExplorerStore } from "./state.js";
import type { ResultRecord } from "./types.js";
import {
  renderErrorBanner,
  renderForm,
  renderGallery,
  renderMatchView,
  renderResults,
} from "./view.js";

export class ExplorerApp {
  store: ExplorerStore;
  private renderQueued = false;
  private inspected: ResultRecord | null = null;

  constructor(
    private root: HTMLElement,
    baseUrl: string,
  ) {
    this.store = new ExplorerStore(new ApiClient(baseUrl));
    this.store.subscribe(() => this.scheduleRender());
  }

  async start(): Promise<void> {
    await this.store.loadCorpus();
    await this.render();
  }

  private scheduleRender(): void {
    if (this.renderQueued) return;
    this.renderQueued = true;
    queueMicrotask(() => {
      this.renderQueued = false;
      void this.render();
    });
  }

  async runQuery(): Promise<void> {
    this.inspected = null;
    await this.store.runQuery();
  }

  async inspect(record: ResultRecord): Promise<void> {
    this.inspected = record;
    await this.render();
  }

  async render(): Promise<void> {
    const doc = this.root.ownerDocument;
    const next = doc.createElement("div");
    next.className = "explorer";

    if (this.store.state.error) {
      next.appendChild(
        renderErrorBanner(doc, this.store.state.error, () => void this.store.loadCorpus()),
      );
    }
    next.appendChild(renderGallery(doc, this.store));
    next.appendChild(renderForm(doc, this.store, () => void this.runQuery()));
    next.appendChild(await renderResults(doc, this.store, (r) => void this.inspect(r)));
    if (this.inspected) {
      next.appendChild(await renderMatchView(doc, this.store, this.inspected));
    }

    this.root.replaceChildren(next);
  }
}

export function bootstrap(root: HTMLElement, baseUrl = ""): ExplorerApp {
  const app = new ExplorerApp(root, baseUrl);
  void app.start();
  return app;
}
