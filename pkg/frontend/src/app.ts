/** Single-page controller: navigation between the work queue, the annotate
 * and relatedness screens, and the dashboard, plus the poll loop. Every
 * piece of data shown is re-fetched from the service; nothing authoritative
 * lives here. */

import { ApiClient } from "./api.js";
import { serviceBaseUrl } from "./config.js";
import { clear, el } from "./dom.js";
import { toQueueItem, type InventoryDoc, type SummaryDto, type WorkQueueItem } from "./types.js";
import { AnnotateView } from "./views/annotate.js";
import { renderDashboard } from "./views/dashboard.js";
import { renderQueue } from "./views/queue.js";
import { RelatednessView } from "./views/relatedness.js";

export const DEFAULT_POLL_INTERVAL_MS = 2_000;

type Route =
  | { name: "queue" }
  | { name: "dashboard" }
  | { name: "annotate"; id: string }
  | { name: "relatedness"; id: string };

export interface AppOptions {
  baseUrl?: string;
  pollIntervalMs?: number;
  fetchFn?: (input: string, init?: RequestInit) => Promise<Response>;
}

export class App {
  readonly api: ApiClient;
  private readonly root: HTMLElement;
  private readonly pollIntervalMs: number;
  private readonly content: HTMLElement;
  private readonly status: HTMLElement;
  private route: Route = { name: "queue" };
  private items: WorkQueueItem[] = [];
  private summary: SummaryDto | null = null;
  private unreachable = false;
  private inventory: InventoryDoc | null = null;
  private annotator = "";
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.api = new ApiClient(options.baseUrl ?? serviceBaseUrl(), options.fetchFn);
    this.pollIntervalMs = options.pollIntervalMs ?? DEFAULT_POLL_INTERVAL_MS;
    this.status = el("span", { class: "conn", "data-role": "connection" });
    this.content = el("main", { "data-role": "content" });
    clear(root);
    root.append(
      el(
        "nav",
        {},
        el("strong", {}, "relann workbench"),
        el("button", { "data-role": "nav-queue", onclick: () => this.show({ name: "queue" }) }, "Queue"),
        el("button", { "data-role": "nav-dashboard", onclick: () => this.show({ name: "dashboard" }) }, "Dashboard"),
        this.status,
      ),
      this.content,
    );
  }

  async start(): Promise<void> {
    await this.poll();
    this.renderRoute();
    this.timer = setInterval(() => void this.poll(), this.pollIntervalMs);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  /** One poll tick: refresh queue + summary and re-render passive views. */
  async poll(): Promise<void> {
    try {
      const [list, summary] = await Promise.all([this.api.records(), this.api.statsSummary()]);
      this.items = list.records.map(toQueueItem);
      this.summary = summary;
      this.unreachable = false;
    } catch {
      this.unreachable = true;
    }
    this.status.textContent = this.unreachable ? "offline" : "online";
    if (this.route.name === "queue" || this.route.name === "dashboard") this.renderRoute();
  }

  show(route: Route): void {
    this.route = route;
    this.renderRoute();
  }

  private renderRoute(): void {
    const route = this.route;
    if (route.name === "queue") {
      renderQueue(this.content, this.items, {
        onAnnotate: (item) => this.show({ name: "annotate", id: item.id }),
        onRelatedness: (item) => this.show({ name: "relatedness", id: item.id }),
      });
      if (this.unreachable) {
        this.content.prepend(
          el("div", { class: "banner", "data-role": "unreachable-banner" }, "Service unreachable; retrying..."),
        );
      }
      return;
    }
    if (route.name === "dashboard") {
      renderDashboard(this.content, { summary: this.summary, unreachable: this.unreachable });
      return;
    }
    if (route.name === "annotate") {
      void this.openAnnotate(route.id);
      return;
    }
    void this.openRelatedness(route.id);
  }

  private async openAnnotate(id: string): Promise<void> {
    clear(this.content);
    this.content.append(el("p", {}, `Loading ${id}...`));
    try {
      if (this.inventory === null) this.inventory = await this.api.inventory();
      const view = new AnnotateView(this.content, {
        api: this.api,
        inventory: this.inventory,
        onSaved: () => void this.poll(),
        onBack: () => this.show({ name: "queue" }),
      });
      await view.load(id);
    } catch (error) {
      clear(this.content);
      this.content.append(
        el("p", { class: "message" }, `Could not load ${id}: ${error instanceof Error ? error.message : error}`),
      );
    }
  }

  private async openRelatedness(id: string): Promise<void> {
    clear(this.content);
    try {
      const record = await this.api.record(id);
      new RelatednessView(this.content, record, {
        api: this.api,
        annotator: this.annotator,
        onSaved: (_, annotator) => {
          this.annotator = annotator;
          void this.poll();
        },
        onConflict: () => this.show({ name: "relatedness", id }),
        onBack: () => this.show({ name: "queue" }),
      });
    } catch (error) {
      this.content.append(
        el("p", { class: "message" }, `Could not load ${id}: ${error instanceof Error ? error.message : error}`),
      );
    }
  }
}

export function mountApp(root: HTMLElement, options: AppOptions = {}): App {
  const app = new App(root, options);
  void app.start();
  return app;
}
