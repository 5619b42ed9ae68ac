// Explorer session: slider-driven panel refresh with per-panel debouncing.
//
// Contract: a burst of slider changes issues at most one in-flight slice
// request per panel, and the final rendered state always corresponds to the
// last slider value (stale responses are discarded; a request for the
// newest query is re-fired once the in-flight one settles).  Every render
// is traceable to a recorded (job id, query) pair in the request log.

import { buildSliceUrl, FetchLike, SliceQuery } from "./api";
import { PanelKey, PANEL_KEYS, PanelSettings, panelQuery, renderPanel } from "./panels";

export type TimerHandle = unknown;
export interface Scheduler {
  set(fn: () => void, ms: number): TimerHandle;
  clear(handle: TimerHandle): void;
}

const defaultScheduler: Scheduler = {
  set: (fn, ms) => setTimeout(fn, ms),
  clear: (handle) => clearTimeout(handle as Parameters<typeof clearTimeout>[0]),
};

export interface RequestLogEntry {
  panel: PanelKey;
  url: string;
}

class PanelFetcher {
  private timer: TimerHandle | null = null;
  private inflight = false;
  private queued: string | null = null;
  private newest: string | null = null;

  constructor(
    private fetchFn: FetchLike,
    private debounceMs: number,
    private scheduler: Scheduler,
    private onData: (payload: unknown, url: string) => void,
    private onError: (error: unknown) => void,
  ) {}

  /** Debounced entry point; collapses bursts into one request. */
  request(url: string): void {
    this.newest = url;
    if (this.timer !== null) {
      this.scheduler.clear(this.timer);
    }
    this.timer = this.scheduler.set(() => {
      this.timer = null;
      this.fire(url);
    }, this.debounceMs);
  }

  get inFlight(): boolean {
    return this.inflight;
  }

  private fire(url: string): void {
    if (this.inflight) {
      this.queued = url;
      return;
    }
    this.inflight = true;
    this.fetchFn(url)
      .then(async (response) => {
        const payload = await response.json();
        if (!response.ok) {
          throw Object.assign(new Error(String((payload as { detail?: string }).detail)), {
            status: response.status,
          });
        }
        // drop stale responses: only the newest query may render
        if (url === this.newest) {
          this.onData(payload, url);
        }
      })
      .catch((error) => this.onError(error))
      .then(() => {
        this.inflight = false;
        if (this.queued !== null) {
          const next = this.queued;
          this.queued = null;
          this.fire(next);
        }
      });
  }
}

export interface SessionOptions {
  base: string;
  jobId: string;
  axisName: string;
  axisValues: number[];
  fetchFn: FetchLike;
  debounceMs?: number;
  scheduler?: Scheduler;
  onRender?: (panel: PanelKey, svg: string) => void;
  onError?: (panel: PanelKey, error: unknown) => void;
}

export class ExplorerSession {
  readonly requestLog: RequestLogEntry[] = [];
  readonly rendered: Partial<Record<PanelKey, string>> = {};
  readonly payloads: Partial<Record<PanelKey, unknown>> = {};
  settings: PanelSettings;
  sliderIndex: number;

  private fetchers: Record<PanelKey, PanelFetcher>;

  constructor(private options: SessionOptions) {
    this.sliderIndex = 0;
    this.settings = {
      markerValue: options.axisValues[0],
      subsystem: 0,
      oscillatorIndex: 1,
      initial: [0, 0],
      photonNumber: 1,
      sidebands: false,
      dispersiveLevel: 1,
    };
    const scheduler = options.scheduler ?? defaultScheduler;
    const debounceMs = options.debounceMs ?? 150;
    this.fetchers = Object.fromEntries(
      PANEL_KEYS.map((key) => [
        key,
        new PanelFetcher(
          options.fetchFn,
          debounceMs,
          scheduler,
          (payload, url) => this.handleData(key, payload, url),
          (error) => options.onError?.(key, error),
        ),
      ]),
    ) as Record<PanelKey, PanelFetcher>;
  }

  /** Slice selections snap to on-grid values fetched from the service. */
  get sliderValue(): number {
    return this.options.axisValues[this.sliderIndex];
  }

  setSlider(index: number): void {
    const clamped = Math.max(0, Math.min(index, this.options.axisValues.length - 1));
    this.sliderIndex = clamped;
    this.settings = { ...this.settings, markerValue: this.options.axisValues[clamped] };
    this.refreshAll();
  }

  setPhotonNumber(n: number): void {
    this.settings = { ...this.settings, photonNumber: n };
    this.refresh("transitions");
  }

  setInitial(initial: number[]): void {
    // shared between the transitions and matrix-element panels
    this.settings = { ...this.settings, initial };
    this.refresh("transitions");
    this.refresh("matrixElements");
  }

  setSubsystem(subsystem: number): void {
    this.settings = { ...this.settings, subsystem };
    this.refresh("bareWavefunctions");
    this.refresh("dispersiveShift");
    this.refresh("matrixElements");
  }

  refreshAll(): void {
    for (const key of PANEL_KEYS) {
      this.refresh(key);
    }
  }

  refresh(key: PanelKey): void {
    const query: SliceQuery = panelQuery(key, this.settings);
    const url = buildSliceUrl(this.options.base, this.options.jobId, query);
    this.fetchers[key].request(url);
  }

  inFlightCount(): number {
    return PANEL_KEYS.filter((key) => this.fetchers[key].inFlight).length;
  }

  private handleData(key: PanelKey, payload: unknown, url: string): void {
    this.requestLog.push({ panel: key, url });
    this.payloads[key] = payload;
    const svg = renderPanel(key, payload, this.settings);
    this.rendered[key] = svg;
    this.options.onRender?.(key, svg);
  }
}
