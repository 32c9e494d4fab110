// Dashboard bootstrap: wires the store, the /v1 client, and the panels.
// Local state only orchestrates; every displayed number is a /v1 response.

import { ApiClient } from "./api.js";
import { decodeShareState, encodeShareState, ShareDecodeError } from "./share.js";
import { UiStore } from "./state.js";
import { serializeSvg } from "./panels/svg.js";
import { renderGlobe } from "./panels/globe.js";
import { renderMap } from "./panels/map.js";
import { renderDetail } from "./panels/detail.js";
import { renderEventTable, renderSelectedTable } from "./panels/events.js";
import {
  renderBarChart,
  renderHistogram,
  renderPcaScatter,
  renderScatter,
} from "./panels/viz.js";
import { EventDetail, JoinedEvent, StationPage } from "./types.js";

const HEX_RESOLUTION = 4.0;
const MAP_MERGE_RADIUS = 0.0;

export interface AppHandles {
  store: UiStore;
  refresh: () => Promise<void>;
  exportShareUrl: () => string;
  exportSvg: () => string | null;
}

type VizMode =
  | { kind: "bar"; by: string }
  | { kind: "hist"; field: string }
  | { kind: "scatter"; x: string; y: string }
  | { kind: "pca" };

export async function bootstrap(doc: Document, api: ApiClient): Promise<AppHandles> {
  const store = new UiStore();
  const panel = (id: string) => {
    const el = doc.getElementById(id);
    if (!el) throw new Error(`missing panel container #${id}`);
    return el as HTMLElement;
  };

  const globeEl = panel("globe-panel");
  const eventsEl = panel("event-list-panel");
  const selectedEl = panel("selected-list-panel");
  const mapEl = panel("map-panel");
  const detailEl = panel("detail-panel");
  const vizEl = panel("viz-panel");

  let stations: StationPage = { items: [], next_cursor: null, total: 0 };
  let currentRows: JoinedEvent[] = [];
  let rowIndex = new Map<string, JoinedEvent>();
  let lastDetail: EventDetail | null = null;
  let vizMode: VizMode = { kind: "bar", by: "country" };
  let lastSvg: SVGSVGElement | null = null;
  let globeView = { lon0: 20, lat0: 10 };

  // Restore a shared search from the URL fragment, if present.
  const hash = doc.defaultView?.location.hash ?? "";
  if (hash.startsWith("#s=")) {
    try {
      store.applyShareState(decodeShareState(decodeURIComponent(hash.slice(3))));
    } catch (err) {
      if (!(err instanceof ShareDecodeError)) throw err;
      doc.defaultView?.console.warn("ignoring corrupt share state in URL", err);
    }
  }

  async function refreshGlobe(): Promise<void> {
    const hexbin = await api.hexbin(HEX_RESOLUTION);
    renderGlobe(globeEl, hexbin.bins, globeView, (bin) => {
      store.globeSelect(bin, hexbin.resolution, stations.items);
      void refresh(); // the event list refetches under the bin's constraint
    });
  }

  async function refreshViz(): Promise<void> {
    const state = store.get();
    const highlighted = new Set(state.selectedEventIds);
    if (vizMode.kind === "bar") {
      const body = await api.barCounts(state.filter, vizMode.by, 10);
      lastSvg = renderBarChart(vizEl, body.bars);
    } else if (vizMode.kind === "hist") {
      const body = await api.histogram(state.filter, vizMode.field, 10);
      lastSvg = renderHistogram(vizEl, body.bins);
    } else if (vizMode.kind === "scatter") {
      const body = await api.scatter(state.filter, vizMode.x, vizMode.y);
      lastSvg = renderScatter(vizEl, body.points, {
        highlighted,
        xLabel: vizMode.x,
        yLabel: vizMode.y,
      });
    } else {
      const body = await api.pca(state.filter);
      lastSvg = renderPcaScatter(vizEl, body, highlighted);
    }
  }

  async function refresh(): Promise<void> {
    const state = store.get();
    const [page, mapBody] = await Promise.all([
      api.events(state.filter, 1000),
      api.mapDots(state.filter, MAP_MERGE_RADIUS, state.selectedEventIds),
    ]);
    currentRows = page.items;
    rowIndex = new Map(currentRows.map((row) => [row.event.event_id, row]));
    renderEventTable(eventsEl, currentRows, state.selectedEventIds, {
      onSelect: (id) => void selectEvent(id),
    });
    const selectedRows = state.selectedEventIds
      .map((id) => rowIndex.get(id))
      .filter((row): row is JoinedEvent => row !== undefined);
    renderSelectedTable(selectedEl, selectedRows, {
      onSelect: () => undefined,
      onDeselect: (id) => {
        store.deselectEvent(id);
        void refresh();
      },
    });
    renderMap(mapEl, mapBody.dots);
    renderDetail(detailEl, lastDetail);
    await refreshViz();
  }

  async function selectEvent(eventId: string): Promise<void> {
    store.selectEvent(eventId);
    lastDetail = await api.eventDetail(eventId);
    await refresh();
  }

  stations = await api.stations();

  // Toolbox controls, when the host page provides them.
  const search = doc.getElementById("search-box") as HTMLInputElement | null;
  search?.addEventListener("change", () => {
    store.setFilter({ text_query: search.value || null });
    void refresh();
  });
  const language = doc.getElementById("language-select") as HTMLSelectElement | null;
  language?.addEventListener("change", () => store.setLanguage(language.value));
  const clear = doc.getElementById("clear-filter");
  clear?.addEventListener("click", () => {
    store.clearFilter();
    void refresh();
  });
  const vizSelect = doc.getElementById("viz-select") as HTMLSelectElement | null;
  vizSelect?.addEventListener("change", () => {
    const [kind, a, b] = vizSelect.value.split(":");
    if (kind === "bar") vizMode = { kind, by: a };
    else if (kind === "hist") vizMode = { kind, field: a };
    else if (kind === "scatter") vizMode = { kind, x: a, y: b };
    else vizMode = { kind: "pca" };
    void refreshViz();
  });
  const csvButton = doc.getElementById("export-csv") as HTMLAnchorElement | null;
  if (csvButton) {
    csvButton.href = api.exportCsvUrl(store.get().filter, "full");
  }
  const urlButton = doc.getElementById("export-url");
  urlButton?.addEventListener("click", () => {
    const win = doc.defaultView;
    if (win) win.location.hash = "#s=" + encodeURIComponent(exportShareUrl());
  });
  const undock = doc.getElementById("undock-map");
  undock?.addEventListener("click", () => {
    // Read-only mirror window sharing the current state via the fragment.
    doc.defaultView?.open(`${doc.defaultView.location.pathname}#s=${encodeURIComponent(exportShareUrl())}`);
  });

  function exportShareUrl(): string {
    return encodeShareState(store.toShareState());
  }

  function exportSvg(): string | null {
    return lastSvg ? serializeSvg(lastSvg) : null;
  }

  store.subscribe(() => {
    if (csvButton) csvButton.href = api.exportCsvUrl(store.get().filter, "full");
  });

  await refreshGlobe();
  await refresh();

  return { store, refresh, exportShareUrl, exportSvg };
}
