// Typed client for the /v1 API. Every number the dashboard shows comes
// through here; panels never aggregate locally.

import {
  BarEntry,
  EventDetail,
  EventFilter,
  EventPage,
  HexbinResponse,
  HistBin,
  MapDot,
  PcaResponse,
  ScatterPoint,
  ShareState,
  StationPage,
} from "./types.js";

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export function filterParams(filter: EventFilter): URLSearchParams {
  const params = new URLSearchParams();
  if (filter.country) params.set("country", filter.country);
  if (filter.city) params.set("city", filter.city);
  if (filter.station_id) params.set("station_id", filter.station_id);
  if (filter.text_query) params.set("q", filter.text_query);
  if (filter.min_reliability !== null) {
    params.set("min_reliability", String(filter.min_reliability));
  }
  if (filter.date_range) {
    params.set("since", filter.date_range[0]);
    params.set("until", filter.date_range[1]);
  }
  if (filter.genre) params.set("genre", filter.genre);
  if (filter.artist_country) params.set("artist_country", filter.artist_country);
  return params;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchFn = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string, params?: URLSearchParams): Promise<T> {
    const qs = params && [...params].length ? `?${params}` : "";
    const resp = await this.fetchFn(`${this.baseUrl}${path}${qs}`);
    if (!resp.ok) {
      throw new Error(`GET ${path} failed: ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  events(filter: EventFilter, limit = 1000): Promise<EventPage> {
    const params = filterParams(filter);
    params.set("limit", String(limit));
    return this.get<EventPage>("/v1/events", params);
  }

  eventDetail(eventId: string): Promise<EventDetail> {
    return this.get<EventDetail>(`/v1/events/${encodeURIComponent(eventId)}`);
  }

  stations(limit = 10000): Promise<StationPage> {
    return this.get<StationPage>("/v1/stations", new URLSearchParams({ limit: String(limit) }));
  }

  hexbin(resolution: number): Promise<HexbinResponse> {
    return this.get<HexbinResponse>(
      "/v1/agg/hexbin",
      new URLSearchParams({ res: String(resolution) }),
    );
  }

  mapDots(filter: EventFilter, radius: number, selectedIds: string[]): Promise<{ dots: MapDot[] }> {
    const params = filterParams(filter);
    params.set("radius", String(radius));
    if (selectedIds.length) params.set("selected", selectedIds.join(","));
    return this.get<{ dots: MapDot[] }>("/v1/agg/map", params);
  }

  barCounts(filter: EventFilter, by: string, k = 10): Promise<{ bars: BarEntry[] }> {
    const params = filterParams(filter);
    params.set("by", by);
    params.set("k", String(k));
    return this.get<{ bars: BarEntry[] }>("/v1/agg/bar", params);
  }

  histogram(filter: EventFilter, field: string, bins = 10): Promise<{ bins: HistBin[] }> {
    const params = filterParams(filter);
    params.set("field", field);
    params.set("bins", String(bins));
    return this.get<{ bins: HistBin[] }>("/v1/agg/hist", params);
  }

  scatter(filter: EventFilter, x: string, y: string): Promise<{ points: ScatterPoint[] }> {
    const params = filterParams(filter);
    params.set("x", x);
    params.set("y", y);
    return this.get<{ points: ScatterPoint[] }>("/v1/agg/scatter", params);
  }

  pca(filter: EventFilter): Promise<PcaResponse> {
    return this.get<PcaResponse>("/v1/agg/pca", filterParams(filter));
  }

  exportCsvUrl(filter: EventFilter, scope: "full" | "reliable" | "public-domain"): string {
    const params = filterParams(filter);
    params.set("scope", scope);
    return `${this.baseUrl}/v1/export/csv?${params}`;
  }

  async encodeShare(state: ShareState): Promise<string> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/share`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(state),
    });
    if (!resp.ok) {
      throw new Error(`share encode failed: ${resp.status}`);
    }
    const body = (await resp.json()) as { code: string };
    return body.code;
  }
}
