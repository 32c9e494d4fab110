// Fixture-backed fetch fake: routes /v1 requests to recorded API responses
// and records every request so tests can assert the query contract.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import type { FetchFn } from "../src/api.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T = unknown>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf-8")) as T;
}

export interface RecordedRequest {
  path: string;
  params: URLSearchParams;
  method: string;
}

export class FixtureBackend {
  requests: RecordedRequest[] = [];

  readonly fetchFn: FetchFn = async (url, init) => {
    const parsed = new URL(url, "http://fixture");
    const params = parsed.searchParams;
    this.requests.push({
      path: parsed.pathname,
      params,
      method: init?.method ?? "GET",
    });
    const body = this.route(parsed.pathname, params);
    return new Response(JSON.stringify(body), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });
  };

  requestsTo(path: string): RecordedRequest[] {
    return this.requests.filter((r) => r.path === path);
  }

  lastRequestTo(path: string): RecordedRequest | undefined {
    return this.requestsTo(path).at(-1);
  }

  private route(path: string, params: URLSearchParams): unknown {
    if (path === "/v1/stations") return fixture("stations");
    if (path === "/v1/events") {
      return params.get("city") === "Jakarta"
        ? fixture("events_jakarta")
        : fixture("events_all");
    }
    if (path.startsWith("/v1/events/")) return fixture("detail");
    if (path === "/v1/agg/hexbin") return fixture("hexbin");
    if (path === "/v1/agg/map") {
      return params.get("selected") ? fixture("map_selected") : fixture("map");
    }
    if (path === "/v1/agg/bar") return fixture("bar_country");
    if (path === "/v1/agg/hist") return fixture("hist_year");
    if (path === "/v1/agg/scatter") return fixture("scatter_av");
    if (path === "/v1/agg/pca") return fixture("pca");
    if (path === "/v1/share") return fixture("share_code");
    throw new Error(`no fixture for ${path}`);
  }
}

export function makeDom(): Document {
  document.body.innerHTML = `
    <input id="search-box">
    <select id="viz-select"><option value="bar:country">bar</option></select>
    <button id="clear-filter"></button>
    <a id="export-csv"></a>
    <button id="export-url"></button>
    <div id="globe-panel"></div>
    <div id="event-list-panel"></div>
    <div id="selected-list-panel"></div>
    <div id="map-panel"></div>
    <div id="detail-panel"></div>
    <div id="viz-panel"></div>`;
  return document;
}
