// Shareable search state, byte-compatible with the backend codec:
// "v1." + url-safe base64 of the canonical (key-sorted, no-space) JSON.

import { EMPTY_FILTER, EventFilter, ShareState } from "./types.js";

const VERSION_PREFIX = "v1.";

export class ShareDecodeError extends Error {}

function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalJson).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => JSON.stringify(k) + ":" + canonicalJson(v));
  return "{" + entries.join(",") + "}";
}

function bytesToBase64Url(bytes: Uint8Array): string {
  let binary = "";
  for (const b of bytes) {
    binary += String.fromCharCode(b);
  }
  return btoa(binary).replace(/\+/g, "-").replace(/\//g, "_");
}

function base64UrlToBytes(encoded: string): Uint8Array {
  const binary = atob(encoded.replace(/-/g, "+").replace(/_/g, "/"));
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) {
    bytes[i] = binary.charCodeAt(i);
  }
  return bytes;
}

export function encodeShareState(state: ShareState): string {
  const canonical = canonicalJson({
    filter: state.filter,
    selected_event_ids: state.selected_event_ids,
    panel_layout: state.panel_layout,
    language: state.language,
  });
  return VERSION_PREFIX + bytesToBase64Url(new TextEncoder().encode(canonical));
}

export function decodeShareState(code: string): ShareState {
  if (!code.startsWith(VERSION_PREFIX)) {
    throw new ShareDecodeError(`unknown share-state version in ${code.slice(0, 8)}`);
  }
  let parsed: unknown;
  try {
    const raw = base64UrlToBytes(code.slice(VERSION_PREFIX.length));
    parsed = JSON.parse(new TextDecoder("utf-8", { fatal: true }).decode(raw));
  } catch (err) {
    throw new ShareDecodeError(`corrupt share-state payload: ${err}`);
  }
  if (typeof parsed !== "object" || parsed === null) {
    throw new ShareDecodeError("share state must be an object");
  }
  const obj = parsed as Record<string, unknown>;
  const filter: EventFilter = { ...EMPTY_FILTER, ...((obj.filter ?? {}) as object) };
  const range = filter.date_range;
  if (range !== null && (!Array.isArray(range) || range.length !== 2)) {
    throw new ShareDecodeError("date_range must be null or a [start, end] pair");
  }
  return {
    filter,
    selected_event_ids: (obj.selected_event_ids as string[]) ?? [],
    panel_layout: (obj.panel_layout as string) ?? "default",
    language: (obj.language as string) ?? "en",
  };
}
