// Event-detail panel: four sections (station, event, artist, track) plus
// the listen panel with embedded streaming links.

import { EventDetail } from "../types.js";

function section(doc: Document, name: string, fields: [string, string | null][]): HTMLElement {
  const el = doc.createElement("section");
  el.className = `detail-${name}`;
  const heading = doc.createElement("h3");
  heading.textContent = name;
  el.appendChild(heading);
  const list = doc.createElement("dl");
  for (const [label, value] of fields) {
    if (value === null || value === "") continue;
    const dt = doc.createElement("dt");
    dt.textContent = label;
    const dd = doc.createElement("dd");
    dd.textContent = value;
    list.appendChild(dt);
    list.appendChild(dd);
  }
  el.appendChild(list);
  return el;
}

function formText(form: { kind: string; band?: string | null; frequency?: number | null }): string {
  if (form.kind === "webcast") return "webcast";
  return `simulcast (${form.band ?? "?"} ${form.frequency ?? "?"})`;
}

export function renderDetail(container: HTMLElement, detail: EventDetail | null): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (detail === null) {
    const hint = doc.createElement("p");
    hint.className = "detail-empty";
    hint.textContent = "Select an event to see its metadata.";
    container.appendChild(hint);
    return;
  }
  const { station, event, artist, track } = detail;
  container.appendChild(
    section(doc, "station", [
      ["name", station.name],
      ["location", `${station.location.city}, ${station.location.country}`],
      ["form", formText(station.form)],
      ["formats", station.formats.join(", ")],
      ["genres", station.genres.join(", ")],
      ["website", station.website],
    ]),
  );
  container.appendChild(
    section(doc, "event", [
      ["description", event.description],
      ["time@station", event.time_at_station],
      ["reliability", event.reliability === null ? null : String(event.reliability)],
    ]),
  );
  container.appendChild(
    section(
      doc,
      "artist",
      artist === null
        ? []
        : [
            ["name", artist.name],
            ["type", artist.artist_type.kind],
            ["gender", artist.gender],
            ["country", artist.country],
            ["genres", artist.genres.join(", ")],
            ["instruments", artist.instruments.join(", ")],
            ["members", artist.members ? artist.members.map((m) => m.name).join(", ") : null],
          ],
    ),
  );
  container.appendChild(
    section(
      doc,
      "track",
      track === null
        ? []
        : [
            ["title", track.title],
            ["duration", track.duration_s === null ? null : `${track.duration_s}s`],
            ["year", track.year_released === null ? null : String(track.year_released)],
            ["key", track.key_mode ? `${track.key_mode.tonic} ${track.key_mode.mode}` : null],
            ["language", track.language],
          ],
    ),
  );
  const listen = doc.createElement("section");
  listen.className = "detail-listen";
  const heading = doc.createElement("h3");
  heading.textContent = "listen";
  listen.appendChild(heading);
  for (const url of detail.listen_links) {
    const anchor = doc.createElement("a");
    anchor.className = "listen";
    anchor.href = url;
    anchor.target = "_blank";
    anchor.rel = "noopener";
    anchor.textContent = url;
    listen.appendChild(anchor);
  }
  if (detail.links.station_website) {
    const anchor = doc.createElement("a");
    anchor.className = "station-website";
    anchor.href = detail.links.station_website;
    anchor.textContent = "station website";
    listen.appendChild(anchor);
  }
  container.appendChild(listen);
}
