// Event-list and selected-list tables. Rows surface the joined station and
// location columns; clicking a row selects the event for the detail, map,
// and selected-list panels.

import { JoinedEvent } from "../types.js";

export interface EventTableCallbacks {
  onSelect: (eventId: string) => void;
  onDeselect?: (eventId: string) => void;
}

function cell(doc: Document, text: string, className?: string): HTMLTableCellElement {
  const td = doc.createElement("td");
  td.textContent = text;
  if (className) td.className = className;
  return td;
}

function headerRow(doc: Document, labels: string[]): HTMLTableRowElement {
  const tr = doc.createElement("tr");
  for (const label of labels) {
    const th = doc.createElement("th");
    th.textContent = label;
    tr.appendChild(th);
  }
  return tr;
}

export function renderEventTable(
  container: HTMLElement,
  rows: JoinedEvent[],
  selectedIds: string[],
  callbacks: EventTableCallbacks,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const table = doc.createElement("table");
  table.className = "event-table";
  table.appendChild(
    headerRow(doc, ["time@station", "description", "station", "city", "country", "reliability", ""]),
  );
  const selected = new Set(selectedIds);
  for (const row of rows) {
    const tr = doc.createElement("tr");
    tr.dataset.eventId = row.event.event_id;
    if (selected.has(row.event.event_id)) tr.classList.add("selected");
    tr.appendChild(cell(doc, row.event.time_at_station.replace("T", " ")));
    tr.appendChild(cell(doc, row.event.description, "description"));
    tr.appendChild(cell(doc, row.station.name));
    tr.appendChild(cell(doc, row.location.city, "city"));
    tr.appendChild(cell(doc, row.location.country, "country"));
    tr.appendChild(
      cell(doc, row.event.reliability === null ? "—" : row.event.reliability.toFixed(2)),
    );
    const action = doc.createElement("td");
    const button = doc.createElement("button");
    button.textContent = "select";
    button.className = "select-event";
    button.addEventListener("click", () => callbacks.onSelect(row.event.event_id));
    action.appendChild(button);
    tr.appendChild(action);
    table.appendChild(tr);
  }
  container.appendChild(table);
}

export function renderSelectedTable(
  container: HTMLElement,
  rows: JoinedEvent[],
  callbacks: EventTableCallbacks,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const table = doc.createElement("table");
  table.className = "selected-table";
  table.appendChild(headerRow(doc, ["description", "station", ""]));
  for (const row of rows) {
    const tr = doc.createElement("tr");
    tr.dataset.eventId = row.event.event_id;
    tr.appendChild(cell(doc, row.event.description, "description"));
    tr.appendChild(cell(doc, row.station.name));
    const action = doc.createElement("td");
    const button = doc.createElement("button");
    button.textContent = "remove";
    button.className = "deselect-event";
    button.addEventListener("click", () => callbacks.onDeselect?.(row.event.event_id));
    action.appendChild(button);
    tr.appendChild(action);
    table.appendChild(tr);
  }
  container.appendChild(table);
}
