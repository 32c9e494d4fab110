// Single UI store: all panel updates flow through one state object, and the
// state serializes losslessly to the backend's share format.

import { hexCell, sameCell } from "./hex.js";
import {
  EMPTY_FILTER,
  EventFilter,
  HexBin,
  LocationRecord,
  ShareState,
  StationRecord,
} from "./types.js";

export interface UiState {
  filter: EventFilter;
  selectedEventIds: string[];
  panelLayout: string;
  language: string;
}

export type Listener = (state: UiState) => void;

export class UiStore {
  private state: UiState = {
    filter: { ...EMPTY_FILTER },
    selectedEventIds: [],
    panelLayout: "default",
    language: "en",
  };
  private listeners: Listener[] = [];

  get(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setFilter(filter: Partial<EventFilter>): void {
    this.state = { ...this.state, filter: { ...this.state.filter, ...filter } };
    this.emit();
  }

  clearFilter(): void {
    this.state = { ...this.state, filter: { ...EMPTY_FILTER } };
    this.emit();
  }

  setLanguage(language: string): void {
    this.state = { ...this.state, language };
    this.emit();
  }

  setPanelLayout(panelLayout: string): void {
    this.state = { ...this.state, panelLayout };
    this.emit();
  }

  /**
   * Restrict the event list to a selected globe bin.
   *
   * The bin only carries a center and country counts, so the station
   * directory decides the location constraint: a single city inside the
   * cell filters by city, a single country by country, otherwise the
   * dominant country wins (ties lexicographic).
   */
  globeSelect(
    bin: HexBin,
    resolution: number,
    stations: { station: StationRecord; location: LocationRecord }[],
  ): void {
    const cell = hexCell(bin.center[0], bin.center[1], resolution);
    const inside = stations.filter(({ location }) =>
      sameCell(hexCell(location.coordinates[0], location.coordinates[1], resolution), cell),
    );
    const cities = [...new Set(inside.map(({ location }) => location.city))];
    const countries = [...new Set(inside.map(({ location }) => location.country))];
    let constraint: Partial<EventFilter>;
    if (cities.length === 1) {
      constraint = { city: cities[0], country: null, station_id: null };
    } else if (countries.length === 1) {
      constraint = { country: countries[0], city: null, station_id: null };
    } else {
      const counts = new Map<string, number>();
      for (const key of Object.keys(bin.country_breakdown).sort()) {
        counts.set(key, bin.country_breakdown[key]);
      }
      let best: string | null = null;
      let bestCount = -1;
      for (const [code, count] of counts) {
        if (count > bestCount) {
          best = code;
          bestCount = count;
        }
      }
      const match = inside.find(({ location }) => location.country_code === best);
      constraint = { country: match ? match.location.country : null, city: null, station_id: null };
    }
    this.setFilter(constraint);
  }

  clearLocation(): void {
    this.setFilter({ city: null, country: null, station_id: null });
  }

  selectEvent(eventId: string): void {
    if (this.state.selectedEventIds.includes(eventId)) {
      return; // selecting twice must not duplicate
    }
    this.state = {
      ...this.state,
      selectedEventIds: [...this.state.selectedEventIds, eventId],
    };
    this.emit();
  }

  deselectEvent(eventId: string): void {
    this.state = {
      ...this.state,
      selectedEventIds: this.state.selectedEventIds.filter((id) => id !== eventId),
    };
    this.emit();
  }

  toShareState(): ShareState {
    return {
      filter: { ...this.state.filter },
      selected_event_ids: [...this.state.selectedEventIds],
      panel_layout: this.state.panelLayout,
      language: this.state.language,
    };
  }

  applyShareState(share: ShareState): void {
    this.state = {
      filter: { ...EMPTY_FILTER, ...share.filter },
      selectedEventIds: [...share.selected_event_ids],
      panelLayout: share.panel_layout,
      language: share.language,
    };
    this.emit();
  }
}
