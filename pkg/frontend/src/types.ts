// Shapes of /v1 API payloads consumed by the dashboard.

export interface EventFilter {
  country: string | null;
  city: string | null;
  station_id: string | null;
  text_query: string | null;
  min_reliability: number | null;
  date_range: [string, string] | null;
  genre: string | null;
  artist_country: string | null;
}

export const EMPTY_FILTER: EventFilter = {
  country: null,
  city: null,
  station_id: null,
  text_query: null,
  min_reliability: null,
  date_range: null,
  genre: null,
  artist_country: null,
};

export interface ShareState {
  filter: EventFilter;
  selected_event_ids: string[];
  panel_layout: string;
  language: string;
}

export interface LocationRecord {
  location_id: string;
  city: string;
  country: string;
  country_code: string;
  continent: string;
  coordinates: [number, number]; // lon, lat
  population: number | null;
  country_gdp: number | null;
}

export interface StationRecord {
  station_id: string;
  name: string;
  location_id: string;
  form: { kind: string; band?: string | null; frequency?: number | null };
  formats: string[];
  genres: string[];
  website: string | null;
  review_status: string;
  reliability_pct: number | null;
}

export interface EventRecord {
  event_id: string;
  station_id: string;
  time_at_station: string;
  description: string;
  reliability: number | null;
  artist_id: string | null;
  track_id: string | null;
}

export interface ArtistRecord {
  artist_id: string;
  name: string;
  artist_type: { kind: string; detail?: string | null };
  gender: string | null;
  country: string | null;
  genres: string[];
  instruments: string[];
  members: { name: string; gender: string | null; ethnicity: string | null }[] | null;
}

export interface TrackRecord {
  track_id: string;
  title: string;
  duration_s: number | null;
  year_released: number | null;
  key_mode: { tonic: string; mode: string } | null;
  language: string | null;
  features: Record<string, number> | null;
  popularity: number | null;
  listen_urls: string[];
}

export interface JoinedEvent {
  event: EventRecord;
  station: StationRecord;
  location: LocationRecord;
  artist: ArtistRecord | null;
  track: TrackRecord | null;
}

export interface EventPage {
  items: JoinedEvent[];
  next_cursor: string | null;
}

export interface StationPage {
  items: { station: StationRecord; location: LocationRecord }[];
  next_cursor: string | null;
  total: number;
}

export interface HexBin {
  center: [number, number];
  station_count: number;
  country_breakdown: Record<string, number>;
}

export interface HexbinResponse {
  resolution: number;
  bins: HexBin[];
}

export interface MapDot {
  position: [number, number];
  event_count: number;
  contains_selected: boolean;
}

export interface BarEntry {
  label: string;
  count: number;
}

export interface HistBin {
  start: number;
  end: number;
  count: number;
}

export interface ScatterPoint {
  event_id: string;
  x: number;
  y: number;
}

export interface PcaResponse {
  mean: number[];
  components: number[][];
  explained_variance: number[];
  feature_fields: string[];
  points: { event_id: string; xy: [number, number] }[];
}

export interface EventDetail {
  station: StationRecord & { location: LocationRecord };
  event: EventRecord;
  artist: ArtistRecord | null;
  track: TrackRecord | null;
  listen_links: string[];
  links: { station_website: string | null };
}
