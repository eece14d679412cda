/** Wire types of the query service (mirrors /api/params and /api/query). */

export interface ImageEntry {
  image_id: string;
  label: string | null;
}

export interface MatchedPairs {
  distances: (number | null)[];
  pairs: [number, number][];
}

export interface ResultRecord {
  query_id: string;
  target_id: string;
  r_hr: number;
  r_nmd: number;
  r_cr: number;
  r_md: number | null;
  r_a: number | null;
  r_combi1: number | null;
  r_combi2: number | null;
  chosen_set_pair: [number, number] | null;
  matched: MatchedPairs;
}

export interface RankedResults {
  query_id: string;
  records: ResultRecord[];
  params: Record<string, unknown>;
}

export interface QueryBody {
  query_id: string;
  k: number;
  norm: string;
  beta: number | null;
  sort: string;
  wa: number;
  combine: string;
  baseline: string | null;
  latp_mode: string;
  latp_robust: boolean;
}

export interface ParamsInfo {
  extract: Record<string, number | boolean>;
  defaults: {
    k: number;
    norm: string;
    beta: number | null;
    beta_by_norm: Record<string, number>;
    sort: string;
    wa: number;
    combine: string;
    baseline: string | null;
  };
  choices: {
    norm: string[];
    sort: string[];
    combine: string[];
    baseline: (string | null)[];
    latp_mode: string[];
    elements: string[];
  };
  features_attached: boolean;
  corpus_size: number;
}

export interface CanvasPoseline {
  top: [number, number];
  bottom: [number, number];
  is_fallback: boolean;
  pose_index: number;
}

export interface CanvasJson {
  canvas_version: number;
  image_id: string;
  width: number;
  height: number;
  poselines: CanvasPoseline[];
}

/** Overlay layer toggles; keys follow the service's ?elements= names. */
export type OverlayToggles = Record<string, boolean>;

export const OVERLAY_ELEMENTS = [
  "poselines",
  "cones",
  "regions",
  "centers",
  "lines",
  "latp_skeletons",
] as const;

/** SVG group class carrying each toggleable element family. */
export const ELEMENT_SVG_CLASS: Record<string, string> = {
  poselines: "poselines",
  cones: "cones",
  regions: "regions",
  centers: "centers",
  lines: "action-lines",
  latp_skeletons: "skeletons",
};
