// Wire types mirroring the service payloads (all carry "v": 1).

export type Vec3 = [number, number, number];

export interface SceneObjectPayload {
  id: string;
  shape: string;
  color: string;
  position: Vec3;
  orientation: Vec3;
  radius: number;
  target: boolean;
}

export interface ScenePayload {
  v: number;
  level: string;
  num_targets: number;
  seed: number;
  technique: string;
  viewpoint: Vec3;
  search_region: { center: Vec3; radius: number };
  target_pair: { shape: string; color: string };
  objects: SceneObjectPayload[];
}

export interface PanelEntryPayload {
  id: string;
  shape: string;
  color: string;
}

export interface TrialPayload {
  phase: string;
  countdown_remaining_ms: number;
  attempts: number;
  elapsed_ms: number;
  cursor: number;
  total: number;
}

export interface DeltaPayload {
  v: number;
  seq: number;
  kind: "snapshot" | "delta";
  changed: { id: string; selected: boolean }[];
  panel: { recognized_text: string; entries: PanelEntryPayload[] };
  trial: TrialPayload;
  notice: string;
  tone: boolean;
}

export interface MinimapIconPayload {
  id: string;
  x: number;
  y: number;
  expanded: boolean;
  angle: number;
}

export interface MinimapPayload {
  v: number;
  frozen: boolean;
  disc_radius: number;
  icon_radius: number;
  icons: MinimapIconPayload[];
}

export interface SessionInfo {
  v: number;
  id: string;
  technique: string;
  mode: string;
  num_objects: number;
  trial: string;
}

export interface ServiceErrorBody {
  v: number;
  error: string;
  detail: string;
}
