// REST client plus the delta stream with sequence-gap recovery.

import type {
  DeltaPayload,
  MinimapPayload,
  ScenePayload,
  SessionInfo,
  Vec3,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ServiceError(response.status, body.error ?? "HttpError", body.detail ?? "");
  }
  return body as T;
}

export interface CreateSessionParams {
  technique?: string;
  mode?: "adhoc" | "plan";
  level?: string;
  num_targets?: number;
  seed?: number;
  participant?: string;
  order_index?: number;
}

export class ServiceClient {
  constructor(public base: string) {}

  createSession(params: CreateSessionParams): Promise<SessionInfo> {
    return this.post("/sessions", params);
  }

  getScene(sessionId: string): Promise<ScenePayload> {
    return this.get(`/sessions/${sessionId}/scene`);
  }

  submitUtterance(sessionId: string, text: string): Promise<DeltaPayload> {
    return this.post(`/sessions/${sessionId}/utterance`, { text });
  }

  submitRay(sessionId: string, origin: Vec3, direction: Vec3): Promise<DeltaPayload> {
    return this.post(`/sessions/${sessionId}/ray`, { origin, direction });
  }

  submitMapPick(sessionId: string, point: [number, number]): Promise<DeltaPayload> {
    return this.post(`/sessions/${sessionId}/map-pick`, { point });
  }

  aimMinimap(
    sessionId: string,
    origin: Vec3,
    direction: Vec3,
    halfAngle = 0,
  ): Promise<MinimapPayload> {
    return this.post(`/sessions/${sessionId}/minimap`, {
      origin,
      direction,
      half_angle: halfAngle,
    });
  }

  getMinimap(sessionId: string): Promise<MinimapPayload> {
    return this.get(`/sessions/${sessionId}/minimap`);
  }

  trial(sessionId: string, verb: "start" | "confirm" | "abort" | "next"): Promise<DeltaPayload> {
    return this.post(`/sessions/${sessionId}/trial/${verb}`, {});
  }

  async records(sessionId: string): Promise<string> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/records`);
    return response.text();
  }

  private async get<T>(path: string): Promise<T> {
    return asJson<T>(await fetch(`${this.base}${path}`));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    return asJson<T>(
      await fetch(`${this.base}${path}`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
  }
}

type WebSocketCtor = new (url: string) => WebSocket;

export interface DeltaStreamOptions {
  onDelta: (delta: DeltaPayload) => void;
  onGap?: (expected: number, got: number) => void;
  webSocket?: WebSocketCtor;
}

/**
 * Ordered delta subscription. The server sends a full snapshot first; after
 * that every delta must arrive with seq exactly one above the last. A gap
 * means a dropped message, so the stream reconnects and the fresh snapshot
 * resynchronizes the client.
 */
export class DeltaStream {
  private socket: WebSocket | null = null;
  private lastSeq = -1;
  private closed = false;
  private readonly wsCtor: WebSocketCtor;

  constructor(
    private readonly base: string,
    private readonly sessionId: string,
    private readonly options: DeltaStreamOptions,
  ) {
    this.wsCtor = options.webSocket ?? (globalThis.WebSocket as WebSocketCtor);
  }

  connect(): void {
    const url = `${this.base.replace(/^http/, "ws")}/sessions/${this.sessionId}/stream`;
    const socket = new this.wsCtor(url);
    this.socket = socket;
    socket.onmessage = (event: MessageEvent) => {
      const delta = JSON.parse(String(event.data)) as DeltaPayload;
      if (delta.kind === "snapshot") {
        this.lastSeq = delta.seq;
        this.options.onDelta(delta);
        return;
      }
      if (this.lastSeq >= 0 && delta.seq !== this.lastSeq + 1) {
        this.options.onGap?.(this.lastSeq + 1, delta.seq);
        this.resubscribe();
        return;
      }
      this.lastSeq = delta.seq;
      this.options.onDelta(delta);
    };
    socket.onclose = () => {
      if (!this.closed && this.socket === socket) {
        // Drop the stale seq so the next snapshot is accepted as truth.
        this.lastSeq = -1;
      }
    };
  }

  resubscribe(): void {
    this.socket?.close();
    this.socket = null;
    this.lastSeq = -1;
    if (!this.closed) {
      this.connect();
    }
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
  }
}
