import { describe, expect, it } from "vitest";

import { DeltaStream } from "../src/api.js";
import type { DeltaPayload } from "../src/types.js";

// Minimal scripted WebSocket double.
class FakeSocket {
  static instances: FakeSocket[] = [];
  onmessage: ((event: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  closedByClient = false;

  constructor(public url: string) {
    FakeSocket.instances.push(this);
  }

  close(): void {
    this.closedByClient = true;
    this.onclose?.();
  }

  emit(payload: Partial<DeltaPayload>): void {
    const message: DeltaPayload = {
      v: 1,
      seq: 0,
      kind: "delta",
      changed: [],
      panel: { recognized_text: "", entries: [] },
      trial: {
        phase: "free_play",
        countdown_remaining_ms: 0,
        attempts: 0,
        elapsed_ms: 0,
        cursor: 0,
        total: 0,
      },
      notice: "",
      tone: false,
      ...payload,
    };
    this.onmessage?.({ data: JSON.stringify(message) });
  }
}

describe("DeltaStream", () => {
  it("delivers snapshot then consecutive deltas", () => {
    FakeSocket.instances = [];
    const seen: number[] = [];
    const stream = new DeltaStream("http://x", "s1", {
      onDelta: (d) => seen.push(d.seq),
      webSocket: FakeSocket as unknown as new (url: string) => WebSocket,
    });
    stream.connect();
    const socket = FakeSocket.instances[0];
    socket.emit({ kind: "snapshot", seq: 3 });
    socket.emit({ seq: 4 });
    socket.emit({ seq: 5 });
    expect(seen).toEqual([3, 4, 5]);
    stream.close();
  });

  it("resubscribes on a sequence gap", () => {
    FakeSocket.instances = [];
    const seen: number[] = [];
    let gaps = 0;
    const stream = new DeltaStream("http://x", "s1", {
      onDelta: (d) => seen.push(d.seq),
      onGap: () => {
        gaps += 1;
      },
      webSocket: FakeSocket as unknown as new (url: string) => WebSocket,
    });
    stream.connect();
    const first = FakeSocket.instances[0];
    first.emit({ kind: "snapshot", seq: 1 });
    first.emit({ seq: 2 });
    first.emit({ seq: 9 }); // dropped 3..8 somewhere
    expect(gaps).toBe(1);
    expect(FakeSocket.instances).toHaveLength(2); // reconnected
    const second = FakeSocket.instances[1];
    second.emit({ kind: "snapshot", seq: 9 });
    second.emit({ seq: 10 });
    expect(seen).toEqual([1, 2, 9, 10]);
    expect(first.closedByClient).toBe(true);
    stream.close();
  });

  it("websocket url derives from the http base", () => {
    FakeSocket.instances = [];
    const stream = new DeltaStream("http://127.0.0.1:9000", "abc", {
      onDelta: () => undefined,
      webSocket: FakeSocket as unknown as new (url: string) => WebSocket,
    });
    stream.connect();
    expect(FakeSocket.instances[0].url).toBe("ws://127.0.0.1:9000/sessions/abc/stream");
    stream.close();
  });
});
