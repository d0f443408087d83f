// jsdom has no canvas 2D context; tests assert on the app model, so a
// recording no-op context is enough for render code to run.

class StubContext {
  canvas: HTMLCanvasElement;
  fillStyle: unknown = "#000";
  strokeStyle: unknown = "#000";
  lineWidth = 1;
  calls: string[] = [];

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
  }

  private record(name: string): void {
    this.calls.push(name);
  }

  clearRect() { this.record("clearRect"); }
  fillRect() { this.record("fillRect"); }
  beginPath() { this.record("beginPath"); }
  closePath() { this.record("closePath"); }
  moveTo() { this.record("moveTo"); }
  lineTo() { this.record("lineTo"); }
  arc() { this.record("arc"); }
  ellipse() { this.record("ellipse"); }
  rect() { this.record("rect"); }
  quadraticCurveTo() { this.record("quadraticCurveTo"); }
  fill() { this.record("fill"); }
  stroke() { this.record("stroke"); }
  createPattern() { return null; }
  measureText() { return { width: 0 }; }
}

const contexts = new WeakMap<HTMLCanvasElement, StubContext>();

(HTMLCanvasElement.prototype as unknown as { getContext: unknown }).getContext =
  function getContext(this: HTMLCanvasElement) {
    let ctx = contexts.get(this);
    if (!ctx) {
      ctx = new StubContext(this);
      contexts.set(this, ctx);
    }
    return ctx;
  };
