// Depth-sorted 2.5D scene view. Far sprites draw first so nearer objects
// cover them, matching the server's occlusion geometry.

import { Camera } from "./camera.js";
import { baseTone, fillStyleFor, traceShape } from "./glyphs.js";
import { SessionStore } from "./store.js";
import type { ScenePayload, SceneObjectPayload } from "./types.js";

export interface Sprite {
  id: string;
  x: number;
  y: number;
  radiusPx: number;
  depth: number;
}

export class SceneRenderer {
  readonly camera: Camera;
  private sprites: Sprite[] = [];

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private scene: ScenePayload | null = null,
  ) {
    this.camera = new Camera(canvas.width, canvas.height);
  }

  setScene(scene: ScenePayload): void {
    this.scene = scene;
  }

  /** Sprites from the latest draw, nearest last (paint order). */
  currentSprites(): Sprite[] {
    return this.sprites;
  }

  draw(store: SessionStore, nowMs: number = Date.now()): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || !this.scene) {
      return;
    }
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#101014";
    ctx.fillRect(0, 0, width, height);

    this.drawSearchRegion(ctx);

    const ordered: { object: SceneObjectPayload; projected: NonNullable<ReturnType<Camera["project"]>> }[] = [];
    for (const object of this.scene.objects) {
      const projected = this.camera.project(object.position, object.radius);
      if (projected) {
        ordered.push({ object, projected });
      }
    }
    ordered.sort((a, b) => b.projected.depth - a.projected.depth);

    this.sprites = [];
    for (const { object, projected } of ordered) {
      const r = Math.max(2.5, projected.radiusPx);
      traceShape(ctx, object.shape, projected.x, projected.y, r);
      ctx.fillStyle = fillStyleFor(ctx, object.color) as string;
      ctx.fill();
      ctx.lineWidth = 1;
      ctx.strokeStyle = "#26262c";
      ctx.stroke();
      if (store.isSelected(object.id)) {
        traceShape(ctx, object.shape, projected.x, projected.y, r + 2.5);
        ctx.lineWidth = 2.5;
        ctx.strokeStyle = "#30e060";
        ctx.stroke();
      } else if (store.isFlashing(object.id, nowMs)) {
        traceShape(ctx, object.shape, projected.x, projected.y, r + 2.5);
        ctx.lineWidth = 2.5;
        ctx.strokeStyle = "#e03030";
        ctx.stroke();
      }
      this.sprites.push({
        id: object.id,
        x: projected.x,
        y: projected.y,
        radiusPx: r,
        depth: projected.depth,
      });
    }
  }

  private drawSearchRegion(ctx: CanvasRenderingContext2D): void {
    if (!this.scene) {
      return;
    }
    const region = this.scene.search_region;
    const projected = this.camera.project(region.center, region.radius);
    if (!projected) {
      return;
    }
    ctx.beginPath();
    ctx.arc(projected.x, projected.y, projected.radiusPx, 0, Math.PI * 2);
    ctx.fillStyle = "rgba(232, 210, 60, 0.12)";
    ctx.fill();
    ctx.lineWidth = 1.5;
    ctx.strokeStyle = "rgba(232, 210, 60, 0.8)";
    ctx.stroke();
  }

  /** Nearest drawn sprite under a canvas point, honoring paint order. */
  spriteAt(x: number, y: number): Sprite | null {
    for (let i = this.sprites.length - 1; i >= 0; i--) {
      const sprite = this.sprites[i];
      const dx = x - sprite.x;
      const dy = y - sprite.y;
      if (dx * dx + dy * dy <= sprite.radiusPx * sprite.radiusPx) {
        return sprite;
      }
    }
    return null;
  }
}

/** Small flat glyph for panel rows and the home-object swatch. */
export function drawSwatch(
  canvas: HTMLCanvasElement,
  shape: string,
  color: string,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const r = Math.min(canvas.width, canvas.height) / 2 - 2;
  traceShape(ctx, shape, canvas.width / 2, canvas.height / 2, r);
  ctx.fillStyle = fillStyleFor(ctx, color) as string;
  ctx.fill();
  ctx.strokeStyle = baseTone(color);
  ctx.stroke();
}
