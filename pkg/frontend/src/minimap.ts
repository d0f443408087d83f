// Minimap widget for the baseline technique: freeze a cone aimed at the
// search region, render the disc, and forward clicks as map picks.

import { ServiceClient } from "./api.js";
import { SessionStore } from "./store.js";
import type { MinimapPayload, ScenePayload, Vec3 } from "./types.js";

const WIDGET_SIZE = 220;

export class MinimapWidget {
  readonly root: HTMLElement;
  private readonly canvas: HTMLCanvasElement;
  private layout: MinimapPayload | null = null;
  onPick: ((id: string | null) => void) | null = null;

  constructor(
    container: HTMLElement,
    private readonly client: ServiceClient,
    private readonly sessionId: string,
    private readonly store: SessionStore,
  ) {
    this.root = document.createElement("div");
    this.root.className = "minimap";

    const button = document.createElement("button");
    button.textContent = "Freeze minimap";
    button.className = "minimap-freeze";
    button.addEventListener("click", () => {
      void this.freezeAtSearchRegion();
    });
    this.root.appendChild(button);

    this.canvas = document.createElement("canvas");
    this.canvas.width = WIDGET_SIZE;
    this.canvas.height = WIDGET_SIZE;
    this.canvas.className = "minimap-disc";
    this.canvas.addEventListener("click", (event) => {
      void this.pickAt(event.clientX, event.clientY);
    });
    this.root.appendChild(this.canvas);
    container.appendChild(this.root);
    store.onChange(() => this.draw());
  }

  private scene: ScenePayload | null = null;

  setScene(scene: ScenePayload): void {
    this.scene = scene;
  }

  currentLayout(): MinimapPayload | null {
    return this.layout;
  }

  async freezeAtSearchRegion(halfAngle = 0.2): Promise<MinimapPayload> {
    if (!this.scene) {
      throw new Error("no scene loaded");
    }
    const origin: Vec3 = [0, 1.2, 0];
    const target = this.scene.search_region.center;
    const d: Vec3 = [target[0] - origin[0], target[1] - origin[1], target[2] - origin[2]];
    const norm = Math.hypot(d[0], d[1], d[2]);
    const direction: Vec3 = [d[0] / norm, d[1] / norm, d[2] / norm];
    this.layout = await this.client.aimMinimap(this.sessionId, origin, direction, halfAngle);
    this.draw();
    return this.layout;
  }

  /** Disc coordinates -> widget pixels. */
  toPixels(x: number, y: number): [number, number] {
    const discRadius = this.layout?.disc_radius || 1;
    const scale = (WIDGET_SIZE / 2 - 6) / discRadius;
    return [WIDGET_SIZE / 2 + x * scale, WIDGET_SIZE / 2 - y * scale];
  }

  fromPixels(px: number, py: number): [number, number] {
    const discRadius = this.layout?.disc_radius || 1;
    const scale = (WIDGET_SIZE / 2 - 6) / discRadius;
    return [(px - WIDGET_SIZE / 2) / scale, -(py - WIDGET_SIZE / 2) / scale];
  }

  private async pickAt(clientX: number, clientY: number): Promise<void> {
    if (!this.layout) {
      return;
    }
    const rect = this.canvas.getBoundingClientRect();
    const [x, y] = this.fromPixels(clientX - rect.left, clientY - rect.top);
    const delta = await this.client.submitMapPick(this.sessionId, [x, y]);
    this.onPick?.(delta.changed.length ? delta.changed[0].id : null);
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      return;
    }
    ctx.clearRect(0, 0, WIDGET_SIZE, WIDGET_SIZE);
    ctx.beginPath();
    ctx.arc(WIDGET_SIZE / 2, WIDGET_SIZE / 2, WIDGET_SIZE / 2 - 6, 0, Math.PI * 2);
    ctx.fillStyle = "#181820";
    ctx.fill();
    ctx.strokeStyle = "#545468";
    ctx.stroke();
    if (!this.layout) {
      return;
    }
    const iconPx = Math.max(
      2,
      ((WIDGET_SIZE / 2 - 6) / this.layout.disc_radius) * this.layout.icon_radius,
    );
    for (const icon of this.layout.icons) {
      const [px, py] = this.toPixels(icon.x, icon.y);
      ctx.beginPath();
      ctx.arc(px, py, iconPx, 0, Math.PI * 2);
      ctx.fillStyle = this.store.isSelected(icon.id)
        ? "#30e060"
        : icon.expanded
          ? "#e0a030"
          : "#c8c8d8";
      ctx.fill();
    }
  }
}
