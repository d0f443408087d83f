// Fixed pinhole camera at the user's viewpoint, looking down +z.
// project() and unproject() are exact inverses for points in front of the
// camera, so a click on a sprite becomes a world ray through its center.

import type { Vec3 } from "./types.js";

export const VIEWPOINT: Vec3 = [0, 1.6, 0];
const FOV_X_DEG = 100;
const NEAR_Z = 0.05;

export interface Projected {
  x: number;
  y: number;
  depth: number;
  radiusPx: number;
}

export class Camera {
  constructor(
    public width: number,
    public height: number,
  ) {}

  private focal(): number {
    return this.width / 2 / Math.tan(((FOV_X_DEG / 2) * Math.PI) / 180);
  }

  project(world: Vec3, radius = 0): Projected | null {
    const x = world[0] - VIEWPOINT[0];
    const y = world[1] - VIEWPOINT[1];
    const z = world[2] - VIEWPOINT[2];
    if (z < NEAR_Z) {
      return null;
    }
    const f = this.focal();
    return {
      x: this.width / 2 + (f * x) / z,
      y: this.height / 2 - (f * y) / z,
      depth: z,
      radiusPx: (f * radius) / z,
    };
  }

  unproject(screenX: number, screenY: number): Vec3 {
    const f = this.focal();
    const dx = (screenX - this.width / 2) / f;
    const dy = -(screenY - this.height / 2) / f;
    const norm = Math.sqrt(dx * dx + dy * dy + 1);
    return [dx / norm, dy / norm, 1 / norm];
  }
}
