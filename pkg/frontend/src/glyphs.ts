// One glyph per shape kind and one fill per color kind, distinguishable at
// sprite size. Pattern colors use hatch overlays; when the 2D context
// cannot build patterns (jsdom test stubs) the base tone is used alone.

const BASE_TONES: Record<string, string> = {
  green: "#3fa34d",
  purple: "#8e4cc4",
  blue: "#3672d6",
  red: "#c42826",
  white_pattern: "#e8e8e8",
  purple_pattern: "#b48ad8",
  blue_pattern: "#86a8e8",
  yellow_pattern: "#e0c84a",
};

const PATTERN_MARK: Record<string, string> = {
  white_pattern: "diag",
  purple_pattern: "dots",
  blue_pattern: "cross",
  yellow_pattern: "horiz",
};

export function baseTone(color: string): string {
  return BASE_TONES[color] ?? "#999999";
}

export function fillStyleFor(
  ctx: CanvasRenderingContext2D,
  color: string,
): string | CanvasPattern {
  const mark = PATTERN_MARK[color];
  if (!mark) {
    return baseTone(color);
  }
  try {
    const tile = document.createElement("canvas");
    tile.width = 8;
    tile.height = 8;
    const tctx = tile.getContext("2d");
    if (!tctx) {
      return baseTone(color);
    }
    tctx.fillStyle = baseTone(color);
    tctx.fillRect(0, 0, 8, 8);
    tctx.strokeStyle = "rgba(40,40,40,0.85)";
    tctx.fillStyle = "rgba(40,40,40,0.85)";
    tctx.lineWidth = 1;
    if (mark === "diag") {
      tctx.beginPath();
      tctx.moveTo(0, 8);
      tctx.lineTo(8, 0);
      tctx.stroke();
    } else if (mark === "dots") {
      tctx.fillRect(2, 2, 2, 2);
      tctx.fillRect(6, 6, 1, 1);
    } else if (mark === "cross") {
      tctx.beginPath();
      tctx.moveTo(0, 4);
      tctx.lineTo(8, 4);
      tctx.moveTo(4, 0);
      tctx.lineTo(4, 8);
      tctx.stroke();
    } else {
      tctx.beginPath();
      tctx.moveTo(0, 3);
      tctx.lineTo(8, 3);
      tctx.stroke();
    }
    const pattern = ctx.createPattern(tile, "repeat");
    return pattern ?? baseTone(color);
  } catch {
    return baseTone(color);
  }
}

/** Trace the shape outline centered on (cx, cy) with half-size r. */
export function traceShape(
  ctx: CanvasRenderingContext2D,
  shape: string,
  cx: number,
  cy: number,
  r: number,
): void {
  ctx.beginPath();
  switch (shape) {
    case "sphere":
      ctx.arc(cx, cy, r, 0, Math.PI * 2);
      break;
    case "cube":
      ctx.rect(cx - r, cy - r, 2 * r, 2 * r);
      break;
    case "cylinder":
      ctx.rect(cx - 0.7 * r, cy - r, 1.4 * r, 2 * r);
      ctx.moveTo(cx + 0.7 * r, cy - r);
      ctx.ellipse(cx, cy - r, 0.7 * r, 0.3 * r, 0, 0, Math.PI * 2);
      break;
    case "pyramid":
      ctx.moveTo(cx, cy - r);
      ctx.lineTo(cx + r, cy + r);
      ctx.lineTo(cx - r, cy + r);
      ctx.closePath();
      break;
    case "pyramid_cuboid":
      ctx.moveTo(cx - 0.5 * r, cy - r);
      ctx.lineTo(cx + 0.5 * r, cy - r);
      ctx.lineTo(cx + r, cy + r);
      ctx.lineTo(cx - r, cy + r);
      ctx.closePath();
      break;
    case "barrel":
      ctx.moveTo(cx - 0.6 * r, cy - r);
      ctx.lineTo(cx + 0.6 * r, cy - r);
      ctx.quadraticCurveTo(cx + 1.1 * r, cy, cx + 0.6 * r, cy + r);
      ctx.lineTo(cx - 0.6 * r, cy + r);
      ctx.quadraticCurveTo(cx - 1.1 * r, cy, cx - 0.6 * r, cy - r);
      ctx.closePath();
      break;
    case "truncated_cylinder":
      ctx.moveTo(cx - 0.7 * r, cy + r);
      ctx.lineTo(cx - 0.7 * r, cy - 0.2 * r);
      ctx.lineTo(cx + 0.7 * r, cy - r);
      ctx.lineTo(cx + 0.7 * r, cy + r);
      ctx.closePath();
      break;
    case "cross":
      ctx.moveTo(cx - 0.33 * r, cy - r);
      ctx.lineTo(cx + 0.33 * r, cy - r);
      ctx.lineTo(cx + 0.33 * r, cy - 0.33 * r);
      ctx.lineTo(cx + r, cy - 0.33 * r);
      ctx.lineTo(cx + r, cy + 0.33 * r);
      ctx.lineTo(cx + 0.33 * r, cy + 0.33 * r);
      ctx.lineTo(cx + 0.33 * r, cy + r);
      ctx.lineTo(cx - 0.33 * r, cy + r);
      ctx.lineTo(cx - 0.33 * r, cy + 0.33 * r);
      ctx.lineTo(cx - r, cy + 0.33 * r);
      ctx.lineTo(cx - r, cy - 0.33 * r);
      ctx.lineTo(cx - 0.33 * r, cy - 0.33 * r);
      ctx.closePath();
      break;
    default:
      ctx.arc(cx, cy, r, 0, Math.PI * 2);
  }
}
