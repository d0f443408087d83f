// Application wiring: one session, one viewport, panel, HUD, minimap.

import { DeltaStream, ServiceClient, ServiceError } from "./api.js";
import { VIEWPOINT } from "./camera.js";
import { TrialHud } from "./hud.js";
import { MinimapWidget } from "./minimap.js";
import { PanelWidget } from "./panel.js";
import { SceneRenderer, drawSwatch } from "./render.js";
import { captureUtterance, speechRecognitionAvailable } from "./speech.js";
import { SessionStore } from "./store.js";
import type { DeltaPayload, ScenePayload } from "./types.js";

const CANVAS_W = 960;
const CANVAS_H = 540;

export interface AppOptions {
  webSocket?: new (url: string) => WebSocket;
  subscribe?: boolean;
}

export class App {
  readonly store = new SessionStore();
  readonly client: ServiceClient;
  readonly canvas: HTMLCanvasElement;
  readonly renderer: SceneRenderer;
  readonly panel: PanelWidget;
  readonly hud: TrialHud;
  minimap: MinimapWidget | null = null;
  readonly noticeLine: HTMLElement;
  readonly input: HTMLInputElement;
  private stream: DeltaStream | null = null;
  scene: ScenePayload | null = null;
  gapCount = 0;

  constructor(
    readonly rootElement: HTMLElement,
    base: string,
    readonly sessionId: string,
    readonly technique: string,
    private readonly options: AppOptions = {},
  ) {
    this.client = new ServiceClient(base);

    const stage = document.createElement("div");
    stage.className = "stage";
    rootElement.appendChild(stage);

    this.canvas = document.createElement("canvas");
    this.canvas.width = CANVAS_W;
    this.canvas.height = CANVAS_H;
    this.canvas.className = "viewport";
    stage.appendChild(this.canvas);
    this.renderer = new SceneRenderer(this.canvas);
    this.canvas.addEventListener("click", (event) => {
      const rect = this.canvas.getBoundingClientRect();
      void this.clickAt(event.clientX - rect.left, event.clientY - rect.top);
    });

    this.panel = new PanelWidget(stage, this.store);
    this.hud = new TrialHud(stage, this.client, sessionId, this.store);

    this.noticeLine = document.createElement("div");
    this.noticeLine.className = "notice";
    rootElement.appendChild(this.noticeLine);

    const bar = document.createElement("div");
    bar.className = "command-bar";
    this.input = document.createElement("input");
    this.input.placeholder = "say: select all purple spheres";
    this.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") {
        void this.submitCommand(this.input.value);
      }
    });
    bar.appendChild(this.input);

    const send = document.createElement("button");
    send.textContent = "Send";
    send.addEventListener("click", () => void this.submitCommand(this.input.value));
    bar.appendChild(send);

    if (speechRecognitionAvailable()) {
      const mic = document.createElement("button");
      mic.textContent = "Speak";
      mic.addEventListener("click", () => {
        captureUtterance((transcript) => {
          this.input.value = transcript;
          void this.submitCommand(transcript);
        });
      });
      bar.appendChild(mic);
    }
    rootElement.appendChild(bar);

    if (technique === "discpim") {
      this.minimap = new MinimapWidget(stage, this.client, sessionId, this.store);
    }

    this.store.onChange(() => {
      if (this.store.notice) {
        this.noticeLine.textContent = this.store.notice;
      }
      this.redraw();
    });
  }

  async start(): Promise<void> {
    this.scene = await this.client.getScene(this.sessionId);
    this.renderer.setScene(this.scene);
    this.minimap?.setScene(this.scene);
    this.drawHomeSwatch();
    if (this.options.subscribe !== false) {
      this.stream = new DeltaStream(this.client.base, this.sessionId, {
        onDelta: (delta) => this.store.apply(delta),
        onGap: () => {
          this.gapCount += 1;
        },
        webSocket: this.options.webSocket,
      });
      this.stream.connect();
    }
    this.redraw();
  }

  stop(): void {
    this.stream?.close();
    this.stream = null;
  }

  private drawHomeSwatch(): void {
    if (!this.scene || !this.scene.target_pair.shape) {
      return;
    }
    const swatch = document.createElement("canvas");
    swatch.width = 42;
    swatch.height = 42;
    swatch.className = "home-swatch";
    swatch.title = `${this.scene.target_pair.color} ${this.scene.target_pair.shape}`;
    drawSwatch(swatch, this.scene.target_pair.shape, this.scene.target_pair.color);
    this.rootElement.appendChild(swatch);
  }

  async submitCommand(text: string): Promise<DeltaPayload | null> {
    if (!text.trim()) {
      return null;
    }
    try {
      const delta = await this.client.submitUtterance(this.sessionId, text);
      this.input.value = "";
      return delta;
    } catch (error) {
      if (error instanceof ServiceError) {
        this.noticeLine.textContent =
          error.code === "WrongTechnique"
            ? "speech commands are not available with this technique"
            : error.message;
        return null;
      }
      throw error;
    }
  }

  /** Unproject a viewport click into a world ray and submit it. */
  async clickAt(x: number, y: number): Promise<DeltaPayload | null> {
    const direction = this.renderer.camera.unproject(x, y);
    try {
      return await this.client.submitRay(this.sessionId, VIEWPOINT, direction);
    } catch (error) {
      if (error instanceof ServiceError) {
        this.noticeLine.textContent = error.message;
        return null;
      }
      throw error;
    }
  }

  redraw(): void {
    this.renderer.draw(this.store);
    this.minimap?.draw();
  }

  // Hooks for end-to-end tests: the model behind the pixels.
  get testHooks() {
    return {
      selectedSpriteIds: () =>
        this.renderer
          .currentSprites()
          .map((s) => s.id)
          .filter((id) => this.store.isSelected(id))
          .sort(),
      flashingSpriteIds: () => this.store.flashingIds().sort(),
      panelEntryIds: () => this.panel.listedIds(),
      spriteScreenPosition: (id: string) => {
        const sprite = this.renderer.currentSprites().find((s) => s.id === id);
        return sprite ? { x: sprite.x, y: sprite.y } : null;
      },
      minimapLayout: () => this.minimap?.currentLayout() ?? null,
      gapCount: () => this.gapCount,
    };
  }
}
