// Trial heads-up display: start button, live countdown, timer, attempts.

import { ServiceClient } from "./api.js";
import { SessionStore } from "./store.js";

export class TrialHud {
  readonly root: HTMLElement;
  private readonly status: HTMLElement;
  private readonly startButton: HTMLButtonElement;
  private readonly confirmButton: HTMLButtonElement;
  private readonly nextButton: HTMLButtonElement;
  private countdownTimer: ReturnType<typeof setInterval> | null = null;
  private countdownEndsAt = 0;

  constructor(
    container: HTMLElement,
    private readonly client: ServiceClient,
    private readonly sessionId: string,
    private readonly store: SessionStore,
  ) {
    this.root = document.createElement("div");
    this.root.className = "hud";

    this.status = document.createElement("div");
    this.status.className = "hud-status";
    this.root.appendChild(this.status);

    this.startButton = this.button("Start trial", () => this.client.trial(this.sessionId, "start"));
    this.confirmButton = this.button("Confirm", () => this.client.trial(this.sessionId, "confirm"));
    this.nextButton = this.button("Next", () => this.client.trial(this.sessionId, "next"));

    container.appendChild(this.root);
    store.onChange(() => this.refresh());
    this.refresh();
  }

  private button(label: string, action: () => Promise<unknown>): HTMLButtonElement {
    const element = document.createElement("button");
    element.textContent = label;
    element.addEventListener("click", () => {
      void action().catch(() => undefined); // errors surface via notices
    });
    this.root.appendChild(element);
    return element;
  }

  private refresh(): void {
    const trial = this.store.trial;
    if (!trial || trial.phase === "free_play") {
      this.status.textContent = "free play";
      this.startButton.style.display = "none";
      this.nextButton.style.display = "none";
      return;
    }
    if (this.store.toneRequested) {
      this.playTone();
    }
    this.startButton.style.display = trial.phase === "ready" ? "" : "none";
    this.nextButton.style.display = trial.phase === "completed" ? "" : "none";
    this.confirmButton.style.display = trial.phase === "active" ? "" : "none";
    if (trial.phase === "countdown") {
      this.countdownEndsAt = Date.now() + trial.countdown_remaining_ms;
      this.ensureTicking();
    } else {
      this.stopTicking();
    }
    this.renderStatus();
  }

  private renderStatus(): void {
    const trial = this.store.trial;
    if (!trial) {
      return;
    }
    const position = `trial ${trial.cursor + 1}/${trial.total}`;
    if (trial.phase === "countdown") {
      const left = Math.max(0, this.countdownEndsAt - Date.now());
      this.status.textContent = `${position}: starting in ${(left / 1000).toFixed(1)} s`;
    } else if (trial.phase === "active") {
      this.status.textContent = `${position}: go! attempts ${trial.attempts}`;
    } else if (trial.phase === "completed") {
      this.status.textContent = `${position}: done in ${(trial.elapsed_ms / 1000).toFixed(1)} s (${trial.attempts} attempts)`;
    } else if (trial.phase === "finished") {
      this.status.textContent = "plan finished";
    } else {
      this.status.textContent = `${position}: ${trial.phase}`;
    }
  }

  private ensureTicking(): void {
    if (this.countdownTimer === null) {
      this.countdownTimer = setInterval(() => {
        this.renderStatus();
        if (Date.now() >= this.countdownEndsAt) {
          this.stopTicking();
          this.status.textContent = "go!";
        }
      }, 100);
    }
  }

  private stopTicking(): void {
    if (this.countdownTimer !== null) {
      clearInterval(this.countdownTimer);
      this.countdownTimer = null;
    }
  }

  private playTone(): void {
    try {
      const AudioCtor =
        (window as unknown as { AudioContext?: typeof AudioContext }).AudioContext;
      if (!AudioCtor) {
        return;
      }
      const audio = new AudioCtor();
      const osc = audio.createOscillator();
      osc.frequency.value = 220;
      osc.connect(audio.destination);
      osc.start();
      osc.stop(audio.currentTime + 0.25);
    } catch {
      // Audio is a courtesy; tests and headless browsers skip it.
    }
  }
}
