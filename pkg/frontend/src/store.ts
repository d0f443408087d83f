// Client-side mirror of the session state, fed by StateDeltas in order.

import type { DeltaPayload, PanelEntryPayload, TrialPayload } from "./types.js";

export const FLASH_MS = 600;

export class SessionStore {
  selected = new Set<string>();
  panelText = "";
  panelEntries: PanelEntryPayload[] = [];
  trial: TrialPayload | null = null;
  notice = "";
  lastSeq = 0;
  toneRequested = false;
  private flashes = new Map<string, number>();
  private listeners: (() => void)[] = [];

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  apply(delta: DeltaPayload, nowMs: number = Date.now()): void {
    if (delta.kind === "snapshot") {
      this.selected = new Set(
        delta.changed.filter((c) => c.selected).map((c) => c.id),
      );
      this.flashes.clear();
    } else {
      for (const change of delta.changed) {
        if (change.selected) {
          this.selected.add(change.id);
          this.flashes.delete(change.id);
        } else {
          this.selected.delete(change.id);
          this.flashes.set(change.id, nowMs + FLASH_MS);
        }
      }
    }
    this.lastSeq = delta.seq;
    this.panelText = delta.panel.recognized_text;
    this.panelEntries = delta.panel.entries;
    this.trial = delta.trial;
    this.notice = delta.notice;
    this.toneRequested = delta.tone;
    for (const listener of this.listeners) {
      listener();
    }
  }

  isSelected(id: string): boolean {
    return this.selected.has(id);
  }

  isFlashing(id: string, nowMs: number = Date.now()): boolean {
    const until = this.flashes.get(id);
    if (until === undefined) {
      return false;
    }
    if (nowMs >= until) {
      this.flashes.delete(id);
      return false;
    }
    return true;
  }

  flashingIds(nowMs: number = Date.now()): string[] {
    return [...this.flashes.keys()].filter((id) => this.isFlashing(id, nowMs));
  }
}
