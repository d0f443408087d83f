// Draggable feedback panel: recognized text plus the selected-object list.

import { drawSwatch } from "./render.js";
import { SessionStore } from "./store.js";

export class PanelWidget {
  readonly root: HTMLElement;
  private readonly textLine: HTMLElement;
  private readonly list: HTMLElement;
  private dragOffset: [number, number] | null = null;

  constructor(container: HTMLElement, private readonly store: SessionStore) {
    this.root = document.createElement("div");
    this.root.className = "panel";
    this.root.style.position = "absolute";
    this.root.style.left = "16px";
    this.root.style.top = "16px";

    const handle = document.createElement("div");
    handle.className = "panel-handle";
    handle.textContent = "Selection";
    this.root.appendChild(handle);

    this.textLine = document.createElement("div");
    this.textLine.className = "panel-text";
    this.root.appendChild(this.textLine);

    this.list = document.createElement("ul");
    this.list.className = "panel-list";
    this.root.appendChild(this.list);

    handle.addEventListener("mousedown", (event) => {
      this.dragOffset = [
        event.clientX - this.root.offsetLeft,
        event.clientY - this.root.offsetTop,
      ];
    });
    window.addEventListener("mousemove", (event) => {
      if (this.dragOffset) {
        this.root.style.left = `${event.clientX - this.dragOffset[0]}px`;
        this.root.style.top = `${event.clientY - this.dragOffset[1]}px`;
      }
    });
    window.addEventListener("mouseup", () => {
      this.dragOffset = null;
    });

    container.appendChild(this.root);
    store.onChange(() => this.refresh());
    this.refresh();
  }

  refresh(): void {
    this.textLine.textContent = this.store.panelText || " ";
    this.list.textContent = "";
    for (const entry of this.store.panelEntries) {
      const item = document.createElement("li");
      item.dataset.objectId = entry.id;
      const swatch = document.createElement("canvas");
      swatch.width = 18;
      swatch.height = 18;
      drawSwatch(swatch, entry.shape, entry.color);
      item.appendChild(swatch);
      const label = document.createElement("span");
      label.textContent = ` ${entry.color.replace("_", " ")} ${entry.shape.replace("_", " ")} (${entry.id})`;
      item.appendChild(label);
      this.list.appendChild(item);
    }
  }

  listedIds(): string[] {
    return [...this.list.querySelectorAll("li")].map(
      (item) => (item as HTMLElement).dataset.objectId ?? "",
    );
  }
}
