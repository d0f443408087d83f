// Entry point: small launcher form, then the app bound to a new session.

import { ServiceClient } from "./api.js";
import { App } from "./app.js";

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const base = param("base", window.location.origin);
  const client = new ServiceClient(base);

  const form = document.createElement("div");
  form.className = "launcher";
  form.innerHTML = `
    <label>technique
      <select id="technique">
        <option value="assistvr">assistvr (speech + ray)</option>
        <option value="discpim">discpim (ray + minimap)</option>
      </select>
    </label>
    <label>mode
      <select id="mode">
        <option value="adhoc">free play</option>
        <option value="plan">full plan</option>
      </select>
    </label>
    <label>level
      <select id="level">
        <option>low</option><option>medium</option><option>high</option>
      </select>
    </label>
    <label>targets
      <select id="targets"><option>1</option><option>2</option><option>4</option></select>
    </label>
    <label>seed <input id="seed" type="number" value="42"></label>
    <label>participant <input id="participant" value="P01"></label>
    <label>order <input id="order" type="number" value="0" min="0" max="23"></label>
    <button id="launch">Create session</button>
  `;
  root.appendChild(form);

  const launch = form.querySelector<HTMLButtonElement>("#launch")!;
  launch.addEventListener("click", async () => {
    const value = (id: string) =>
      form.querySelector<HTMLInputElement | HTMLSelectElement>(`#${id}`)!.value;
    const mode = value("mode") as "adhoc" | "plan";
    const info = await client.createSession({
      technique: value("technique"),
      mode,
      level: value("level"),
      num_targets: Number(value("targets")),
      seed: Number(value("seed")),
      participant: value("participant"),
      order_index: Number(value("order")),
    });
    form.remove();
    const app = new App(root, base, info.id, info.technique);
    await app.start();
  });
}

void boot();
