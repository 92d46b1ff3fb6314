/**
 * Browser entry point. Configuration is one backend base URL; a small
 * setup form creates the session, then the annotation loop takes over.
 * Keyboard-first: Enter tests an attempt, Ctrl+A accepts, Ctrl+S skips.
 */

import { ApiClient } from "./api.js";
import { render } from "./render.js";
import { SessionController } from "./state.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

function renderSetup(message = ""): void {
  root!.innerHTML = `
<main class="panel">
  <h2>Annotation session</h2>
  <label>Backend <input id="base" type="text" value="http://127.0.0.1:8008" /></label>
  <label>Dataset path <input id="dataset" type="text" value="demos/data/matches.jsonl" /></label>
  <label>Model adapter <input id="adapter" type="text" value="keyword:how many" /></label>
  <label>Level
    <select id="level"><option value="word">word</option><option value="sentence">sentence</option></select>
  </label>
  <label><input id="require-flip" type="checkbox" checked /> require a prediction flip to accept</label>
  <button id="start">Start session</button>
  <p class="notice">${message}</p>
</main>`;
  document.getElementById("start")!.addEventListener("click", () => void start());
}

async function start(): Promise<void> {
  const value = (id: string) => (document.getElementById(id) as HTMLInputElement).value;
  const base = value("base");
  const api = new ApiClient(base);
  try {
    const sessionId = await api.createSession({
      dataset: value("dataset"),
      adapter: value("adapter"),
      level: value("level") as "word" | "sentence",
      require_flip: (document.getElementById("require-flip") as HTMLInputElement).checked,
    });
    run(api, sessionId);
  } catch (error) {
    renderSetup(error instanceof Error ? error.message : String(error));
  }
}

function run(api: ApiClient, sessionId: string): void {
  const controller = new SessionController(api, sessionId);

  controller.subscribe((state) => {
    // state -> HTML; the draft input keeps focus across re-renders
    root!.innerHTML = render(state);
    const draft = root!.querySelector<HTMLInputElement>('[data-role="draft"]');
    if (draft) {
      draft.addEventListener("input", () => controller.setDraft(draft.value));
      draft.addEventListener("keydown", (event) => {
        if (event.key === "Enter") void controller.attempt();
      });
      draft.focus();
      draft.setSelectionRange(draft.value.length, draft.value.length);
    }
    root!.querySelector('[data-action="attempt"]')
      ?.addEventListener("click", () => void controller.attempt());
    root!.querySelector('[data-action="accept"]')
      ?.addEventListener("click", () => void controller.accept());
    root!.querySelector('[data-action="skip"]')
      ?.addEventListener("click", () => void controller.skip());
    root!.querySelector('[data-action="retry"]')
      ?.addEventListener("click", () => void controller.next());
  });

  document.addEventListener("keydown", (event) => {
    if (!event.ctrlKey) return;
    if (event.key.toLowerCase() === "a") {
      event.preventDefault();
      void controller.accept();
    } else if (event.key.toLowerCase() === "s") {
      event.preventDefault();
      void controller.skip();
    }
  });

  void controller.next();
}

renderSetup();
