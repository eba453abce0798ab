/** Browser bootstrap: DOM glue around ReviewApp (keyboard-first entry). */

import { AnnotationApi } from "./api.js";
import { ReviewApp } from "./app.js";
import { renderBanner, renderDashboard, renderTask } from "./views.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

async function refresh(app: ReviewApp): Promise<void> {
  const taskBox = el<HTMLDivElement>("task");
  const banner = el<HTMLDivElement>("banner");
  banner.innerHTML = app.notice ? renderBanner(app.notice.kind, app.notice.message) : "";
  if (app.task) {
    taskBox.innerHTML = renderTask(app.task, app.catalog, app.annotator);
  } else {
    taskBox.innerHTML = '<p class="done">No tasks pending for you.</p>';
  }
  try {
    const { parsed } = await app.dashboard();
    el<HTMLDivElement>("dashboard").innerHTML = renderDashboard(parsed, app.catalog);
    el<HTMLDivElement>("stale").textContent = "";
  } catch {
    el<HTMLDivElement>("stale").textContent = "stats unavailable (API down?)";
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const annotator =
    params.get("annotator") || window.prompt("Annotator id?") || "ann1";
  const app = new ReviewApp(new AnnotationApi(""), annotator);
  await app.init();
  await refresh(app);

  const input = el<HTMLInputElement>("label-input");
  input.focus();

  document.addEventListener("keydown", async (ev) => {
    if (ev.target === input) {
      if (ev.key === "Enter" && input.value.trim()) {
        await app.submitText(input.value);
        input.value = "";
        await refresh(app);
      }
      return;
    }
    if (ev.key === "a") {
      await app.agree();
      await refresh(app);
    } else if (ev.key === "u") {
      await app.unmappable();
      await refresh(app);
    } else if (ev.key === "n") {
      await app.loadNext();
      await refresh(app);
    } else if (/^[0-9]$/.test(ev.key)) {
      input.focus();
    }
  });

  el<HTMLButtonElement>("agree-btn").addEventListener("click", async () => {
    await app.agree();
    await refresh(app);
  });
  el<HTMLButtonElement>("unmappable-btn").addEventListener("click", async () => {
    await app.unmappable();
    await refresh(app);
  });
  el<HTMLFormElement>("label-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    if (input.value.trim()) {
      await app.submitText(input.value);
      input.value = "";
      await refresh(app);
    }
  });

  window.setInterval(() => void refresh(app), 15000);
}

void boot();
