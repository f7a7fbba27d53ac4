/** DOM rendering: the image with candidate rectangles, a position-keyed
 * legend with selection checkboxes and visibility toggles, the object
 * marker, progress, and the submit button. */

import { colorForPosition, taskColorSeed, toDisplayRect, zoomFor } from "./overlay.js";
import type { TaskSession } from "./session.js";
import type { ApiClient } from "./api.js";

export function render(root: HTMLElement, session: TaskSession, api: ApiClient): void {
  root.textContent = "";

  if (session.phase === "complete") {
    const done = el("div", "complete");
    done.append(
      el("h2", "", "All done!"),
      el("p", "", `You answered ${session.answered} of ${session.total} tasks. Thank you.`),
    );
    root.append(done);
    return;
  }
  if (session.phase === "failed") {
    root.append(el("p", "error", `Something went wrong: ${session.lastError ?? "unknown error"}`));
    return;
  }
  const task = session.task;
  if (!task) {
    root.append(el("p", "", "Loading…"));
    return;
  }

  root.append(
    el("p", "progress", `Task ${session.answered + 1} of ${session.total}`),
    el(
      "p",
      "prompt",
      `Select the box (or boxes) that best identify the ${task.object.category} ` +
        "marked with the cross. Pick several if you cannot decide on one.",
    ),
  );

  const stage = el("div", "stage");
  stage.style.position = "relative";
  const img = document.createElement("img");
  img.src = api.imageUrl(task.image.url);
  img.alt = task.object.category;
  img.draggable = false;
  // Native aspect ratio: width capped by the viewport, height follows.
  img.style.maxWidth = "min(900px, 95vw)";
  img.style.display = "block";
  stage.append(img);

  const overlay = el("div", "overlay");
  overlay.style.position = "absolute";
  overlay.style.inset = "0";
  stage.append(overlay);

  const seed = taskColorSeed(task.task_id);

  const drawOverlay = () => {
    overlay.textContent = "";
    const zoom = zoomFor(task.image.width, img.clientWidth);
    task.candidates.forEach((candidate, position) => {
      if (session.hidden.has(candidate.candidate_id)) return;
      const rect = toDisplayRect(candidate.box, zoom);
      const boxEl = el("div", "candidate-box");
      boxEl.style.position = "absolute";
      boxEl.style.left = `${rect.left}px`;
      boxEl.style.top = `${rect.top}px`;
      boxEl.style.width = `${rect.width}px`;
      boxEl.style.height = `${rect.height}px`;
      boxEl.style.border = `2px solid ${colorForPosition(position, seed)}`;
      boxEl.style.boxSizing = "border-box";
      boxEl.style.cursor = "pointer";
      boxEl.title = `Box ${String.fromCharCode(65 + position)}`;
      boxEl.onclick = () => session.toggleSelection(candidate.candidate_id);
      if (session.selected.has(candidate.candidate_id)) {
        boxEl.style.background = `${colorForPosition(position, seed)}22`;
      }
      overlay.append(boxEl);
    });
    const zoomNow = zoomFor(task.image.width, img.clientWidth);
    const marker = el("div", "marker", "✕");
    marker.style.position = "absolute";
    marker.style.left = `${task.object.marker[0] * zoomNow - 7}px`;
    marker.style.top = `${task.object.marker[1] * zoomNow - 11}px`;
    marker.style.color = "#ff1744";
    marker.style.fontWeight = "bold";
    marker.style.pointerEvents = "none";
    overlay.append(marker);
  };

  img.onload = drawOverlay;
  img.onerror = () => {
    overlay.textContent = "";
    const retry = el("button", "", "Image failed to load — retry");
    retry.onclick = () => {
      img.src = `${api.imageUrl(task.image.url)}?retry=${Date.now()}`;
    };
    overlay.append(retry);
  };
  window.addEventListener("resize", drawOverlay);
  root.append(stage);

  const legend = el("div", "legend");
  task.candidates.forEach((candidate, position) => {
    const row = el("label", "legend-row");
    row.style.display = "flex";
    row.style.alignItems = "center";
    row.style.gap = "6px";

    const check = document.createElement("input");
    check.type = "checkbox";
    check.checked = session.selected.has(candidate.candidate_id);
    check.onchange = () => session.toggleSelection(candidate.candidate_id);

    const swatch = el("span", "swatch");
    swatch.style.background = colorForPosition(position, seed);
    swatch.style.width = "14px";
    swatch.style.height = "14px";
    swatch.style.display = "inline-block";

    const eye = el("button", "eye", session.hidden.has(candidate.candidate_id) ? "show" : "hide");
    eye.onclick = (event) => {
      event.preventDefault();
      session.toggleVisibility(candidate.candidate_id);
    };

    row.append(check, swatch, el("span", "", `Box ${String.fromCharCode(65 + position)}`), eye);
    legend.append(row);
  });
  root.append(legend);

  const submit = document.createElement("button");
  submit.textContent = session.phase === "submitting" ? "Submitting…" : "Submit";
  submit.disabled = !session.canSubmit();
  submit.onclick = () => void session.submit();
  root.append(submit);

  if (session.lastError) {
    root.append(el("p", "error", session.lastError));
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}
