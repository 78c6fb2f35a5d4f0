/** DOM rendering for the console; no state of its own. */

import type { ConsoleController } from "./console.js";
import type { PlanView } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(score: number): string {
  return score.toFixed(2);
}

export function render(
  view: PlanView,
  root: HTMLElement,
  controller: ConsoleController,
): void {
  root.textContent = "";

  if (view.banner) {
    const banner = el("div", `banner banner-${view.banner.kind}`);
    banner.textContent = view.banner.message;
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => {
      const input = document.querySelector<HTMLInputElement>("#incident-id");
      if (input && input.value) void controller.loadIncident(input.value.trim());
    });
    banner.appendChild(retry);
    root.appendChild(banner);
  }
  if (view.loading) {
    root.appendChild(el("div", "loading", "Generating candidate plans..."));
    return;
  }
  if (!view.incident) return;

  const summary = el("section", "incident");
  summary.appendChild(el("h2", undefined, view.incident.id));
  summary.appendChild(el("p", "description", view.incident.description ?? ""));
  summary.appendChild(el("pre", "report", view.incident.report));
  root.appendChild(summary);

  // action table: one row per catalog action, one column per candidate,
  // plus the fused plan and the editable what-if plan
  const table = el("table", "actions");
  const head = el("tr");
  head.appendChild(el("th", undefined, "Action"));
  head.appendChild(el("th", undefined, "Weight"));
  for (const candidate of view.candidates) {
    head.appendChild(el("th", undefined, candidate.source));
  }
  head.appendChild(el("th", "fused", view.fused ? view.fused.source : "fused"));
  head.appendChild(el("th", "whatif", "what-if"));
  table.appendChild(head);

  view.actions.forEach((action, i) => {
    const row = el("tr");
    row.appendChild(el("td", undefined, action.name));
    row.appendChild(el("td", "weight", action.weight.toFixed(3)));
    for (const candidate of view.candidates) {
      row.appendChild(el("td", "bit", candidate.bits[i] ? "1" : "0"));
    }
    row.appendChild(
      el("td", "bit fused", view.fused && view.fused.bits[i] ? "1" : "0"),
    );
    const cell = el("td", "bit whatif");
    const button = el(
      "button",
      "toggle",
      view.whatIf && view.whatIf.bits[i] ? "1" : "0",
    );
    button.addEventListener("click", () => void controller.toggleAction(i));
    cell.appendChild(button);
    row.appendChild(cell);
    table.appendChild(row);
  });
  root.appendChild(table);

  const scores = el("section", "scores");
  if (view.fused) {
    scores.appendChild(
      el("p", "fused-score", `Fused plan score: ${fmt(view.fused.score)}`),
    );
  }
  if (view.whatIf) {
    scores.appendChild(
      el("p", "whatif-score", `What-if plan score: ${fmt(view.whatIf.score)}`),
    );
    const reset = el("button", "reset", "Reset what-if to empty plan");
    reset.addEventListener("click", () => void controller.resetWhatIf());
    scores.appendChild(reset);
  }
  root.appendChild(scores);

  const candidates = el("section", "candidates");
  candidates.appendChild(el("h3", undefined, "Candidate plans"));
  for (const candidate of view.candidates) {
    const card = el("div", "candidate");
    const label = el("label");
    const checkbox = el("input") as HTMLInputElement;
    checkbox.type = "checkbox";
    checkbox.checked = candidate.selected;
    checkbox.addEventListener("change", () =>
      controller.toggleSelection(candidate.source),
    );
    label.appendChild(checkbox);
    label.appendChild(
      document.createTextNode(
        ` ${candidate.source} [${candidate.bits.join(" ")}] score ${fmt(candidate.score)}`,
      ),
    );
    card.appendChild(label);
    const details = el("details");
    details.appendChild(el("summary", undefined, "reasoning"));
    // reasoning is shown verbatim; no client-side summarization
    details.appendChild(el("pre", "reasoning", candidate.reasoning));
    card.appendChild(details);
    candidates.appendChild(card);
  }
  const fuseButton = el("button", "fuse", "Fuse selected candidates");
  fuseButton.disabled = controller.selectedCount() === 0;
  fuseButton.addEventListener("click", () => void controller.requestFusion());
  candidates.appendChild(fuseButton);
  root.appendChild(candidates);
}
