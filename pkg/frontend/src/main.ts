import { ApiClient } from "./api.js";
import { ConsoleController } from "./console.js";
import { render } from "./render.js";

function baseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8000";
}

function bootstrap(): void {
  const root = document.getElementById("view");
  const input = document.getElementById("incident-id") as HTMLInputElement | null;
  const load = document.getElementById("load");
  if (!root || !input || !load) throw new Error("console markup missing");

  const controller = new ConsoleController(new ApiClient(baseUrl()));
  controller.subscribe((view) => render(view, root, controller));
  load.addEventListener("click", () => {
    if (input.value.trim()) void controller.loadIncident(input.value.trim());
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && input.value.trim()) {
      void controller.loadIncident(input.value.trim());
    }
  });
}

bootstrap();
