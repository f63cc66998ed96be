import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";
import { WizardController } from "./state.js";

// The session id lives in the URL hash only; refresh resumes the session
// from the server, which holds all state.

export function bootstrap(root: HTMLElement, baseUrl = ""): WizardController {
  const controller = new WizardController(new ApiClient(baseUrl));
  controller.onChange = () => {
    if (controller.sessionId) {
      window.location.hash = `s=${controller.sessionId}`;
    }
    renderApp(root, controller);
  };

  const match = window.location.hash.match(/s=([A-Za-z0-9_-]+)/);
  if (match) {
    void controller.resume(match[1]!);
  } else {
    renderApp(root, controller);
  }
  return controller;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap(document.getElementById("app")!);
}
