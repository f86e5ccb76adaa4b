import { App } from "./app.js";

new App(document).start().catch((err) => {
  document.getElementById("status")!.textContent = `failed to load: ${err}`;
  console.error(err);
});
