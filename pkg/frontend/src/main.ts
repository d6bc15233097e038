import { createApp, storedBase } from "./app.js";

const params = new URLSearchParams(location.search);
const base = params.get("service") ?? storedBase();

const mount = document.getElementById("app");
if (mount) {
  createApp(mount, base).catch((err) => {
    mount.textContent = `cannot reach the review service at ${base}: ${err}`;
  });
}
