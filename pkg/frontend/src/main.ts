/**
 * Entry point: resolve the assessor id and API base, then start the app.
 *
 * The assessor id comes from the `?assessor=` query parameter or, failing
 * that, a small sign-in form (an id is the only credential the service
 * uses).  `?api=` points the client at a service on another origin during
 * development; by default the UI talks to the origin it was served from.
 */

import { HttpApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app")!;
const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "";
const assessor = params.get("assessor");

if (assessor) {
  const app = new App(root, new HttpApiClient(apiBase), assessor);
  void app.start();
} else {
  root.innerHTML = `
    <div class="signin">
      <h1>Relevance assessment</h1>
      <form id="signin-form">
        <label for="assessor-id">Assessor id</label>
        <input id="assessor-id" name="assessor" autocomplete="username" required>
        <button type="submit">Start judging</button>
      </form>
    </div>
  `;
  const form = document.getElementById("signin-form") as HTMLFormElement;
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    const id = (document.getElementById("assessor-id") as HTMLInputElement).value.trim();
    if (id) {
      params.set("assessor", id);
      window.location.search = params.toString();
    }
  });
}
