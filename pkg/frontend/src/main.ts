/** Browser bootstrap: ?c=<conversation id> selects the conversation and
 * optional ?api=<base url> points at a non-same-origin service. */

import { HttpApiClient } from "./api.js";
import { App } from "./app.js";

const POLL_INTERVAL_MS = 1000;

function required(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing #${id}`);
  return element;
}

const params = new URLSearchParams(window.location.search);
const conversationId = params.get("c");

if (!conversationId) {
  document.body.innerHTML =
    '<p class="empty-state">Pass ?c=&lt;conversation id&gt; ' +
    "(ingest one with the CLI, then analyze it).</p>";
} else {
  const api = new HttpApiClient(params.get("api") ?? "");
  const app = new App(api, conversationId, {
    global: required("global-view"),
    wordcloud: required("wordcloud-view"),
    topic: required("topic-view"),
    ask: required("ask-view"),
  });
  app
    .start()
    .then(() => {
      setInterval(() => {
        void app.tick().catch(() => undefined);
      }, POLL_INTERVAL_MS);
    })
    .catch((error) => {
      document.body.innerHTML = `<p class="empty-state">Failed to load: ${error}</p>`;
    });
}
