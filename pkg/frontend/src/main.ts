/** Entry point: wires the session to the page.
 *
 * Query parameters: ?study=<id>&participant=<token>&api=<base-url>.
 * The participant token is the only identity used; refreshing mid-task
 * resumes at the same unanswered task because the service hands out the
 * first task the participant has not answered.
 */

import { ApiClient } from "./api.js";
import { render } from "./render.js";
import { TaskSession } from "./session.js";

const params = new URLSearchParams(window.location.search);
const studyId = params.get("study") ?? "demo";
const participantId = params.get("participant") ?? `anon-${Date.now()}`;
const apiBase = params.get("api") ?? "";

const api = new ApiClient(apiBase);
const session = new TaskSession(api, studyId, participantId);

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}
session.onChange = () => render(root, session, api);
void session.start();
