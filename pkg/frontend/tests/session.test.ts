import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { TaskSession } from "../src/session.js";
import type { TaskPayload } from "../src/types.js";

function makeTask(id: string, answered: number, total: number): TaskPayload {
  return {
    task_id: id,
    image: { file_name: "a.png", url: "/images/a.png", width: 640, height: 480 },
    object: { category: "cat", marker: [100, 100] },
    candidates: [
      { candidate_id: `${id}c0`, box: [10, 10, 50, 40] },
      { candidate_id: `${id}c1`, box: [8, 8, 54, 44] },
      { candidate_id: `${id}c2`, box: [6, 6, 58, 48] },
      { candidate_id: `${id}c3`, box: [4, 4, 62, 52] },
    ],
    progress: { answered, total },
  };
}

type Behavior = {
  posts: { response: { status: number; json: any } }[];
  nextResponses: any[];
  failPostsTimes?: number;
};

function mockFetch(behavior: Behavior) {
  let nextIdx = 0;
  let postFailures = behavior.failPostsTimes ?? 0;
  return async (input: string, init?: RequestInit): Promise<Response> => {
    if (init?.method === "POST") {
      if (postFailures > 0) {
        postFailures--;
        throw new TypeError("fetch failed (simulated outage)");
      }
      const spec = behavior.posts.shift();
      if (!spec) throw new Error("unexpected POST");
      recordedPosts.push(JSON.parse(String(init.body)));
      return new Response(JSON.stringify(spec.response.json), {
        status: spec.response.status,
      });
    }
    const payload = behavior.nextResponses[nextIdx];
    if (nextIdx < behavior.nextResponses.length - 1) nextIdx++;
    return new Response(JSON.stringify(payload), { status: 200 });
  };
}

let recordedPosts: any[] = [];

function makeSession(behavior: Behavior) {
  recordedPosts = [];
  const api = new ApiClient("http://test", mockFetch(behavior));
  return new TaskSession(api, "demo", "p1", {
    retryDelayMs: 1,
    sleep: async () => {},
  });
}

describe("TaskSession", () => {
  it("loads the first task and exposes display order", async () => {
    const session = makeSession({
      posts: [],
      nextResponses: [makeTask("t0", 0, 3)],
    });
    await session.start();
    expect(session.phase).toBe("task");
    expect(session.displayOrder()).toEqual(["t0c0", "t0c1", "t0c2", "t0c3"]);
    expect(session.total).toBe(3);
  });

  it("blocks submit with an empty selection", async () => {
    const session = makeSession({ posts: [], nextResponses: [makeTask("t0", 0, 1)] });
    await session.start();
    expect(session.canSubmit()).toBe(false);
    await session.submit(); // no-op
    expect(session.phase).toBe("task");
    expect(recordedPosts).toHaveLength(0);
  });

  it("posts a single selection and advances", async () => {
    const session = makeSession({
      posts: [{ response: { status: 200, json: { status: "ok", answered: 1, total: 2 } } }],
      nextResponses: [makeTask("t0", 0, 2), makeTask("t1", 1, 2)],
    });
    await session.start();
    session.toggleSelection("t0c2");
    expect(session.canSubmit()).toBe(true);
    await session.submit();
    expect(recordedPosts[0].selected).toEqual(["t0c2"]);
    expect(recordedPosts[0].display_order).toEqual(["t0c0", "t0c1", "t0c2", "t0c3"]);
    expect(session.task?.task_id).toBe("t1");
  });

  it("posts multi-selections", async () => {
    const session = makeSession({
      posts: [{ response: { status: 200, json: { status: "ok", answered: 1, total: 1 } } }],
      nextResponses: [makeTask("t0", 0, 1), { complete: true, answered: 1, total: 1 }],
    });
    await session.start();
    session.toggleSelection("t0c0");
    session.toggleSelection("t0c3");
    await session.submit();
    expect(recordedPosts[0].selected).toEqual(["t0c0", "t0c3"]);
    expect(session.phase).toBe("complete");
  });

  it("treats a duplicate response as recorded and advances", async () => {
    const session = makeSession({
      posts: [{ response: { status: 409, json: { error: "duplicate_submission" } } }],
      nextResponses: [makeTask("t0", 0, 1), { complete: true, answered: 1, total: 1 }],
    });
    await session.start();
    session.toggleSelection("t0c1");
    await session.submit();
    expect(session.phase).toBe("complete");
  });

  it("retries through a network outage holding the record locally", async () => {
    const session = makeSession({
      posts: [{ response: { status: 200, json: { status: "ok", answered: 1, total: 1 } } }],
      nextResponses: [makeTask("t0", 0, 1), { complete: true, answered: 1, total: 1 }],
      failPostsTimes: 3,
    });
    await session.start();
    session.toggleSelection("t0c1");
    await session.submit();
    expect(recordedPosts).toHaveLength(1);
    expect(recordedPosts[0].selected).toEqual(["t0c1"]);
    expect(session.phase).toBe("complete");
  });

  it("surfaces invalid selections without advancing", async () => {
    const session = makeSession({
      posts: [{ response: { status: 400, json: { error: "invalid_selection", detail: "bad" } } }],
      nextResponses: [makeTask("t0", 0, 1)],
    });
    await session.start();
    session.toggleSelection("t0c1");
    await session.submit();
    expect(session.phase).toBe("task");
    expect(session.lastError).toBe("bad");
  });

  it("toggles candidate visibility independently of selection", async () => {
    const session = makeSession({ posts: [], nextResponses: [makeTask("t0", 0, 1)] });
    await session.start();
    session.toggleVisibility("t0c0");
    expect(session.hidden.has("t0c0")).toBe(true);
    expect(session.selected.has("t0c0")).toBe(false);
    session.toggleVisibility("t0c0");
    expect(session.hidden.has("t0c0")).toBe(false);
  });
});
