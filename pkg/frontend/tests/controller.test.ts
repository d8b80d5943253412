import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { ChatController, ChatElements } from "../src/controller";
import { AgentResponse } from "../src/types";

const AGENT_RESPONSE: AgentResponse = {
  text: "Try [device:1] VectorPen 6.",
  recommendations: [
    {
      id: 1,
      name: "VectorPen 6",
      rank_score: 1.5,
      n_pos: 1,
      n_all: 1,
      cosine: 0.5,
      links: ["https://devices.example.com/vectorpen-6"],
    },
  ],
  template_id: "device_recommendation",
};

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

interface Scripted {
  calls: Array<{ url: string; init?: RequestInit }>;
  queue: Array<Response | (() => Promise<Response>)>;
}

function makeController(script: Scripted["queue"]) {
  document.body.innerHTML = `
    <div id="turns"></div><p id="status" hidden></p><div id="samples"></div>
    <textarea id="prompt"></textarea><div id="detail"></div>`;
  const ui: ChatElements = {
    turns: document.getElementById("turns")!,
    input: document.getElementById("prompt") as HTMLTextAreaElement,
    samples: document.getElementById("samples")!,
    detail: document.getElementById("detail")!,
    status: document.getElementById("status")!,
  };
  const scripted: Scripted = { calls: [], queue: script };
  const fetchImpl = async (url: string, init?: RequestInit) => {
    scripted.calls.push({ url, init });
    const next = scripted.queue.shift();
    if (!next) throw new Error(`unexpected request ${url}`);
    return typeof next === "function" ? next() : next;
  };
  const controller = new ChatController(new ApiClient("", fetchImpl), ui);
  return { controller, scripted, ui };
}

// Fresh Response objects per test: a body is single-use.
const startup = (): Scripted["queue"] => [
  json(200, { session_id: "s1" }),
  json(200, { samples: ["a grounded 6 dof device", "a portable rehab glove"] }),
];

describe("ChatController", () => {
  let harness: ReturnType<typeof makeController>;

  beforeEach(async () => {
    harness = makeController(startup());
    await harness.controller.start();
  });

  it("renders sample queries and clicking one fills the input only", () => {
    const { scripted, ui } = harness;
    const buttons = [...ui.samples.querySelectorAll("button.sample")];
    expect(buttons.map((b) => b.textContent)).toEqual([
      "a grounded 6 dof device",
      "a portable rehab glove",
    ]);
    const before = scripted.calls.length;
    (buttons[1] as HTMLElement).click();
    expect(ui.input.value).toBe("a portable rehab glove");
    expect(scripted.calls.length).toBe(before); // populate, don't submit
  });

  it("issues no request for empty or whitespace input", async () => {
    const { controller, scripted } = harness;
    const before = scripted.calls.length;
    await controller.sendPrompt("");
    await controller.sendPrompt("   \n\t");
    expect(scripted.calls.length).toBe(before);
    expect(controller.turns).toHaveLength(0);
  });

  it("renders the user turn then the agent turn in order", async () => {
    const { controller, scripted, ui } = harness;
    scripted.queue.push(json(200, AGENT_RESPONSE));
    await controller.sendPrompt("a grounded stylus");
    const turns = [...ui.turns.children];
    expect(turns.map((t) => t.className)).toEqual(["turn user", "turn agent"]);
    expect(turns[0].textContent).toBe("a grounded stylus");
    expect(turns[1].querySelectorAll(".card")).toHaveLength(1);
    expect(ui.input.value).toBe(""); // box cleared on submit
    expect(controller.pending).toBe(false);
  });

  it("allows only one in-flight chat request", async () => {
    const { controller, scripted } = harness;
    let release!: (r: Response) => void;
    scripted.queue.push(() => new Promise<Response>((resolve) => (release = resolve)));

    const first = controller.sendPrompt("first ask");
    expect(controller.pending).toBe(true);
    const callsWhilePending = scripted.calls.length;
    await controller.sendPrompt("second ask while pending");
    expect(scripted.calls.length).toBe(callsWhilePending); // dropped, not queued

    release(json(200, AGENT_RESPONSE));
    await first;
    expect(controller.pending).toBe(false);
    expect(controller.turns.filter((t) => t.kind === "user")).toHaveLength(1);
  });

  it("renders provider outages as an error turn with a working retry", async () => {
    const { controller, scripted, ui } = harness;
    scripted.queue.push(
      json(503, {
        error: { code: "provider_unavailable", message: "upstream down", retryable: true },
      }),
      json(200, AGENT_RESPONSE),
    );
    await controller.sendPrompt("a grounded stylus");
    const errorTurn = ui.turns.querySelector(".turn.error")!;
    expect(errorTurn.textContent).toContain("upstream down");

    (errorTurn.querySelector(".retry") as HTMLElement).click();
    await new Promise((r) => setTimeout(r, 0)); // let the retry round-trip settle
    const sent = scripted.calls.filter((c) => c.url.endsWith("/chat"));
    expect(sent).toHaveLength(2);
    expect(JSON.parse(String(sent[1].init?.body))).toEqual({ prompt: "a grounded stylus" });
    expect(ui.turns.querySelector(".turn.agent")).not.toBeNull();
  });

  it("renders permanent errors without a retry button", async () => {
    const { controller, ui, scripted } = harness;
    scripted.queue.push(
      json(400, { error: { code: "bad_request", message: "prompt must be non-empty", retryable: false } }),
    );
    await controller.sendPrompt("x");
    const errorTurn = ui.turns.querySelector(".turn.error")!;
    expect(errorTurn.querySelector(".retry")).toBeNull();
  });

  it("fetches the device on every detail open and renders the panel", async () => {
    const { controller, scripted, ui } = harness;
    const record = {
      id: 1,
      name: "VectorPen 6",
      source_kind: "commercial",
      metadata: {
        title: "VectorPen 6 product page",
        authors: [],
        abstract_or_summary: "",
        publication_year: null,
        citation_count: null,
        citation_sources: [],
      },
      taxonomy: {},
      review_status: "approved",
      source_links: ["https://devices.example.com/vectorpen-6"],
      embedding: null,
    };
    scripted.queue.push(json(200, record), json(200, record));
    await controller.openDeviceDetail(1);
    expect(ui.detail.querySelector("h2")!.textContent).toBe("VectorPen 6");

    await controller.openDeviceDetail(1); // fetch-per-open, no cache
    const deviceCalls = scripted.calls.filter((c) => c.url === "/api/devices/1");
    expect(deviceCalls).toHaveLength(2);

    controller.closeDeviceDetail();
    expect(ui.detail.children).toHaveLength(0);
  });

  it("shows an inline notice when the device is gone", async () => {
    const { controller, scripted, ui } = harness;
    scripted.queue.push(
      json(404, { error: { code: "not_found", message: "no device 999999", retryable: false } }),
    );
    await controller.openDeviceDetail(999999);
    expect(ui.detail.textContent).toContain("999999");
    expect(ui.detail.querySelector(".missing")).not.toBeNull();
  });
});
