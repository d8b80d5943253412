import { ApiClient } from "./api";
import {
  renderAgentTurn,
  renderDetailNotFound,
  renderDeviceDetail,
  renderErrorTurn,
  renderUserTurn,
} from "./render";
import { ApiError, Turn } from "./types";

export interface ChatElements {
  turns: HTMLElement; // conversation column, turns appended in order
  input: HTMLInputElement | HTMLTextAreaElement;
  samples: HTMLElement; // sample-query button strip
  detail: HTMLElement; // device detail panel container
  status: HTMLElement; // "thinking..." indicator
}

export class ChatController {
  readonly turns: Turn[] = [];
  pending = false;
  private sessionId: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly ui: ChatElements,
  ) {}

  async start(): Promise<void> {
    this.sessionId = await this.api.createSession();
    const samples = await this.api.getSamples();
    for (const sample of samples) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "sample";
      button.textContent = sample;
      // Sample click only populates the box; the user still submits.
      button.addEventListener("click", () => {
        this.ui.input.value = sample;
        this.ui.input.focus();
      });
      this.ui.samples.appendChild(button);
    }
  }

  // One in-flight request at a time; blank input never issues a request.
  async sendPrompt(text: string): Promise<void> {
    const prompt = text.trim();
    if (!prompt || this.pending || this.sessionId === null) return;

    this.pending = true;
    this.ui.status.hidden = false;
    this.pushTurn({ kind: "user", text: prompt }, renderUserTurn(prompt));
    this.ui.input.value = "";
    try {
      const response = await this.api.chat(this.sessionId, prompt);
      this.pushTurn(
        { kind: "agent", response },
        renderAgentTurn(response, (id) => void this.openDeviceDetail(id)),
      );
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      const retryable = err instanceof ApiError && err.retryable;
      this.pushTurn(
        { kind: "error", message, retryable, prompt },
        renderErrorTurn(message, retryable, () => void this.retryLast()),
      );
    } finally {
      this.pending = false;
      this.ui.status.hidden = true;
    }
  }

  async retryLast(): Promise<void> {
    const last = this.turns[this.turns.length - 1];
    if (!last || last.kind !== "error") return;
    await this.sendPrompt(last.prompt);
  }

  // Fetch-per-open: no caching, the panel always reflects the server.
  async openDeviceDetail(id: number): Promise<void> {
    let panel: HTMLElement;
    try {
      panel = renderDeviceDetail(await this.api.getDevice(id));
    } catch (err) {
      if (err instanceof ApiError && err.code === "not_found") {
        panel = renderDetailNotFound(id);
      } else {
        throw err;
      }
    }
    this.ui.detail.replaceChildren(panel);
  }

  closeDeviceDetail(): void {
    this.ui.detail.replaceChildren();
  }

  private pushTurn(turn: Turn, node: HTMLElement): void {
    this.turns.push(turn);
    this.ui.turns.appendChild(node);
    node.scrollIntoView?.({ block: "end" });
  }
}
