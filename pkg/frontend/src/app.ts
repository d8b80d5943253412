import { ApiClient } from "./api";
import { ChatController } from "./controller";

function mustGet<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id} in index.html`);
  return node as T;
}

export async function boot(base = ""): Promise<ChatController> {
  const controller = new ChatController(new ApiClient(base), {
    turns: mustGet("turns"),
    input: mustGet<HTMLTextAreaElement>("prompt"),
    samples: mustGet("samples"),
    detail: mustGet("detail"),
    status: mustGet("status"),
  });

  const form = mustGet<HTMLFormElement>("composer");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = mustGet<HTMLTextAreaElement>("prompt");
    void controller.sendPrompt(input.value);
  });
  mustGet("detail-close").addEventListener("click", () => controller.closeDeviceDetail());

  await controller.start();
  return controller;
}

if (typeof document !== "undefined" && document.getElementById("composer")) {
  void boot();
}
