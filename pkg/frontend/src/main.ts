/** Minimal browser mount. All logic lives in SessionController; this file
 * only wires DOM events to gestures and repaints from the view model.
 */

import { NetmineClient, ApiError } from "./api.js";
import { SessionController } from "./app.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

async function mount(): Promise<void> {
  const status = el<HTMLElement>("status");
  const openButton = el<HTMLButtonElement>("open");

  let controller: SessionController | null = null;

  const paint = () => {
    if (!controller) {
      return;
    }
    const vm = controller.render();
    el<HTMLElement>("graph").innerHTML = vm.svg;
    el<HTMLElement>("kview").textContent = `k=${vm.k} Q=${vm.modularity}`;
    el<HTMLButtonElement>("undo").disabled = !vm.canUndo || vm.busy;
    el<HTMLButtonElement>("redo").disabled = !vm.canRedo || vm.busy;
    const slider = el<HTMLInputElement>("coarsen");
    slider.max = String(vm.sliderMax);
    slider.value = String(vm.k);
    el<HTMLElement>("marks").textContent = vm.sliderMarks
      .map((m) => `k=${m.k}${m.significant ? "" : " (not significant)"}`)
      .join("  ");
    el<HTMLElement>("geodesic").innerHTML = vm.geodesicHtml ?? "";
    el<HTMLElement>("yearly").innerHTML = vm.yearlyHtml ?? "";
    el<HTMLElement>("overlaylabel").textContent = vm.overlayLabel ?? "";
    el<HTMLElement>("banner").textContent = vm.banner ?? "";
    const toasts = controller.drainToasts();
    if (toasts.length > 0) {
      status.textContent = toasts.join(" | ");
    }
  };

  const run = async (work: () => Promise<unknown>) => {
    try {
      await work();
    } catch (err) {
      if (err instanceof ApiError) {
        status.textContent = `${err.code}: ${err.message}`;
      } else {
        status.textContent = String(err);
      }
    }
    paint();
  };

  openButton.addEventListener("click", () =>
    run(async () => {
      const base = el<HTMLInputElement>("base").value;
      const manifest = el<HTMLInputElement>("manifest").value;
      const client = new NetmineClient(base);
      const registered = await client.registerDataset(manifest);
      controller = await SessionController.open(client, registered.dataset);
      status.textContent = `session open on ${registered.dataset}`;
    })
  );

  el<HTMLElement>("graph").addEventListener("click", (event) => {
    const target = event.target as Element | null;
    const id = target?.getAttribute?.("data-cluster");
    if (id !== null && id !== undefined && controller) {
      void run(() => controller!.refineCluster(Number(id)));
    }
  });

  el<HTMLInputElement>("coarsen").addEventListener("change", (event) => {
    const value = Number((event.target as HTMLInputElement).value);
    if (controller) {
      void run(() => controller!.coarsenTo(value));
    }
  });

  el<HTMLButtonElement>("undo").addEventListener("click", () => {
    if (controller) {
      void run(() => controller!.undo());
    }
  });
  el<HTMLButtonElement>("redo").addEventListener("click", () => {
    if (controller) {
      void run(() => controller!.redo());
    }
  });

  el<HTMLButtonElement>("applyoverlay").addEventListener("click", () => {
    const attribute = el<HTMLInputElement>("attribute").value;
    if (controller && attribute) {
      void run(() => controller!.setOverlay(attribute));
    }
  });

  el<HTMLButtonElement>("applygroups").addEventListener("click", () => {
    const raw = el<HTMLInputElement>("grouplabels").value;
    if (controller && raw) {
      const labels = JSON.parse(raw) as Record<string, string>;
      void run(() => controller!.applyGroups(labels));
    }
  });
}

if (typeof document !== "undefined") {
  void mount();
}
