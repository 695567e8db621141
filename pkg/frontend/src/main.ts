// Cockpit wiring: connect to the bridge (?server=ws://...), render state
// frames, map keyboard/pointer input to nominal commands.

import { BridgeClient } from "./client.js";
import { makeGauges } from "./gauges.js";
import { CommandSource } from "./input.js";
import { nominalMessage, StateFrame } from "./protocol.js";
import { Canvas2D, SceneRenderer } from "./renderer.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server")
    ?? `ws://${window.location.hostname}:8700/session`;

  const canvas = el<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d") as unknown as Canvas2D;
  const gaugeCanvas = el<HTMLCanvasElement>("gauges");
  const gctx = gaugeCanvas.getContext("2d") as unknown as Canvas2D;
  const banner = el<HTMLDivElement>("banner");
  const speedSlider = el<HTMLInputElement>("speed");

  const renderer = new SceneRenderer(ctx, canvas.width, canvas.height);
  const gauges = makeGauges();
  let latest: StateFrame | null = null;
  let fitted = false;
  let paused = false;

  const client = new BridgeClient(server, {
    onState(frame) {
      if (latest && frame.t < latest.t) return; // drop stale frames
      latest = frame;
      if (!fitted) {
        renderer.fitTo(frame);
        fitted = true;
      }
      gauges.deltaC.set(frame.delta_c);
      gauges.dMin.set(frame.d_min);
    },
    onEvent(ev) {
      if (ev.kind === "collision") {
        renderer.flashCollision(performance.now());
        paused = true;
        banner.textContent = "collision — paused (press P to resume)";
      } else if (ev.kind === "converged") {
        banner.textContent = "converged";
      } else {
        banner.textContent = "operator input stale: safe stop";
      }
    },
    onProtocolError(err) {
      banner.textContent = `protocol error: ${err.message}`;
    },
    onConnection(up) {
      banner.textContent = up ? "" : "disconnected — retrying…";
    },
  });

  const source = new CommandSource(
    (vx, vy) => client.send(nominalMessage(vx, vy)),
    parseFloat(speedSlider.value),
  );
  speedSlider.addEventListener("input", () => {
    source.maxSpeed = parseFloat(speedSlider.value);
  });
  window.addEventListener("keydown", (ev) => {
    if (ev.code === "KeyP") {
      paused = !paused;
      client.send(JSON.stringify({ type: "pause" }));
      return;
    }
    source.keyDown(ev.code);
  });
  window.addEventListener("keyup", (ev) => source.keyUp(ev.code));

  let dragging = false;
  canvas.addEventListener("pointerdown", () => { dragging = true; });
  window.addEventListener("pointerup", () => {
    if (dragging) {
      dragging = false;
      source.dragEnd();
    }
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (!dragging || !latest) return;
    const rect = canvas.getBoundingClientRect();
    const [wx, wy] = renderer.view.toWorld(
      ev.clientX - rect.left, ev.clientY - rect.top);
    source.dragTo(wx - latest.pose[0], wy - latest.pose[1]);
  });

  source.start();
  client.connect();

  function paint(now: number): void {
    if (latest && !paused) {
      renderer.render(latest, now);
      gctx.fillStyle = "#fff";
      gctx.clearRect(0, 0, gaugeCanvas.width, gaugeCanvas.height);
      gauges.deltaC.draw(gctx, 10, 8, gaugeCanvas.width - 20, 14);
      gauges.dMin.draw(gctx, 10, 34, gaugeCanvas.width - 20, 14);
    }
    requestAnimationFrame(paint);
  }
  requestAnimationFrame(paint);
}

boot();
