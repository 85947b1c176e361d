// Page wiring: one websocket to the sim, a 20 Hz steer keep-alive, and a
// requestAnimationFrame render loop that is free-running so the page stays
// responsive even when the link drops.

import { parseServerMessage, serialize } from './wire.js';
import type { ClientMessage } from './wire.js';
import { ViewModel } from './view.js';
import { SteerInput } from './input.js';
import { render } from './render.js';
import type { Ctx } from './render.js';

const canvas = document.getElementById('view') as HTMLCanvasElement;
const ctx = canvas.getContext('2d') as unknown as Ctx;
const landBtn = document.getElementById('land') as HTMLButtonElement;
const resetBtn = document.getElementById('reset') as HTMLButtonElement;
const seedBox = document.getElementById('seed') as HTMLInputElement;
const linkEl = document.getElementById('link') as HTMLSpanElement;

const vm = new ViewModel();
const input = new SteerInput();
let ws: WebSocket | null = null;

function send(msg: ClientMessage): void {
  if (ws !== null && ws.readyState === WebSocket.OPEN) {
    ws.send(serialize(msg));
  }
}

function connect(): void {
  const sock = new WebSocket(`ws://${location.host}/ws`);
  sock.addEventListener('open', () => {
    linkEl.textContent = 'link up';
    linkEl.className = 'up';
  });
  sock.addEventListener('message', (ev) => {
    const msg = parseServerMessage(String(ev.data));
    if (msg === null) {
      console.warn('dropped unrecognized message');
      return;
    }
    vm.ingest(msg, performance.now());
  });
  sock.addEventListener('close', () => {
    linkEl.textContent = 'link down';
    linkEl.className = 'down';
    input.stop();
    ws = null;
    setTimeout(connect, 1000);
  });
  ws = sock;
}

window.addEventListener('keydown', (ev) => {
  if (ev.repeat) {
    if (input.keyDown(ev.code)) ev.preventDefault();
    return;
  }
  if (input.keyDown(ev.code)) ev.preventDefault();
});
window.addEventListener('keyup', (ev) => {
  if (input.keyUp(ev.code)) ev.preventDefault();
});
window.addEventListener('blur', () => input.stop());

landBtn.addEventListener('click', () => send({ type: 'trigger_landing' }));
resetBtn.addEventListener('click', () => {
  const seed = Number.parseInt(seedBox.value, 10);
  send({ type: 'reset', seed: Number.isInteger(seed) ? seed : 0 });
  vm.usvTrail.length = 0;
  vm.uavTrail.length = 0;
  vm.lastError = '';
});

// resend current setpoints at the broadcast rate; doubles as a keep-alive
let lastTick = performance.now();
setInterval(() => {
  const now = performance.now();
  input.tick((now - lastTick) / 1000);
  lastTick = now;
  send(input.message());
}, 50);

function frame(): void {
  const w = canvas.clientWidth;
  const h = canvas.clientHeight;
  if (canvas.width !== w || canvas.height !== h) {
    canvas.width = w;
    canvas.height = h;
  }
  render(ctx, vm, w, h, performance.now(), {
    surge: input.surge,
    yaw: input.yaw,
  });
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
