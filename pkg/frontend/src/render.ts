// Top-down canvas renderer: vessel and aircraft glyphs, their trails, the
// planned approach path, the one metre touchdown ring, plus a phase banner
// and HUD readouts.  Everything draws through the narrow Ctx interface so
// the tests can substitute a recording fake for a real 2d context.

import type { StateMsg } from './wire.js';
import type { ViewModel } from './view.js';

export interface Ctx {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  textAlign: CanvasTextAlign;
  textBaseline: CanvasTextBaseline;
  save(): void;
  restore(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
  translate(x: number, y: number): void;
  rotate(angle: number): void;
}

export interface SteerReadout {
  surge: number;
  yaw: number;
}

const PAD_RADIUS_M = 1.0;
const GRID_STEP_M = 5.0;

const PHASE_COLORS: Record<string, string> = {
  FOLLOW: '#3a7bd5',
  LAND: '#d9881e',
  TOUCHDOWN: '#1f9d55',
  ABORT_CLIMB: '#c0392b',
  SEARCH: '#8e44ad',
};

function polyline(ctx: Ctx, pts: Array<[number, number]>): void {
  if (pts.length < 2) return;
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (let i = 1; i < pts.length; i++) {
    ctx.lineTo(pts[i][0], pts[i][1]);
  }
  ctx.stroke();
}

function circle(ctx: Ctx, x: number, y: number, r: number): void {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, Math.PI * 2);
}

export function render(
  ctx: Ctx,
  vm: ViewModel,
  width: number,
  height: number,
  now: number,
  steer?: SteerReadout,
): void {
  ctx.setLineDash([]);
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = '#10151c';
  ctx.fillRect(0, 0, width, height);

  const state = vm.latest;
  if (state === null) {
    ctx.fillStyle = '#8fa3b8';
    ctx.font = '16px system-ui, sans-serif';
    ctx.textAlign = 'center';
    ctx.textBaseline = 'middle';
    ctx.fillText('waiting for telemetry', width / 2, height / 2);
    return;
  }

  // camera tracks the midpoint of the pair and zooms out if they separate
  const cx = (state.usv.x + state.uav.x) / 2;
  const cy = (state.usv.y + state.uav.y) / 2;
  const sep = Math.hypot(state.usv.x - state.uav.x, state.usv.y - state.uav.y);
  const scale = Math.min(14, (0.35 * Math.min(width, height)) / Math.max(10, sep));
  // world y points up, screen y points down
  const sx = (x: number): number => width / 2 + (x - cx) * scale;
  const sy = (y: number): number => height / 2 - (y - cy) * scale;

  drawGrid(ctx, width, height, cx, cy, scale, sx, sy);

  ctx.lineWidth = 1.5;
  ctx.strokeStyle = '#2c4a66';
  polyline(ctx, vm.usvTrail.map((p): [number, number] => [sx(p.x), sy(p.y)]));
  ctx.strokeStyle = '#5e4a77';
  polyline(ctx, vm.uavTrail.map((p): [number, number] => [sx(p.x), sy(p.y)]));

  // planned approach over the horizon, one vertex per published point
  if (state.horizon.length > 0) {
    ctx.strokeStyle = '#49c0a8';
    ctx.lineWidth = 1.5;
    ctx.setLineDash([6, 4]);
    polyline(ctx, state.horizon.map((p): [number, number] => [sx(p[0]), sy(p[1])]));
    ctx.setLineDash([]);
  }

  // touchdown ring around the deck centre
  ctx.strokeStyle = '#cfd8e3';
  ctx.lineWidth = 1;
  ctx.setLineDash([3, 3]);
  circle(ctx, sx(state.usv.x), sy(state.usv.y), PAD_RADIUS_M * scale);
  ctx.stroke();
  ctx.setLineDash([]);

  drawUsv(ctx, state, sx, sy, scale);
  drawUav(ctx, state, sx, sy, scale);

  drawBanner(ctx, state, width);
  drawHud(ctx, state, height, steer);

  if (vm.lastError !== '') {
    ctx.fillStyle = '#e0b341';
    ctx.font = '13px system-ui, sans-serif';
    ctx.textAlign = 'left';
    ctx.textBaseline = 'bottom';
    ctx.fillText(`server: ${vm.lastError}`, 12, height - 34);
  }

  if (vm.isStale(now)) {
    const quiet = (now - vm.lastMsgAt) / 1000;
    ctx.globalAlpha = 0.55;
    ctx.fillStyle = '#10151c';
    ctx.fillRect(0, 0, width, height);
    ctx.globalAlpha = 1;
    ctx.fillStyle = '#e26d5c';
    ctx.font = '18px system-ui, sans-serif';
    ctx.textAlign = 'center';
    ctx.textBaseline = 'middle';
    ctx.fillText(`signal lost ${quiet.toFixed(1)} s ago`, width / 2, height / 2);
  }
}

function drawGrid(
  ctx: Ctx,
  width: number,
  height: number,
  cx: number,
  cy: number,
  scale: number,
  sx: (x: number) => number,
  sy: (y: number) => number,
): void {
  ctx.strokeStyle = '#1b2430';
  ctx.lineWidth = 1;
  const halfW = width / 2 / scale;
  const halfH = height / 2 / scale;
  const x0 = Math.ceil((cx - halfW) / GRID_STEP_M) * GRID_STEP_M;
  for (let x = x0; x <= cx + halfW; x += GRID_STEP_M) {
    ctx.beginPath();
    ctx.moveTo(sx(x), 0);
    ctx.lineTo(sx(x), height);
    ctx.stroke();
  }
  const y0 = Math.ceil((cy - halfH) / GRID_STEP_M) * GRID_STEP_M;
  for (let y = y0; y <= cy + halfH; y += GRID_STEP_M) {
    ctx.beginPath();
    ctx.moveTo(0, sy(y));
    ctx.lineTo(width, sy(y));
    ctx.stroke();
  }
}

function drawUsv(
  ctx: Ctx,
  state: StateMsg,
  sx: (x: number) => number,
  sy: (y: number) => number,
  scale: number,
): void {
  const len = 1.6 * scale;
  ctx.save();
  ctx.translate(sx(state.usv.x), sy(state.usv.y));
  // heading is counterclockwise in world coordinates, screen y is flipped
  ctx.rotate(-state.usv.eta);
  ctx.fillStyle = '#7fb2e5';
  ctx.beginPath();
  ctx.moveTo(len, 0);
  ctx.lineTo(-0.6 * len, 0.5 * len);
  ctx.lineTo(-0.6 * len, -0.5 * len);
  ctx.closePath();
  ctx.fill();
  ctx.restore();
}

function drawUav(
  ctx: Ctx,
  state: StateMsg,
  sx: (x: number) => number,
  sy: (y: number) => number,
  scale: number,
): void {
  const x = sx(state.uav.x);
  const y = sy(state.uav.y);
  const r = 0.45 * scale;
  ctx.fillStyle = '#e8d26a';
  circle(ctx, x, y, r);
  ctx.fill();
  ctx.strokeStyle = '#e8d26a';
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(x, y);
  ctx.lineTo(x + 2.2 * r * Math.cos(state.uav.psi), y - 2.2 * r * Math.sin(state.uav.psi));
  ctx.stroke();
  ctx.fillStyle = '#bfc8d4';
  ctx.font = '12px system-ui, sans-serif';
  ctx.textAlign = 'left';
  ctx.textBaseline = 'middle';
  ctx.fillText(`z ${state.uav.z.toFixed(1)}`, x + 2.6 * r, y);
}

function drawBanner(ctx: Ctx, state: StateMsg, width: number): void {
  const color = PHASE_COLORS[state.phase] ?? '#5a6b7d';
  const label =
    state.phase === 'TOUCHDOWN' ? 'TOUCHDOWN  deck secured' : state.phase;
  ctx.fillStyle = color;
  ctx.fillRect(width / 2 - 110, 10, 220, 30);
  ctx.fillStyle = '#f3f6fa';
  ctx.font = 'bold 14px system-ui, sans-serif';
  ctx.textAlign = 'center';
  ctx.textBaseline = 'middle';
  ctx.fillText(label, width / 2, 25);
}

function drawHud(
  ctx: Ctx,
  state: StateMsg,
  height: number,
  steer?: SteerReadout,
): void {
  const m = state.metrics;
  const lines = [
    `t ${state.t.toFixed(2)} s`,
    `offset ${m.horiz_offset.toFixed(2)} m`,
    `height ${m.rel_height.toFixed(2)} m`,
    `visible ${m.visible ? 'yes' : 'no'}   committed ${m.committed ? 'yes' : 'no'}`,
    `attempts ${m.attempts}`,
    `solve ${m.solve_ms.toFixed(1)} ms`,
  ];
  if (m.outcome !== null) {
    lines.push(`last attempt: ${m.outcome}`);
  }
  ctx.fillStyle = '#bfc8d4';
  ctx.font = '13px ui-monospace, monospace';
  ctx.textAlign = 'left';
  ctx.textBaseline = 'top';
  for (let i = 0; i < lines.length; i++) {
    ctx.fillText(lines[i], 12, 12 + 18 * i);
  }
  if (steer !== undefined) {
    ctx.textBaseline = 'bottom';
    ctx.fillText(
      `cmd surge ${steer.surge.toFixed(2)} m/s   yaw ${steer.yaw.toFixed(2)} rad/s`,
      12,
      height - 12,
    );
  }
}
