// Keyboard steering for the USV.  Holding forward or back ramps a surge
// setpoint that sticks when released, like a throttle lever; left and
// right ramp the yaw-rate setpoint and it recentres on release.  Both are
// clamped to the vessel envelope before they ever reach the wire.

import type { SteerMsg } from './wire.js';

export const MAX_SURGE = 5.0;
export const MAX_YAW_RATE = 1.0;

const SURGE_RAMP = 2.5; // m/s of setpoint per second held
const YAW_RAMP = 2.0; // rad/s of setpoint per second held
const YAW_RECENTRE = 4.0; // rad/s per second once released

const FORWARD = ['KeyW', 'ArrowUp'];
const BACK = ['KeyS', 'ArrowDown'];
const LEFT = ['KeyA', 'ArrowLeft'];
const RIGHT = ['KeyD', 'ArrowRight'];
const HANDLED = new Set([...FORWARD, ...BACK, ...LEFT, ...RIGHT]);

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

function moveToward(v: number, target: number, step: number): number {
  if (Math.abs(target - v) <= step) return target;
  return v + Math.sign(target - v) * step;
}

export class SteerInput {
  surge = 0;
  yaw = 0;
  private readonly held = new Set<string>();

  // returns true when the key belongs to us, so the caller can preventDefault
  keyDown(code: string): boolean {
    if (!HANDLED.has(code)) return false;
    this.held.add(code);
    return true;
  }

  keyUp(code: string): boolean {
    if (!HANDLED.has(code)) return false;
    this.held.delete(code);
    return true;
  }

  private holding(codes: string[]): boolean {
    return codes.some((c) => this.held.has(c));
  }

  // advance the setpoints by dt seconds of held keys
  tick(dt: number): void {
    const fwd = this.holding(FORWARD);
    const back = this.holding(BACK);
    if (fwd && !back) this.surge += SURGE_RAMP * dt;
    else if (back && !fwd) this.surge -= SURGE_RAMP * dt;

    const left = this.holding(LEFT);
    const right = this.holding(RIGHT);
    if (left && !right) this.yaw += YAW_RAMP * dt;
    else if (right && !left) this.yaw -= YAW_RAMP * dt;
    else this.yaw = moveToward(this.yaw, 0, YAW_RECENTRE * dt);

    this.surge = clamp(this.surge, -MAX_SURGE, MAX_SURGE);
    this.yaw = clamp(this.yaw, -MAX_YAW_RATE, MAX_YAW_RATE);
  }

  // current setpoints, resent every control period as a keep-alive
  message(): SteerMsg {
    return { type: 'steer', surge_speed: this.surge, yaw_rate: this.yaw };
  }

  stop(): void {
    this.surge = 0;
    this.yaw = 0;
    this.held.clear();
  }
}
