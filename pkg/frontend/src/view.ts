// Holds what the page knows about the sim: the latest state frame, short
// position trails for both craft, and freshness bookkeeping so the renderer
// can flag a dead link instead of drawing stale data forever.

import type { ServerMessage, StateMsg } from './wire.js';

export interface TrailPoint {
  x: number;
  y: number;
}

// frames arrive at 20 Hz; half a second of silence means trouble
export const STALE_AFTER_MS = 500;

export class ViewModel {
  latest: StateMsg | null = null;
  lastError = '';
  lastMsgAt = Number.NEGATIVE_INFINITY;
  readonly usvTrail: TrailPoint[] = [];
  readonly uavTrail: TrailPoint[] = [];
  readonly trailLimit: number;

  constructor(trailLimit = 2000) {
    this.trailLimit = trailLimit;
  }

  ingest(msg: ServerMessage, now: number): void {
    this.lastMsgAt = now;
    if (msg.type === 'error') {
      this.lastError = msg.message;
      return;
    }
    this.latest = msg;
    pushBounded(this.usvTrail, { x: msg.usv.x, y: msg.usv.y }, this.trailLimit);
    pushBounded(this.uavTrail, { x: msg.uav.x, y: msg.uav.y }, this.trailLimit);
  }

  // true once we have seen data and it has gone quiet
  isStale(now: number): boolean {
    return this.latest !== null && now - this.lastMsgAt > STALE_AFTER_MS;
  }
}

function pushBounded(trail: TrailPoint[], p: TrailPoint, limit: number): void {
  trail.push(p);
  if (trail.length > limit) {
    trail.splice(0, trail.length - limit);
  }
}
