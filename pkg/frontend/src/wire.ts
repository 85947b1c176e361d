// Wire protocol for the /ws telemetry socket.  The server validates its
// side with pydantic; the hand checks here must sort every message the
// same way, and tests/fixtures/wire_messages.json (shared with the Python
// test suite) pins that agreement from both ends.

export interface UsvWire {
  x: number;
  y: number;
  z: number;
  eta: number;
  speed: number;
  eta_dot: number;
}

export interface UavWire {
  x: number;
  y: number;
  z: number;
  psi: number;
}

export interface MetricsWire {
  horiz_offset: number;
  rel_height: number;
  visible: boolean;
  committed: boolean;
  attempts: number;
  outcome: string | null;
  solve_ms: number;
}

export interface StateMsg {
  type: 'state';
  t: number;
  usv: UsvWire;
  uav: UavWire;
  horizon: number[][];
  phase: string;
  metrics: MetricsWire;
}

export interface ErrorMsg {
  type: 'error';
  message: string;
}

export type ServerMessage = StateMsg | ErrorMsg;

export interface SteerMsg {
  type: 'steer';
  surge_speed: number;
  yaw_rate: number;
}

export interface TriggerMsg {
  type: 'trigger_landing';
}

export interface ResetMsg {
  type: 'reset';
  seed?: number;
}

export type ClientMessage = SteerMsg | TriggerMsg | ResetMsg;

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === 'object' && v !== null && !Array.isArray(v);
}

function num(v: unknown): v is number {
  return typeof v === 'number' && Number.isFinite(v);
}

function isUsv(v: unknown): v is UsvWire {
  return (
    isRecord(v) &&
    num(v.x) &&
    num(v.y) &&
    num(v.z) &&
    num(v.eta) &&
    num(v.speed) &&
    num(v.eta_dot)
  );
}

function isUav(v: unknown): v is UavWire {
  return isRecord(v) && num(v.x) && num(v.y) && num(v.z) && num(v.psi);
}

function isMetrics(v: unknown): v is MetricsWire {
  return (
    isRecord(v) &&
    num(v.horiz_offset) &&
    num(v.rel_height) &&
    typeof v.visible === 'boolean' &&
    typeof v.committed === 'boolean' &&
    typeof v.attempts === 'number' &&
    Number.isInteger(v.attempts) &&
    (v.outcome === null || typeof v.outcome === 'string') &&
    num(v.solve_ms)
  );
}

// horizon arrives as a list of [x, y] pairs; an empty list is fine
function isHorizon(v: unknown): v is number[][] {
  return (
    Array.isArray(v) &&
    v.every((p) => Array.isArray(p) && p.length >= 2 && p.every(num))
  );
}

// parse one frame off the socket; null means drop it
export function parseServerMessage(raw: string): ServerMessage | null {
  let json: unknown;
  try {
    json = JSON.parse(raw);
  } catch {
    return null;
  }
  if (!isRecord(json)) return null;
  if (json.type === 'state') {
    if (
      num(json.t) &&
      isUsv(json.usv) &&
      isUav(json.uav) &&
      isHorizon(json.horizon) &&
      typeof json.phase === 'string' &&
      isMetrics(json.metrics)
    ) {
      return json as unknown as StateMsg;
    }
    return null;
  }
  if (json.type === 'error') {
    if (typeof json.message === 'string') {
      return { type: 'error', message: json.message };
    }
    return null;
  }
  return null;
}

// the same gate the server applies to inbound traffic
export function isClientMessage(v: unknown): v is ClientMessage {
  if (!isRecord(v)) return false;
  switch (v.type) {
    case 'steer':
      return num(v.surge_speed) && num(v.yaw_rate);
    case 'trigger_landing':
      return true;
    case 'reset':
      // seed is optional and defaults server side
      return v.seed === undefined || (typeof v.seed === 'number' && Number.isInteger(v.seed));
    default:
      return false;
  }
}

export function serialize(msg: ClientMessage): string {
  return JSON.stringify(msg);
}
