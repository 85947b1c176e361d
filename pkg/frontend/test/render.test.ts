import { describe, expect, it } from 'vitest';

import { render } from '../src/render.js';
import type { Ctx } from '../src/render.js';
import { ViewModel } from '../src/view.js';
import type { StateMsg } from '../src/wire.js';

// records enough of the 2d context protocol to make assertions about what
// got drawn without a real canvas
class FakeCtx implements Ctx {
  fillStyle: string | CanvasGradient | CanvasPattern = '';
  strokeStyle: string | CanvasGradient | CanvasPattern = '';
  lineWidth = 1;
  globalAlpha = 1;
  font = '';
  textAlign: CanvasTextAlign = 'left';
  textBaseline: CanvasTextBaseline = 'alphabetic';
  moveToCount = 0;
  lineToCount = 0;
  texts: string[] = [];
  save(): void {}
  restore(): void {}
  clearRect(): void {}
  fillRect(): void {}
  beginPath(): void {}
  moveTo(): void {
    this.moveToCount += 1;
  }
  lineTo(): void {
    this.lineToCount += 1;
  }
  arc(): void {}
  closePath(): void {}
  stroke(): void {}
  fill(): void {}
  fillText(text: string): void {
    this.texts.push(text);
  }
  setLineDash(): void {}
  translate(): void {}
  rotate(): void {}
}

function makeState(overrides: Partial<StateMsg> = {}): StateMsg {
  return {
    type: 'state',
    t: 12.35,
    usv: { x: 10, y: 5, z: 0, eta: 0.3, speed: 3, eta_dot: 0.1 },
    uav: { x: 9, y: 6, z: 3, psi: 0.25 },
    horizon: [],
    phase: 'FOLLOW',
    metrics: {
      horiz_offset: 1.41,
      rel_height: 3.0,
      visible: true,
      committed: false,
      attempts: 0,
      outcome: null,
      solve_ms: 4.2,
    },
    ...overrides,
  };
}

function vmWith(state: StateMsg): ViewModel {
  const vm = new ViewModel();
  vm.ingest(state, 1000);
  return vm;
}

describe('render', () => {
  it('shows a waiting notice before any telemetry arrives', () => {
    const ctx = new FakeCtx();
    render(ctx, new ViewModel(), 800, 600, 0);
    expect(ctx.texts.join(' ')).toContain('waiting for telemetry');
  });

  it('draws the planned path with one vertex per horizon point', () => {
    const horizon: number[][] = [];
    for (let i = 0; i < 20; i++) {
      horizon.push([10 + 0.3 * i, 5 + 0.1 * i]);
    }
    const bare = new FakeCtx();
    render(bare, vmWith(makeState()), 800, 600, 1100);
    const withPath = new FakeCtx();
    render(withPath, vmWith(makeState({ horizon })), 800, 600, 1100);
    // identical scenes apart from the horizon polyline
    expect(withPath.moveToCount - bare.moveToCount).toBe(1);
    expect(withPath.lineToCount - bare.lineToCount).toBe(horizon.length - 1);
  });

  it('labels the phase banner and celebrates touchdown', () => {
    const ctx = new FakeCtx();
    render(ctx, vmWith(makeState()), 800, 600, 1100);
    expect(ctx.texts).toContain('FOLLOW');

    const done = new FakeCtx();
    const state = makeState({ phase: 'TOUCHDOWN' });
    state.metrics.outcome = 'touchdown';
    state.metrics.attempts = 1;
    render(done, vmWith(state), 800, 600, 1100);
    expect(done.texts.some((t) => t.includes('TOUCHDOWN'))).toBe(true);
    expect(done.texts.some((t) => t.includes('touchdown'))).toBe(true);
  });

  it('overlays a signal lost notice once frames stop arriving', () => {
    const vm = vmWith(makeState());
    const fresh = new FakeCtx();
    render(fresh, vm, 800, 600, 1100);
    expect(fresh.texts.join(' ')).not.toContain('signal lost');

    const stale = new FakeCtx();
    render(stale, vm, 800, 600, 2700);
    expect(stale.texts.some((t) => t.includes('signal lost'))).toBe(true);
  });

  it('surfaces the last server error in the HUD', () => {
    const vm = vmWith(makeState());
    vm.ingest({ type: 'error', message: 'landing can only start while following' }, 1050);
    const ctx = new FakeCtx();
    render(ctx, vm, 800, 600, 1100);
    expect(ctx.texts.some((t) => t.includes('landing can only start'))).toBe(true);
  });

  it('prints the steering readout when provided', () => {
    const ctx = new FakeCtx();
    render(ctx, vmWith(makeState()), 800, 600, 1100, { surge: 3, yaw: 0.25 });
    expect(ctx.texts.some((t) => t.includes('surge 3.00'))).toBe(true);
  });
});
