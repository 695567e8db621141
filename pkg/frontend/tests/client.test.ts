import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { BridgeClient, SocketLike } from "../src/client.js";
import { EventFrame, StateFrame } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  send(data: string) { this.sent.push(data); }
  close() { this.onclose?.(); }
}

function hooks() {
  const states: StateFrame[] = [];
  const events: EventFrame[] = [];
  const conn: boolean[] = [];
  return {
    states, events, conn,
    impl: {
      onState: (f: StateFrame) => states.push(f),
      onEvent: (f: EventFrame) => events.push(f),
      onProtocolError: () => {},
      onConnection: (up: boolean) => conn.push(up),
    },
  };
}

describe("BridgeClient", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("dispatches parsed frames and drops garbage", () => {
    const sockets: FakeSocket[] = [];
    const h = hooks();
    const client = new BridgeClient("ws://x", h.impl,
      () => { const s = new FakeSocket(); sockets.push(s); return s; });
    client.connect();
    const s = sockets[0];
    s.onopen?.();
    s.onmessage?.({ data: JSON.stringify({
      type: "state", t: 0, pose: [0, 0, 0], xi_dot: [0, 0], v_n: [0, 0],
      scan: [], obstacles: [], delta_c: 0, d_min: 1 }) });
    s.onmessage?.({ data: "garbage" });
    s.onmessage?.({ data: '{"type":"event","kind":"collision"}' });
    expect(h.states).toHaveLength(1);
    expect(h.events).toHaveLength(1);
    expect(h.conn).toEqual([true]);
    client.close();
  });

  it("reconnects with backoff after a drop", () => {
    const sockets: FakeSocket[] = [];
    const h = hooks();
    const client = new BridgeClient("ws://x", h.impl,
      () => { const s = new FakeSocket(); sockets.push(s); return s; });
    client.connect();
    sockets[0].onopen?.();
    sockets[0].onclose?.();          // server dropped us
    expect(h.conn).toEqual([true, false]);
    vi.advanceTimersByTime(600);
    expect(sockets).toHaveLength(2); // a fresh socket was opened
    client.close();
  });

  it("stops reconnecting after an explicit close", () => {
    const sockets: FakeSocket[] = [];
    const h = hooks();
    const client = new BridgeClient("ws://x", h.impl,
      () => { const s = new FakeSocket(); sockets.push(s); return s; });
    client.connect();
    client.close();
    vi.advanceTimersByTime(10_000);
    expect(sockets).toHaveLength(1);
  });
});
