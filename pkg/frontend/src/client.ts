// Websocket client: parses frames, surfaces events, reconnects with backoff.
// The server is authoritative; this side holds no physics state.

import { ErrorFrame, EventFrame, StateFrame, parseServerFrame }
  from "./protocol.js";

export interface ClientHooks {
  onState(frame: StateFrame): void;
  onEvent(frame: EventFrame): void;
  onProtocolError(frame: ErrorFrame): void;
  onConnection(up: boolean): void;
}

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export class BridgeClient {
  private socket: SocketLike | null = null;
  private retryMs = 500;
  private closed = false;

  constructor(
    private url: string,
    private hooks: ClientHooks,
    private makeSocket: SocketFactory =
      (u) => new WebSocket(u) as unknown as SocketLike,
  ) {}

  connect(): void {
    this.closed = false;
    const sock = this.makeSocket(this.url);
    this.socket = sock;
    sock.onopen = () => {
      this.retryMs = 500;
      this.hooks.onConnection(true);
    };
    sock.onclose = () => {
      this.hooks.onConnection(false);
      this.socket = null;
      if (!this.closed) {
        setTimeout(() => this.connect(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 5000);
      }
    };
    sock.onmessage = (ev) => {
      const frame = parseServerFrame(ev.data);
      if (frame === null) return;
      if (frame.type === "state") this.hooks.onState(frame);
      else if (frame.type === "event") this.hooks.onEvent(frame);
      else this.hooks.onProtocolError(frame);
    };
  }

  send(text: string): void {
    if (this.socket) {
      try {
        this.socket.send(text);
      } catch {
        // socket raced shut; the reconnect path handles it
      }
    }
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
