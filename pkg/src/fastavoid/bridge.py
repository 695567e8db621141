"""Live shared-control bridge: one websocket session drives one simulated
robot while the runtime modulates every command.

The control loop steps the simulated clock at 100 Hz (scaled to wall time by
a configurable multiplier), consumes operator commands through the runtime
mailbox, and broadcasts decimated state frames. The raw operator command
never reaches the plant; only the modulated velocity does.
"""

from __future__ import annotations

import argparse
import asyncio
import copy
import json
import math
import sys

import numpy as np
from fastapi import WebSocket, WebSocketDisconnect

from . import __version__
from .errors import ScenarioError, StaleWriteError
from .runtime import Controller, StalenessLimits
from .scenario import Scenario, obstacle_to_dict
from .simulator import _min_clearance, synthesize_scan

CONTROL_DT = 0.01          # s of simulated time per control tick
FRAME_DECIMATION = 3       # send every 3rd tick: ~33 Hz at 100 Hz control
SCAN_PERIOD = 0.05         # s, 20 Hz scan channel
OBSTACLE_PERIOD = 0.5      # s, 2 Hz analytic channel
MAX_SCAN_POINTS = 512      # transport decimation


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ControlSession:
    """Transport-agnostic session logic: feed messages, step time, collect
    frames. The websocket layer is a thin pump around this."""

    def __init__(self, scenario: Scenario, nominal_timeout: float = 0.25):
        self.scenario = scenario
        self.config = scenario.agent
        limits = StalenessLimits(scan=0.25, obstacles=2.0,
                                 nominal=nominal_timeout)
        self.controller = Controller(self.config, limits)
        self.world = [copy.deepcopy(o) for o in scenario.world_obstacles()]
        self._tracked = [
            o for o, tr in zip(self.world, scenario.tracked) if tr]
        self.pose = scenario.start.astype(float).copy()
        self.t = 0.0
        self.tick_count = 0
        self.paused = False
        self.events = []
        self._last_scan = -math.inf
        self._last_obstacles = -math.inf
        self._was_stale = False
        self._collided = False
        self._converged = False

    # -- client messages --------------------------------------------------

    def handle_message(self, text: str):
        """Apply one client frame; returns an error frame dict or None."""
        try:
            msg = json.loads(text)
            kind = msg["type"]
        except (json.JSONDecodeError, TypeError, KeyError) as e:
            return {"type": "error", "message": f"malformed message: {e}"}
        if kind == "nominal":
            v = msg.get("v")
            if (not isinstance(v, list) or len(v) != 2
                    or not all(isinstance(x, (int, float)) for x in v)):
                return {"type": "error", "message": "nominal needs v=[vx,vy]"}
            try:
                self.controller.push_nominal(np.asarray(v, float), self.t)
            except StaleWriteError:
                pass
            return None
        if kind == "reset":
            try:
                scenario = Scenario.from_dict(msg.get("scenario", {}))
            except ScenarioError as e:
                return {"type": "error", "message": str(e)}
            self.__init__(scenario,
                          self.controller.mailbox.limits.nominal)
            return None
        if kind == "pause":
            self.paused = not self.paused
            return None
        return {"type": "error", "message": f"unknown message type {kind!r}"}

    # -- control loop ------------------------------------------------------

    def step(self):
        """One 100 Hz control tick; returns a state frame dict or None
        (frames are decimated to ~30 Hz)."""
        if self.paused:
            return None
        if self.t - self._last_scan >= SCAN_PERIOD:
            scan = synthesize_scan(self.world, tuple(self.pose),
                                   self.scenario.scan, timestamp=self.t)
            self.controller.push_scan(scan, self.t)
            self._last_scan = self.t
        if self.t - self._last_obstacles >= OBSTACLE_PERIOD:
            self.controller.push_obstacles(self._tracked, self.t)
            self._last_obstacles = self.t
        tick = self.controller.step(self.pose, self.t)

        if tick.stale_nominal and not self._was_stale:
            self.events.append({"type": "event", "kind": "stale_nominal"})
        self._was_stale = tick.stale_nominal

        # differential-drive plant
        lin, ang = tick.linear_cmd, tick.angular_cmd
        if tick.collision:
            lin = ang = 0.0
        x, y, th = self.pose
        self.pose = np.array([
            x + CONTROL_DT * lin * math.cos(th),
            y + CONTROL_DT * lin * math.sin(th),
            th + CONTROL_DT * ang,
        ])
        for obs in self.world:
            obs.advance(CONTROL_DT)
        self.t += CONTROL_DT
        self.tick_count += 1

        clearance = _min_clearance(self.world, tick.xi, self.config.radius)
        if clearance < 0 and not self._collided:
            self._collided = True
            self.events.append({"type": "event", "kind": "collision"})
        if (not self._converged and self.scenario.attractor is not None
                and float(np.linalg.norm(
                    tick.xi - self.scenario.attractor)) < 0.01):
            self._converged = True
            self.events.append({"type": "event", "kind": "converged"})

        if self.tick_count % FRAME_DECIMATION:
            return None
        return self._frame(tick, clearance)

    def _frame(self, tick, clearance):
        scan, _, _ = self.controller.mailbox.snapshot(self.t)
        pts = []
        if scan is not None and len(scan):
            stride = max(1, int(math.ceil(len(scan) / MAX_SCAN_POINTS)))
            pts = scan.points[::stride].tolist()
        return {
            "type": "state",
            "t": round(self.t, 4),
            "pose": [float(v) for v in self.pose],
            "xi_dot": [float(v) for v in tick.xi_dot],
            "v_n": [float(v) for v in tick.v_nominal],
            "scan": pts,
            "obstacles": [obstacle_to_dict(o) for o in self._tracked],
            "delta_c": _json_safe(float(tick.delta_c)),
            "d_min": _json_safe(float(tick.d_min if math.isfinite(tick.d_min)
                                      else clearance)),
            "radius": self.config.radius,
        }

    def drain_events(self):
        out, self.events = self.events, []
        return out


def create_app(scenario: Scenario, speed: float = 1.0):
    """FastAPI app exposing the session protocol at /session."""
    from fastapi import FastAPI

    app = FastAPI(title="fastavoid bridge", version=__version__)

    @app.get("/healthz")
    def health():
        return {"ok": True, "version": __version__}

    @app.websocket("/session")
    async def session(ws: WebSocket):
        await ws.accept()
        sess = ControlSession(scenario)
        dt_wall = CONTROL_DT / max(speed, 1e-6)

        async def pump_in():
            while True:
                text = await ws.receive_text()
                err = sess.handle_message(text)
                if err is not None:
                    await ws.send_text(json.dumps(err))

        reader = asyncio.create_task(pump_in())
        try:
            while True:
                frame = sess.step()
                for ev in sess.drain_events():
                    await ws.send_text(json.dumps(ev))
                if frame is not None:
                    await ws.send_text(json.dumps(frame))
                await asyncio.sleep(dt_wall)
                if reader.done():
                    reader.result()
        except WebSocketDisconnect:
            pass
        except Exception:
            pass
        finally:
            reader.cancel()

    return app


def serve(scenario: Scenario, port: int = 8700, host: str = "127.0.0.1",
          speed: float = 1.0):
    """Run the bridge until interrupted."""
    import uvicorn

    uvicorn.run(create_app(scenario, speed=speed), host=host, port=port,
                log_level="warning")


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="fastavoid-bridge",
                                description="live shared-control bridge")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--speed", type=float, default=1.0,
                   help="simulated seconds per wall second")
    args = p.parse_args(argv)
    try:
        scenario = Scenario.load(args.scenario)
    except (ScenarioError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 64
    serve(scenario, port=args.port, host=args.host, speed=args.speed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
