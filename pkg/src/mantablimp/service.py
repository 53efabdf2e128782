"""Real-time telemetry/command service for live piloting.

One simulation loop owns the state and advances it at a fixed 50 Hz tick,
pacing against the wall clock (a `lag` counter reports missed ticks; the
loop slips rather than compressing dt).  Clients connect over plain TCP or
WebSocket and speak the same newline-delimited JSON schema:

  command  {"kind": "set_throttle", "value": 0.8, "seq": 12}
  kinds: set_throttle, set_yaw, set_pitch, set_tail_mode (value "rudder" /
         "elevator"), reset, pause, resume

Telemetry frames are broadcast at 10 Hz to every client.  Command arbitration
is global latest-wins by seq; malformed messages get a per-message error
reply and the session stays alive.
"""

from __future__ import annotations

import asyncio
import contextlib
import dataclasses
import json
import math
from dataclasses import dataclass

from .control import ControlConfig, DEFAULT_CONTROL, PilotCommand, to_actuators
from .dynamics import (DEFAULT_DT_S, SimState, TailMode, VehicleParams,
                       initial_state, step, write_trajectory_csv)
from .wing import ThrustDataset, WingSpec

TELEMETRY_DIVISOR = 5        # one frame every 5 ticks = 10 Hz at dt 0.02
_AXIS_KINDS = ("set_throttle", "set_yaw", "set_pitch", "set_tail_mode")
_EVENT_KINDS = ("reset", "pause", "resume")


@dataclass
class _Axis:
    value: float | str
    seq: int = -1


class SimulationService:
    """Owns the simulation loop; transports only enqueue messages and read frames."""

    def __init__(self, params: VehicleParams, wing: WingSpec,
                 dataset: ThrustDataset, control: ControlConfig = DEFAULT_CONTROL,
                 dt: float = DEFAULT_DT_S, speedup: float = 1.0,
                 record: bool = False):
        self.params = params
        self.wing = wing
        self.dataset = dataset
        self.control = control
        self.dt = dt
        self.speedup = speedup
        self.state = initial_state(params)
        self._initial = self.state
        self._axes = {
            "set_throttle": _Axis(0.0),
            "set_yaw": _Axis(0.0),
            "set_pitch": _Axis(0.0),
            "set_tail_mode": _Axis(params.tail_mode.value),
        }
        self.paused = False
        self.lag = 0
        self.epoch = 0
        self._tick_count = 0
        self._subscribers: set[asyncio.Queue] = set()
        self.trace: list[SimState] | None = [self.state] if record else None

    # -- commands -----------------------------------------------------------

    def handle_message(self, raw: str) -> str | None:
        """Apply one wire message; returns an error reply for bad input, else None."""
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            return json.dumps({"error": f"bad json: {exc.msg}"})
        if not isinstance(msg, dict):
            return json.dumps({"error": "message must be an object"})
        kind = msg.get("kind")
        seq = msg.get("seq", 0)
        if not isinstance(seq, int):
            return json.dumps({"error": "seq must be an integer", "kind": kind})

        if kind in _EVENT_KINDS:
            if kind == "reset":
                self.state = self._initial
                self.epoch += 1
                self._tick_count = 0
            elif kind == "pause":
                self.paused = True
            else:
                self.paused = False
            return None

        if kind not in _AXIS_KINDS:
            return json.dumps({"error": f"unknown kind {kind!r}"})
        value = msg.get("value")
        if kind == "set_tail_mode":
            try:
                value = TailMode(value).value
            except ValueError:
                return json.dumps(
                    {"error": f"tail mode must be 'rudder' or 'elevator', got {value!r}",
                     "kind": kind})
        elif not isinstance(value, (int, float)) or isinstance(value, bool) \
                or not math.isfinite(value):
            return json.dumps({"error": "value must be a finite number", "kind": kind})
        axis = self._axes[kind]
        if seq >= axis.seq:          # global latest-wins arbitration
            axis.value = value
            axis.seq = seq
        return None

    def pilot_command(self) -> PilotCommand:
        return PilotCommand(
            throttle=self._axes["set_throttle"].value,
            yaw=self._axes["set_yaw"].value,
            pitch=self._axes["set_pitch"].value,
            tail_mode=TailMode(self._axes["set_tail_mode"].value))

    # -- simulation loop ----------------------------------------------------

    def tick(self) -> dict | None:
        """Advance one tick (unless paused); returns a telemetry frame when due."""
        if self.paused:
            return None
        cmd = self.pilot_command()
        params = self.params
        if cmd.tail_mode is not params.tail_mode:
            params = dataclasses.replace(params, tail_mode=cmd.tail_mode)
            self.params = params
        self.state = step(self.state, to_actuators(cmd, self.control), params,
                          self.wing, self.dataset, self.dt)
        if self.trace is not None:
            self.trace.append(self.state)
        self._tick_count += 1
        if self._tick_count % TELEMETRY_DIVISOR == 0:
            frame = self.telemetry_frame()
            self._broadcast(frame)
            return frame
        return None

    def telemetry_frame(self) -> dict:
        s = self.state
        cmd = self.pilot_command()
        act = to_actuators(cmd, self.control)
        battery_frac = s.battery_j_remaining / self.params.battery_j
        endurance_s = s.battery_j_remaining / self.params.electronics_power_w
        return {
            "t_s": round(s.t_s, 6),
            "x": s.x_m, "y": s.y_m, "z": s.z_m,
            "psi": s.heading_deg, "theta": s.pitch_deg,
            "u": s.surge_mps, "w": s.heave_mps,
            "r": s.yaw_rate_dps, "q": s.pitch_rate_dps,
            "left_enabled": act.left.enabled,
            "left_amplitude_deg": act.left.setting.amplitude_deg if act.left.enabled else 0.0,
            "left_frequency_hz": act.left.setting.frequency_hz if act.left.enabled else 0.0,
            "right_enabled": act.right.enabled,
            "right_amplitude_deg": act.right.setting.amplitude_deg if act.right.enabled else 0.0,
            "right_frequency_hz": act.right.setting.frequency_hz if act.right.enabled else 0.0,
            "tail_deg": act.tail_deg,
            "tail_mode": cmd.tail_mode.value,
            "battery": battery_frac,
            "endurance_s": endurance_s,
            "range_m": endurance_s * abs(s.surge_mps),
            "left_phase": s.left_phase,
            "right_phase": s.right_phase,
            "lag": self.lag,
            "epoch": self.epoch,
        }

    def _broadcast(self, frame: dict) -> None:
        line = json.dumps(frame)
        for queue in list(self._subscribers):
            queue.put_nowait(line)

    def subscribe(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        self._subscribers.add(queue)
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        self._subscribers.discard(queue)

    async def run(self, stop: asyncio.Event) -> None:
        """Paced loop: fixed dt, wall-clock target, slip (and count) when behind."""
        loop = asyncio.get_running_loop()
        interval = self.dt / self.speedup
        target = loop.time()
        while not stop.is_set():
            self.tick()
            target += interval
            delay = target - loop.time()
            if delay > 0:
                with contextlib.suppress(asyncio.TimeoutError):
                    await asyncio.wait_for(stop.wait(), timeout=delay)
            else:
                self.lag += 1
                target = loop.time()
                await asyncio.sleep(0)   # keep the transports serviced


# ---------------------------------------------------------------------------
# Transports

async def _pump_queue(queue: asyncio.Queue, send) -> None:
    while True:
        line = await queue.get()
        await send(line)


async def _tcp_client(service: SimulationService, reader: asyncio.StreamReader,
                      writer: asyncio.StreamWriter) -> None:
    queue = service.subscribe()

    async def send(line: str) -> None:
        writer.write(line.encode() + b"\n")
        await writer.drain()

    pump = asyncio.create_task(_pump_queue(queue, send))
    try:
        while True:
            raw = await reader.readline()
            if not raw:
                break
            text = raw.decode().strip()
            if not text:
                continue
            reply = service.handle_message(text)
            if reply is not None:
                queue.put_nowait(reply)
    finally:
        pump.cancel()
        service.unsubscribe(queue)
        writer.close()
        with contextlib.suppress(Exception):
            await writer.wait_closed()


def _make_ws_handler(service: SimulationService):
    async def handler(websocket):
        queue = service.subscribe()
        pump = asyncio.create_task(_pump_queue(queue, websocket.send))
        try:
            async for raw in websocket:
                for text in str(raw).splitlines():
                    if not text.strip():
                        continue
                    reply = service.handle_message(text)
                    if reply is not None:
                        queue.put_nowait(reply)
        finally:
            pump.cancel()
            service.unsubscribe(queue)
    return handler


@dataclass
class ServiceEndpoints:
    tcp_port: int
    ws_port: int


async def serve(service: SimulationService, host: str = "127.0.0.1",
                tcp_port: int = 8765, ws_port: int = 8766,
                stop: asyncio.Event | None = None,
                ready: asyncio.Event | None = None,
                endpoints: ServiceEndpoints | None = None,
                record_path=None) -> None:
    """Run the loop plus both listeners until `stop` is set (or forever)."""
    from websockets.asyncio.server import serve as ws_serve

    stop = stop or asyncio.Event()
    tcp_server = await asyncio.start_server(
        lambda r, w: _tcp_client(service, r, w), host, tcp_port)
    async with ws_serve(_make_ws_handler(service), host, ws_port) as ws_server:
        if endpoints is not None:
            endpoints.tcp_port = tcp_server.sockets[0].getsockname()[1]
            endpoints.ws_port = ws_server.sockets[0].getsockname()[1]
        if ready is not None:
            ready.set()
        try:
            await service.run(stop)
        finally:
            tcp_server.close()
            await tcp_server.wait_closed()
            if record_path and service.trace:
                write_trajectory_csv(service.trace, record_path)
