import asyncio
import json

import pytest

from mantablimp.control import ControlConfig
from mantablimp.dataset import OPTIMAL_WING, builtin_dataset
from mantablimp.dynamics import TailMode, VehicleParams
from mantablimp.service import (ServiceEndpoints, SimulationService,
                                TELEMETRY_DIVISOR, serve)

DS = builtin_dataset()


def make_service(**kwargs):
    return SimulationService(VehicleParams(), OPTIMAL_WING, DS, **kwargs)


def drive(service, n_ticks):
    frames = []
    for _ in range(n_ticks):
        frame = service.tick()
        if frame is not None:
            frames.append(frame)
    return frames


class TestCommands:
    def test_latest_command_wins_within_a_tick(self):
        svc = make_service()
        assert svc.handle_message('{"kind":"set_throttle","value":0.3,"seq":5}') is None
        assert svc.handle_message('{"kind":"set_throttle","value":0.9,"seq":6}') is None
        assert svc.pilot_command().throttle == 0.9

    def test_stale_seq_ignored(self):
        svc = make_service()
        svc.handle_message('{"kind":"set_throttle","value":0.9,"seq":6}')
        svc.handle_message('{"kind":"set_throttle","value":0.1,"seq":4}')
        assert svc.pilot_command().throttle == 0.9

    def test_malformed_json_gets_error_reply(self):
        svc = make_service()
        reply = svc.handle_message("not json at all")
        assert "error" in json.loads(reply)
        drive(svc, 5)   # session still alive

    def test_unknown_kind_rejected(self):
        svc = make_service()
        reply = json.loads(svc.handle_message('{"kind":"set_warp","value":9,"seq":1}'))
        assert "error" in reply

    def test_non_numeric_axis_rejected(self):
        svc = make_service()
        reply = json.loads(svc.handle_message(
            '{"kind":"set_throttle","value":"fast","seq":1}'))
        assert "error" in reply

    def test_bad_tail_mode_rejected(self):
        svc = make_service()
        reply = json.loads(svc.handle_message(
            '{"kind":"set_tail_mode","value":"sideways","seq":1}'))
        assert "error" in reply

    def test_tail_mode_switch_applies(self):
        svc = make_service()
        svc.handle_message('{"kind":"set_tail_mode","value":"elevator","seq":1}')
        drive(svc, 1)
        assert svc.params.tail_mode is TailMode.ELEVATOR

    def test_axis_values_clamped_at_control_boundary(self):
        svc = make_service()
        svc.handle_message('{"kind":"set_throttle","value":7.5,"seq":1}')
        svc.handle_message('{"kind":"set_yaw","value":-42,"seq":2}')
        cmd = svc.pilot_command()
        assert cmd.throttle == 1.0 and cmd.yaw == -1.0
        drive(svc, 10)   # to_actuators never sees an invalid state


class TestLoop:
    def test_telemetry_rate_100_frames_per_10s(self):
        svc = make_service()
        frames = drive(svc, 500)   # 10 simulated seconds at dt 0.02
        assert abs(len(frames) - 100) <= 1

    def test_frames_carry_strictly_increasing_time(self):
        svc = make_service()
        svc.handle_message('{"kind":"set_throttle","value":1.0,"seq":1}')
        frames = drive(svc, 300)
        times = [f["t_s"] for f in frames]
        assert all(b > a for a, b in zip(times, times[1:]))

    def test_telemetry_fields(self):
        svc = make_service()
        svc.handle_message('{"kind":"set_throttle","value":1.0,"seq":1}')
        frame = drive(svc, TELEMETRY_DIVISOR)[0]
        for key in ("t_s", "x", "y", "z", "psi", "theta", "u", "w", "r", "q",
                    "left_amplitude_deg", "left_frequency_hz", "left_enabled",
                    "right_amplitude_deg", "right_frequency_hz", "right_enabled",
                    "tail_deg", "tail_mode", "battery", "endurance_s", "range_m",
                    "left_phase", "right_phase", "lag", "epoch"):
            assert key in frame
        assert frame["left_amplitude_deg"] == 90.0
        assert frame["battery"] <= 1.0

    def test_pause_freezes_and_resume_is_seamless(self):
        svc = make_service()
        svc.handle_message('{"kind":"set_throttle","value":1.0,"seq":1}')
        drive(svc, 50)
        before = svc.state
        svc.handle_message('{"kind":"pause","seq":2}')
        frames = drive(svc, 100)
        assert frames == []
        assert svc.state == before
        svc.handle_message('{"kind":"resume","seq":3}')
        drive(svc, 1)
        assert svc.state.t_s == pytest.approx(before.t_s + 0.02)

    def test_reset_restores_initial_state_and_bumps_epoch(self):
        svc = make_service()
        svc.handle_message('{"kind":"set_throttle","value":1.0,"seq":1}')
        drive(svc, 100)
        assert svc.state.t_s > 0
        svc.handle_message('{"kind":"reset","seq":2}')
        assert svc.state.t_s == 0.0
        assert svc.state.surge_mps == 0.0
        assert svc.epoch == 1

    def test_headless_advance_without_clients(self):
        svc = make_service()
        drive(svc, 100)
        assert svc.state.t_s == pytest.approx(2.0)

    def test_two_subscribers_get_identical_sequences(self):
        svc = make_service()
        q1, q2 = svc.subscribe(), svc.subscribe()
        svc.handle_message('{"kind":"set_throttle","value":0.7,"seq":1}')
        drive(svc, 100)
        lines1 = [q1.get_nowait() for _ in range(q1.qsize())]
        lines2 = [q2.get_nowait() for _ in range(q2.qsize())]
        assert lines1 == lines2 and len(lines1) == 20

    def test_record_trace(self):
        svc = make_service(record=True)
        drive(svc, 10)
        assert len(svc.trace) == 11


async def _start(svc):
    stop = asyncio.Event()
    ready = asyncio.Event()
    endpoints = ServiceEndpoints(0, 0)
    task = asyncio.create_task(serve(svc, tcp_port=0, ws_port=0, stop=stop,
                                     ready=ready, endpoints=endpoints))
    await asyncio.wait_for(ready.wait(), 10)
    return stop, task, endpoints


class TestTransports:
    def test_tcp_pilot_reaches_cruise_speed(self):
        async def scenario():
            svc = make_service(speedup=10000.0)
            stop, task, eps = await _start(svc)
            try:
                reader, writer = await asyncio.open_connection("127.0.0.1",
                                                               eps.tcp_port)
                writer.write(b'{"kind":"set_throttle","value":1.0,"seq":1}\n')
                await writer.drain()
                best = 0.0
                while True:
                    frame = json.loads(await asyncio.wait_for(reader.readline(), 30))
                    best = max(best, frame["u"])
                    if frame["t_s"] >= 60.0 or best >= 1.0:
                        break
                writer.close()
                return best
            finally:
                stop.set()
                await task
        best = asyncio.run(scenario())
        assert best >= 1.0

    def test_tcp_error_reply_keeps_session_alive(self):
        async def scenario():
            svc = make_service(speedup=5000.0)
            stop, task, eps = await _start(svc)
            try:
                reader, writer = await asyncio.open_connection("127.0.0.1",
                                                               eps.tcp_port)
                writer.write(b'{"kind":"set_tailfin","seq":1}\n')
                await writer.drain()
                reply = None
                for _ in range(100):
                    msg = json.loads(await asyncio.wait_for(reader.readline(), 30))
                    if "error" in msg:
                        reply = msg
                        break
                assert reply is not None
                frame = json.loads(await asyncio.wait_for(reader.readline(), 30))
                assert "t_s" in frame
                writer.close()
            finally:
                stop.set()
                await task
        asyncio.run(scenario())

    def test_websocket_round_trip(self):
        async def scenario():
            import websockets
            svc = make_service(speedup=5000.0)
            stop, task, eps = await _start(svc)
            try:
                async with websockets.connect(
                        f"ws://127.0.0.1:{eps.ws_port}") as ws:
                    await ws.send('{"kind":"set_throttle","value":0.8,"seq":1}')
                    frames = [json.loads(await asyncio.wait_for(ws.recv(), 30))
                              for _ in range(5)]
                times = [f["t_s"] for f in frames]
                assert all(b > a for a, b in zip(times, times[1:]))
                assert frames[-1]["left_enabled"]
            finally:
                stop.set()
                await task
        asyncio.run(scenario())
