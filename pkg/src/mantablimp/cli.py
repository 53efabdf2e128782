"""Command-line entry points.

Every report subcommand writes delimited output and, next to it, a rendered
figure (same stem, .png) unless --no-plot is given.  Exit codes: 0 success,
1 domain error (diagnostic on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import numpy as np

from . import dataset as dataset_mod
from . import plots
from .config import AppConfig, load_config
from .dynamics import (calibrate_hull_drag, load_scenario, run_scenario,
                       write_trajectory_csv)
from .energy import (endurance, flapping_model, propeller_model, range_curve,
                     write_range_csv)
from .errors import WorkbenchError
from .longitudinal import pitch_curve, speed_curve, write_curve_csv
from .service import SimulationService, serve
from .standlab import best_setting, read_recording, sweep_table
from .wing import (Stiffness, ThrustDataset, TrailingEdge, WingSpec,
                   optimal_setting)

import dataclasses


def _add_wing_args(parser: argparse.ArgumentParser) -> None:
    w = dataset_mod.OPTIMAL_WING
    parser.add_argument("--stiffness", choices=[s.value for s in Stiffness],
                        default=w.stiffness.value)
    parser.add_argument("--trailing", choices=[t.value for t in TrailingEdge],
                        default=w.trailing_edge.value)
    parser.add_argument("--gamma", type=float, default=w.gamma)
    parser.add_argument("--width-cm", type=float, default=w.width_m * 100)
    parser.add_argument("--length-cm", type=float, default=w.length_m * 100)


def _wing_from_args(args) -> WingSpec:
    return WingSpec(width_m=args.width_cm / 100.0, length_m=args.length_cm / 100.0,
                    gamma=args.gamma, stiffness=Stiffness(args.stiffness),
                    trailing_edge=TrailingEdge(args.trailing))


def _dataset_from_args(args) -> ThrustDataset:
    if args.dataset:
        return ThrustDataset.from_csv(args.dataset)
    return dataset_mod.builtin_dataset()


def _figure_path(out: str) -> Path:
    return Path(out).with_suffix(".png")


def _parse_speeds(text: str) -> list[float]:
    """Speed list: either comma-separated values or start:stop:step."""
    if ":" in text:
        start, stop, step_ = (float(x) for x in text.split(":"))
        return [round(v, 10) for v in np.arange(start, stop + step_ / 2, step_)]
    return [float(x) for x in text.split(",")]


def _write_rows_csv(rows, path) -> None:
    ThrustDataset(rows).to_csv(path)


def cmd_sweep(args, cfg: AppConfig) -> int:
    ds = _dataset_from_args(args)
    wing = _wing_from_args(args)
    rows = sorted(ds.rows_for(wing),
                  key=lambda r: (r.amplitude_deg, r.frequency_hz))
    setting, gf = optimal_setting(wing, ds)
    print(f"optimal setting: {setting.amplitude_deg:g} deg at "
          f"{setting.frequency_hz:g} Hz -> {gf:g} gf")
    if args.out:
        _write_rows_csv(rows, args.out)
        print(f"wrote {args.out}")
        if not args.no_plot:
            fig = plots.thrust_grid_figure(rows, title="Mean thrust sweep")
            print(f"wrote {plots.save_figure(fig, _figure_path(args.out))}")
    return 0


def cmd_equilibrium(args, cfg: AppConfig) -> int:
    lon = cfg.vehicle.longitudinal
    if args.speed:
        speeds = _parse_speeds(args.speeds)
        points = []
        for beta in (float(b) for b in args.betas.split(",")):
            points.extend(speed_curve(beta, speeds, lon))
        against_speed = True
    else:
        betas = _parse_speeds(args.betas) if ":" in args.betas else \
            [float(b) for b in args.betas.split(",")]
        points = pitch_curve(betas, args.v, lon)
        against_speed = False
    if args.out:
        write_curve_csv(points, args.out)
        print(f"wrote {args.out}")
        if not args.no_plot:
            fig = plots.pitch_curve_figure(points, against_speed)
            print(f"wrote {plots.save_figure(fig, _figure_path(args.out))}")
    else:
        print("beta_deg,v_mps,theta_deg,converged")
        for p in points:
            print(f"{p.beta_deg:g},{p.v_mps:g},{p.theta_deg:.6f},"
                  f"{str(p.converged).lower()}")
    return 0


def cmd_simulate(args, cfg: AppConfig) -> int:
    scenario = load_scenario(args.scenario)
    params = cfg.vehicle
    if scenario.tail_mode is not None:
        params = dataclasses.replace(params, tail_mode=scenario.tail_mode)
    ds = _dataset_from_args(args)
    wing = _wing_from_args(args)
    states = run_scenario(scenario.schedule, params, wing, ds,
                          scenario.duration_s, scenario.dt_s,
                          thrust_model=args.thrust_model)
    final = states[-1]
    print(f"simulated {final.t_s:g} s: "
          f"pos=({final.x_m:.2f}, {final.y_m:.2f}, {final.z_m:.2f}) m, "
          f"u={final.surge_mps:.3f} m/s, psi={final.heading_deg:.1f} deg, "
          f"battery={final.battery_j_remaining:.0f} J")
    if args.out:
        write_trajectory_csv(states, args.out)
        print(f"wrote {args.out}")
        if not args.no_plot:
            fig = plots.trajectory_figure(states)
            print(f"wrote {plots.save_figure(fig, _figure_path(args.out))}")
    return 0


def cmd_range(args, cfg: AppConfig) -> int:
    e = cfg.energy
    flap = flapping_model(e.flapping_endurance_s, e.flapping_max_speed_mps,
                          e.battery_j)
    prop = propeller_model(e.propeller_anchors, e.propeller_max_speed_mps,
                           e.battery_j)
    points = []
    if args.compare or args.model == "flapping":
        speeds = (_parse_speeds(args.speeds) if args.speeds
                  else _parse_speeds(f"0.05:{flap.max_speed_mps}:0.05"))
        points.extend(range_curve(flap, speeds))
    if args.compare or args.model == "propeller":
        speeds = (_parse_speeds(args.speeds) if args.speeds
                  else _parse_speeds(f"0.05:{prop.max_speed_mps}:0.05"))
        points.extend(range_curve(prop, speeds))
    if args.compare:
        # max ranges at the measured operating points (the fitted curve is
        # for interpolation between them, not a measured optimum)
        flap_max = endurance(flap, flap.max_speed_mps) * flap.max_speed_mps
        prop_best = max(endurance(prop, v) * v for v, _ in prop.anchors)
        print(f"flapping max range: {flap_max:.0f} m")
        print(f"propeller max range: {prop_best:.0f} m")
        print(f"max-range ratio: {flap_max / prop_best:.3f}")
    if args.out:
        write_range_csv(points, args.out)
        print(f"wrote {args.out}")
        if not args.no_plot:
            fig = plots.range_figure(points)
            print(f"wrote {plots.save_figure(fig, _figure_path(args.out))}")
    else:
        for p in points:
            print(f"{p.speed_mps:g},{p.endurance_s:.1f},{p.range_m:.1f},"
                  f"{p.model.value}")
    return 0


def cmd_stand(args, cfg: AppConfig) -> int:
    recordings = [read_recording(path) for path in args.recordings]
    table = sweep_table(recordings)
    for warning in table.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    setting, gf = best_setting(table)
    print(f"best setting: {setting.amplitude_deg:g} deg at "
          f"{setting.frequency_hz:g} Hz -> {gf:.2f} gf")
    if args.out:
        table.to_dataset().to_csv(args.out)
        print(f"wrote {args.out}")
        if not args.no_plot:
            fig = plots.thrust_grid_figure(table.to_dataset_rows(),
                                           title="Stand sweep")
            print(f"wrote {plots.save_figure(fig, _figure_path(args.out))}")
    return 0


def cmd_serve(args, cfg: AppConfig) -> int:
    service = SimulationService(cfg.vehicle, _wing_from_args(args),
                                _dataset_from_args(args), cfg.control,
                                speedup=args.speedup,
                                record=bool(args.record))
    print(f"serving TCP on {args.host}:{args.tcp_port}, "
          f"WebSocket on {args.host}:{args.ws_port} (Ctrl-C to stop)")
    try:
        asyncio.run(serve(service, host=args.host, tcp_port=args.tcp_port,
                          ws_port=args.ws_port, record_path=args.record))
    except KeyboardInterrupt:
        if args.record and service.trace:
            write_trajectory_csv(service.trace, args.record)
            print(f"wrote {args.record}")
    return 0


def cmd_calibrate(args, cfg: AppConfig) -> int:
    cda = calibrate_hull_drag(args.thrust_gf, args.speed,
                              cfg.vehicle.longitudinal.air_density,
                              cfg.vehicle.longitudinal.gravity)
    print(f"hull_cda_m2: {cda:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mantablimp",
        description="Flapping-wing blimp simulation and analysis workbench")
    parser.add_argument("--config", help="YAML configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    common_out = argparse.ArgumentParser(add_help=False)
    common_out.add_argument("-o", "--out", help="output CSV path")
    common_out.add_argument("--no-plot", action="store_true",
                            help="skip the figure next to the CSV")
    common_ds = argparse.ArgumentParser(add_help=False)
    common_ds.add_argument("--dataset", help="thrust dataset CSV "
                                             "(default: bundled dataset)")

    p = sub.add_parser("sweep", parents=[common_out, common_ds],
                       help="amplitude x frequency thrust table for one wing")
    _add_wing_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("equilibrium", parents=[common_out],
                       help="equilibrium pitch curves")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--stationary", action="store_true",
                      help="pitch vs tail angle at fixed speed (default)")
    mode.add_argument("--speed", action="store_true",
                      help="pitch vs forward speed at fixed tail angles")
    p.add_argument("--betas", default="-90:90:1",
                   help="tail angles: list or start:stop:step (stationary), "
                        "comma list (speed mode)")
    p.add_argument("--speeds", default="0:2:0.05",
                   help="speeds start:stop:step for --speed")
    p.add_argument("--v", type=float, default=0.0,
                   help="forward speed for the stationary sweep")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("simulate", parents=[common_out, common_ds],
                       help="run a scenario file, dump the trajectory")
    p.add_argument("scenario", help="scenario YAML file")
    p.add_argument("--thrust-model", choices=["waveform", "mean"],
                   default="waveform")
    _add_wing_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("range", parents=[common_out],
                       help="endurance/range tables")
    p.add_argument("--model", choices=["flapping", "propeller"],
                   default="flapping")
    p.add_argument("--compare", action="store_true",
                   help="both models plus the max-range ratio")
    p.add_argument("--speeds", help="list or start:stop:step")
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("stand", parents=[common_out],
                       help="process thrust-stand recordings into a sweep")
    p.add_argument("recordings", nargs="+", help="recording CSV files")
    p.set_defaults(func=cmd_stand)

    p = sub.add_parser("serve", parents=[common_ds],
                       help="run the live piloting service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--tcp-port", type=int, default=8765)
    p.add_argument("--ws-port", type=int, default=8766)
    p.add_argument("--speedup", type=float, default=1.0,
                   help="simulation seconds per wall second")
    p.add_argument("--record", help="dump the trajectory CSV on exit")
    _add_wing_args(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("calibrate",
                       help="hull drag area from max thrust and top speed")
    p.add_argument("--thrust-gf", type=float, required=True)
    p.add_argument("--speed", type=float, required=True)
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
