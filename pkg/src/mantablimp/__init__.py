"""Simulation and analysis workbench for a flapping-wing lighter-than-air vehicle."""

from .control import ControlConfig, PilotCommand, map_speed, map_tail, map_yaw, to_actuators
from .dataset import OPTIMAL_WING, builtin_dataset
from .dynamics import (ActuatorState, SimState, TailMode, VehicleParams,
                       WingCommand, calibrate_hull_drag, initial_state,
                       load_scenario, run_scenario, step)
from .energy import (PowerKind, PowerModel, endurance, flapping_model,
                     propeller_model, range_curve, range_m)
from .errors import (FamilyNotFoundError, InsufficientDataError,
                     IntegrationDivergedError, MixedWingError,
                     NoEquilibriumError, OutOfRangeError, ValidationError,
                     WorkbenchError)
from .longitudinal import (LongitudinalParams, PitchSolution, balance_offset,
                           drag_force, equilibrium_pitch, moment_residual,
                           pitch_curve, speed_curve)
from .standlab import (StandRecording, average_thrust, best_setting,
                       process_recording, read_recording, sweep_table,
                       synthesize_recording, tare, total_thrust,
                       write_recording)
from .wing import (FlapProfile, FlapSetting, Stiffness, ThrustDataset,
                   ThrustRow, TrailingEdge, WingSpec, generate_profile,
                   mean_thrust, optimal_setting, peak_command_speed_dps,
                   thrust_waveform)

__version__ = "0.1.0"
