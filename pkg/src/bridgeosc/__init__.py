"""Nonlinear models of oscillating suspension bridges.

Blow-up fourth-order ODEs, coupled torsional/vertical systems, rectangular
plate eigenmodes, flutter/energy thresholds, and a switching modal
plate-wave solver, plus a batch scenario CLI (`bridge`).
"""
from .errors import (BridgeError, EmptyTrajectoryError, InvalidParameterError,
                     UnsupportedFamilyError)
from .nonlin import (HypothesisReport, Nonlinearity, check_hypotheses,
                     default_sample_grid, make_nonlinearity)
from .ode4 import (BlowupReport, IntegratorConfig, OdeFamily, State4,
                   Trajectory, canonical, check_tech, detect_blowup, general,
                   hamiltonian, hamiltonian_drift, integrate, pedestrian_wave,
                   rocard_wave)
from .plate import (Mode, PlateGeom, analytic_modes, navier_square_search,
                    verify_mode)
from .systems import (F0Classification, McKennaParams, MiosystParams,
                      ScanlanParams, SysState, check_initial_oscill,
                      classify_f0, first_integral_E, integrate_coupled,
                      integrate_miosyst, integrate_truesystem, solve_scanlan,
                      to_fourth_order)
from .energy import (EnergyLedger, FlutterParams, NetInputParams,
                     active_mode_count, elongation_mode, flutter_speed,
                     gust_energy, local_energy, make_ledger, net_energy_input,
                     stretching_energy, switch_state)
from .truebeam import (GustForcing, ModalState, ModalTrajectory,
                       TrueBeamConfig, check_compatibility, integrate_truebeam,
                       project_initial)

__version__ = "0.1.0"
