"""Executable semantics of stock & flow diagrams."""

from .ode import Scenario, Trajectory, compile_odes, integrate_euler, integrate_rk4
from .ssa import DiscreteState, EventLog, simulate_replicates, simulate_ssa, ssa_to_trajectory
