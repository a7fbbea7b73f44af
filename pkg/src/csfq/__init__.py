"""Modeling and characterization toolkit for capacitively-shunted flux qubits."""

from .cavity import CoupledSystem, dressed_frequencies, purcell_t1, vacuum_rabi_splitting
from .circuit import DeviceParams, JunctionGeometry, fitted_device
from .errors import ConvergenceError, CsfqError, FitError, InputError, SolverError
from .fitting import TimeTrace, TraceKind, gaussian_stats
from .lsq import FitResult, least_squares_core
from .spectrum import QubitHamiltonianSpec, eigenlevels, spectrum_sweep

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "CoupledSystem", "CsfqError", "DeviceParams", "FitError",
    "FitResult", "InputError", "JunctionGeometry", "QubitHamiltonianSpec", "SolverError",
    "TimeTrace", "TraceKind", "dressed_frequencies", "eigenlevels", "gaussian_stats",
    "fitted_device", "least_squares_core", "purcell_t1", "spectrum_sweep",
    "vacuum_rabi_splitting", "__version__",
]
