"""CODATA physical constants and unit helpers used across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass

import scipy.constants as sc

FF = 1e-15  # F per fF
GHZ = 1e9  # Hz per GHz
US = 1e-6  # s per us


@dataclass(frozen=True)
class PhysicalConstants:
    """SI values of the constants the circuit formulas need.

    Attributes
    ----------
    e : float
        Elementary charge (C).
    h : float
        Planck constant (J s).
    eps0 : float
        Vacuum permittivity (F/m).
    Phi0 : float
        Superconducting flux quantum h/2e (Wb).
    """

    e: float = sc.e
    h: float = sc.h
    eps0: float = sc.epsilon_0
    Phi0: float = sc.physical_constants["mag. flux quantum"][0]

    def __post_init__(self):
        for name in ("e", "h", "eps0", "Phi0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


CONSTANTS = PhysicalConstants()
