"""Electrical parameters of a three-junction C-shunt flux qubit.

Converts junction geometry and material constants into junction and shunt
capacitances, charging energy and Josephson energy. Capacitances are in fF,
energies are expressed as frequencies E/h in GHz, lengths in um (diameters)
and nm (barrier thickness).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import CONSTANTS, FF, GHZ
from .errors import InputError

#: relative permittivity of the AlN barrier that reproduces C = 31.2 fF for
#: a 1.07 um disk with a 1.8 nm barrier
DEFAULT_EPS_R_BARRIER = 7.05
DEFAULT_C_SHUNT_FF = 52.8

EPS_R_SAPPHIRE = 11.5
EPS_R_SILICON = 11.9


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise InputError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class JunctionGeometry:
    """Circular parallel-plate junction.

    Parameters
    ----------
    diameter : float
        Junction diameter in um.
    barrier_thickness : float
        Tunnel-barrier thickness in nm.
    eps_r_barrier : float
        Relative permittivity of the barrier.
    """

    diameter: float
    barrier_thickness: float
    eps_r_barrier: float = DEFAULT_EPS_R_BARRIER

    def __post_init__(self):
        _positive("diameter", self.diameter)
        _positive("barrier_thickness", self.barrier_thickness)
        if not self.eps_r_barrier > 1:
            raise InputError(f"eps_r_barrier must exceed 1, got {self.eps_r_barrier!r}")

    @property
    def area_um2(self) -> float:
        return math.pi * (self.diameter / 2) ** 2


def junction_capacitance(g: JunctionGeometry) -> float:
    """Parallel-plate capacitance eps_r eps0 A / t of a junction, in fF."""
    if not isinstance(g, JunctionGeometry):
        raise InputError("junction_capacitance expects a JunctionGeometry")
    area_m2 = g.area_um2 * 1e-12
    return g.eps_r_barrier * CONSTANTS.eps0 * area_m2 / (g.barrier_thickness * 1e-9) / FF


def total_junction_capacitance(alpha: float, C_large: float) -> float:
    """Series-parallel capacitance (alpha + 1/2) C of the three-junction loop, in fF."""
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha!r}")
    _positive("C_large", C_large)
    return (alpha + 0.5) * C_large


def scale_shunt_capacitance(C_ref: float, eps_ref: float, eps_new: float) -> float:
    """Rescale a reference shunt capacitance to a substrate of different permittivity."""
    _positive("C_ref", C_ref)
    _positive("eps_ref", eps_ref)
    _positive("eps_new", eps_new)
    return C_ref * eps_new / eps_ref


def charging_energy(C_sigma: float) -> float:
    """E_C/h = e^2 / (2 C_sigma h) in GHz for a capacitance in fF.

    An infinite capacitance gives 0.
    """
    if not C_sigma > 0:
        raise InputError(f"C_sigma must be positive, got {C_sigma!r}")
    return CONSTANTS.e**2 / (2 * C_sigma * FF * CONSTANTS.h) / GHZ


def capacitance_from_charging_energy(E_C: float) -> float:
    """Inverse of :func:`charging_energy`; returns fF."""
    _positive("E_C", E_C)
    return CONSTANTS.e**2 / (2 * E_C * GHZ * CONSTANTS.h) / FF


def josephson_energy_from_critical_current(I_c: float) -> float:
    """E_J/h = Phi0 I_c / (2 pi h) in GHz for a critical current in uA."""
    _positive("I_c", I_c)
    return CONSTANTS.Phi0 * I_c * 1e-6 / (2 * math.pi * CONSTANTS.h) / GHZ


def critical_current_from_ej(E_J: float) -> float:
    """Inverse of :func:`josephson_energy_from_critical_current`; returns uA."""
    _positive("E_J", E_J)
    return E_J * GHZ * 2 * math.pi * CONSTANTS.h / CONSTANTS.Phi0 * 1e6


def critical_current_from_density(jc_a_per_cm2: float, diameter_um: float) -> float:
    """Critical current (uA) of a circular junction with current density J_c (A/cm^2)."""
    _positive("jc_a_per_cm2", jc_a_per_cm2)
    _positive("diameter_um", diameter_um)
    area_cm2 = math.pi * (diameter_um * 1e-4 / 2) ** 2
    return jc_a_per_cm2 * area_cm2 * 1e6


@dataclass(frozen=True)
class DeviceParams:
    """Electrical description of the qubit.

    ``E_C`` defaults to the charging energy of ``C_sigma``; pass it explicitly
    to override (e.g. with a spectroscopically fitted value).

    Parameters
    ----------
    alpha : float
        Area ratio of the small junction to each large junction.
    C_large : float
        Capacitance of each large junction (fF).
    C_shunt : float
        Shunt capacitance across the small junction (fF).
    E_J : float
        Josephson energy of each large junction, E_J/h in GHz.
    E_C : float, optional
        Charging energy E_C/h in GHz.
    """

    alpha: float
    C_large: float
    C_shunt: float
    E_J: float
    E_C: float | None = None
    ec_derived: bool = field(init=False, default=False)

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        _positive("C_large", self.C_large)
        _positive("C_shunt", self.C_shunt)
        if not (self.E_J >= 0 and math.isfinite(self.E_J)):
            raise InputError(f"E_J must be non-negative, got {self.E_J!r}")
        if self.E_C is None:
            object.__setattr__(self, "E_C", charging_energy(self.C_sigma))
            object.__setattr__(self, "ec_derived", True)
        else:
            _positive("E_C", self.E_C)

    @property
    def C_J(self) -> float:
        return total_junction_capacitance(self.alpha, self.C_large)

    @property
    def C_sigma(self) -> float:
        return self.C_shunt + self.C_J

    def replace(self, **changes) -> DeviceParams:
        values = dict(alpha=self.alpha, C_large=self.C_large, C_shunt=self.C_shunt,
                      E_J=self.E_J, E_C=None if self.ec_derived else self.E_C)
        values.update(changes)
        return DeviceParams(**values)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "C_large_ff": self.C_large,
            "C_shunt_ff": self.C_shunt,
            "C_J_ff": self.C_J,
            "C_sigma_ff": self.C_sigma,
            "E_J_ghz": self.E_J,
            "E_C_ghz": self.E_C,
        }


def fitted_device() -> DeviceParams:
    """Device with the spectroscopically fitted parameters of the NbN qubit."""
    return DeviceParams(alpha=0.358, C_large=31.2, C_shunt=DEFAULT_C_SHUNT_FF,
                        E_J=140.0, E_C=0.244)


#: keys accepted in a device configuration file
DEVICE_KEYS = (
    "alpha", "d_large_um", "d_small_um", "t_barrier_nm", "eps_r_barrier",
    "c_shunt_ff", "ej_ghz", "ec_ghz", "c_large_ff", "jc_a_per_cm2",
)


def device_from_config(values: dict) -> DeviceParams:
    """Build :class:`DeviceParams` from a parsed device configuration.

    Electrical entries (``c_large_ff``, ``ej_ghz``, ``ec_ghz``) take precedence
    over the geometric route (diameters, barrier, ``jc_a_per_cm2``).
    """
    unknown = set(values) - set(DEVICE_KEYS)
    if unknown:
        raise InputError(f"unknown device keys: {', '.join(sorted(unknown))}")

    if "alpha" in values:
        alpha = values["alpha"]
    elif "d_large_um" in values and "d_small_um" in values:
        alpha = (values["d_small_um"] / values["d_large_um"]) ** 2
    else:
        raise InputError("device config needs alpha or both d_large_um and d_small_um")

    if "c_large_ff" in values:
        C_large = values["c_large_ff"]
    elif "d_large_um" in values and "t_barrier_nm" in values:
        geom = JunctionGeometry(values["d_large_um"], values["t_barrier_nm"],
                                values.get("eps_r_barrier", DEFAULT_EPS_R_BARRIER))
        C_large = junction_capacitance(geom)
    else:
        raise InputError("device config needs c_large_ff or d_large_um and t_barrier_nm")

    if "ej_ghz" in values:
        E_J = values["ej_ghz"]
    elif "jc_a_per_cm2" in values and "d_large_um" in values:
        I_c = critical_current_from_density(values["jc_a_per_cm2"], values["d_large_um"])
        E_J = josephson_energy_from_critical_current(I_c)
    else:
        raise InputError("device config needs ej_ghz or jc_a_per_cm2 with d_large_um")

    return DeviceParams(alpha=alpha, C_large=C_large,
                        C_shunt=values.get("c_shunt_ff", DEFAULT_C_SHUNT_FF),
                        E_J=E_J, E_C=values.get("ec_ghz"))


def ej_consistency_report(E_J: float, jc_a_per_cm2: float, diameter_um: float) -> dict:
    """Compare a quoted E_J with the one implied by J_c over the nominal junction area.

    The two routes need not agree (the effective junction area may differ
    from the nominal disk); both values and their relative mismatch are
    returned rather than reconciled.
    """
    I_c_geom = critical_current_from_density(jc_a_per_cm2, diameter_um)
    E_J_geom = josephson_energy_from_critical_current(I_c_geom)
    return {
        "ej_quoted_ghz": E_J,
        "ic_quoted_ua": critical_current_from_ej(E_J),
        "ic_from_jc_ua": I_c_geom,
        "ej_from_jc_ghz": E_J_geom,
        "relative_mismatch": E_J_geom / E_J - 1.0,
        "effective_diameter_um": diameter_um * math.sqrt(E_J / E_J_geom),
    }
