"""Two-level qubit coupled to a single resonator mode.

All inputs are ordinary frequencies in GHz; factors of 2 pi are applied only
where a decay rate is converted to angular form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import DeviceParams
from .errors import InputError
from .spectrum import DEFAULT_CUTOFF, spectrum_sweep

#: coupling used for the Purcell estimate (from the measured data)
G_PURCELL_GHZ = 0.090
#: coupling implied by the ~120 MHz vacuum Rabi splitting
G_SPLITTING_GHZ = 0.060


@dataclass(frozen=True)
class CoupledSystem:
    """Resonator ``omega_r``, qubit ``omega_q``, coupling ``g``, linewidth ``kappa`` (GHz)."""

    omega_r: float
    omega_q: float
    g: float
    kappa: float

    def __post_init__(self):
        for name in ("omega_r", "kappa"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InputError(f"{name} must be positive, got {v!r}")
        if not (self.g >= 0 and math.isfinite(self.g)):
            raise InputError(f"g must be non-negative, got {self.g!r}")
        if not math.isfinite(self.omega_q):
            raise InputError("omega_q must be finite")

    @property
    def detuning(self) -> float:
        return self.omega_q - self.omega_r


def dressed_frequencies(sys: CoupledSystem) -> tuple[float, float]:
    """Upper and lower dressed-state frequencies (w_r + w_q)/2 +- sqrt(D^2/4 + g^2).

    The lower branch is formed as (w_r + w_q) - upper so that the two always
    sum exactly to w_r + w_q.
    """
    total = sys.omega_r + sys.omega_q
    upper = total / 2 + math.hypot(sys.detuning / 2, sys.g)
    return upper, total - upper


def vacuum_rabi_splitting(g: float) -> float:
    """Minimum dressed-state separation 2g (GHz)."""
    if not g > 0:
        raise InputError(f"g must be positive, got {g!r}")
    return 2.0 * g


def purcell_t1(sys: CoupledSystem) -> float:
    """Purcell-limited T1 = [2 pi kappa (g/Delta)^2]^-1 in us."""
    if not sys.g > 0:
        raise InputError("Purcell T1 is unbounded for g = 0")
    if sys.detuning == 0:
        raise InputError("Purcell formula is invalid on resonance (Delta = 0)")
    rate = 2 * math.pi * sys.kappa * 1e9 * (sys.g / sys.detuning) ** 2
    return 1e6 / rate


def anticrossing_curve(device: DeviceParams, omega_r: float, g: float,
                       f_start: float, f_end: float, n_points: int,
                       cutoff: int = DEFAULT_CUTOFF, kappa: float = 1e-3,
                       **sweep_kwargs) -> np.ndarray:
    """Rows (flux, upper, lower) of the dressed spectrum along a flux sweep."""
    curve = spectrum_sweep(device, f_start, f_end, n_points, cutoff, **sweep_kwargs)
    rows = np.empty((curve.flux.size, 3))
    for k, (f, wq) in enumerate(zip(curve.flux, curve.omega01)):
        up, lo = dressed_frequencies(CoupledSystem(omega_r, float(wq), g, kappa))
        rows[k] = (f, up, lo)
    return rows


def resonator_weight(sys: CoupledSystem) -> tuple[float, float]:
    """Photon-like fraction of the upper and lower dressed states."""
    if sys.g == 0:
        up_is_res = sys.omega_r >= sys.omega_q
        return (1.0, 0.0) if up_is_res else (0.0, 1.0)
    # mixing angle: tan(2 theta) = 2 g / (w_r - w_q)
    half = 0.5 * math.atan2(2 * sys.g, sys.omega_r - sys.omega_q)
    w_up = math.cos(half) ** 2
    return w_up, 1.0 - w_up
