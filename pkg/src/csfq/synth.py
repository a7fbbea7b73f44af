"""Seeded synthetic measurement data.

Random numbers come from PCG64 (O'Neill 2014, the XSL-RR 128/64 variant,
as shipped in numpy's ``numpy.random.PCG64`` and seeded through
``numpy.random.SeedSequence``). Only the raw 64-bit output stream is used:
53-bit uniforms are formed as ((u >> 11) + 0.5) / 2^53 and turned into
standard normals with the Box-Muller transform, evaluated with the ``math``
module. The raw stream is fixed by the PCG64 definition, so a given seed
yields the same numbers on every platform; the transcendental functions are
IEEE double libm calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cavity import CoupledSystem, dressed_frequencies, resonator_weight
from .circuit import DeviceParams
from .errors import InputError
from .fitting import MIN_TRACE_POINTS, TimeTrace, TraceKind, damped_cosine, exp_decay, lorentzian
from .spectrum import DEFAULT_CUTOFF, spectrum_sweep

#: default noise, as a fraction of the signal amplitude
DEFAULT_NOISE_FRACTION = 0.02


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise of standard deviation ``sigma`` (signal units)."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise InputError(f"noise sigma must be >= 0, got {self.sigma!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InputError("seed must be an integer in [0, 2^64)")


class GaussianStream:
    """Deterministic uniform/normal variates from a PCG64 raw stream."""

    def __init__(self, seed: int):
        self._bitgen = np.random.PCG64(np.random.SeedSequence(int(seed)))
        self._spare = None

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles in the open interval (0, 1)."""
        raw = self._bitgen.random_raw(n).astype(np.uint64)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normals(self, n: int) -> np.ndarray:
        out = np.empty(n)
        i = 0
        if n and self._spare is not None:
            out[0] = self._spare
            self._spare = None
            i = 1
        pairs = (n - i + 1) // 2
        u = self.uniforms(2 * pairs)
        for k in range(pairs):
            r = math.sqrt(-2.0 * math.log(u[2 * k]))
            t = 2.0 * math.pi * u[2 * k + 1]
            out[i] = r * math.cos(t)
            i += 1
            z1 = r * math.sin(t)
            if i < n:
                out[i] = z1
                i += 1
            else:
                self._spare = z1
        return out


def _noise(noise: NoiseSpec, n: int) -> np.ndarray:
    if noise.sigma == 0:
        return np.zeros(n)
    return noise.sigma * GaussianStream(noise.seed).normals(n)


def _time_grid(n_points, t_max_us):
    if int(n_points) != n_points or n_points < MIN_TRACE_POINTS:
        raise InputError(f"n_points must be an integer >= {MIN_TRACE_POINTS}")
    if not (t_max_us > 0 and math.isfinite(t_max_us)):
        raise InputError("t_max_us must be positive")
    return np.linspace(0.0, t_max_us, int(n_points))


def gen_t1_trace(t1_us, n_points=201, t_max_us=80.0, amplitude=1.0, offset=0.0,
                 noise: NoiseSpec = NoiseSpec()) -> TimeTrace:
    """A exp(-t/T1) + B plus seeded noise on a uniform delay grid starting at 0."""
    if not t1_us > 0:
        raise InputError("t1_us must be positive")
    x = _time_grid(n_points, t_max_us)
    y = exp_decay(x, (amplitude, t1_us, offset)) + _noise(noise, x.size)
    return TimeTrace(TraceKind.T1_DECAY, x, y,
                     {"t1_us": t1_us, "amplitude": amplitude, "offset": offset,
                      "sigma": noise.sigma, "seed": noise.seed})


def gen_ramsey_trace(t2_us, detuning_mhz, n_points=401, t_max_us=10.0, amplitude=0.5,
                     offset=0.5, phase=0.0, noise: NoiseSpec = NoiseSpec(),
                     kind=TraceKind.RAMSEY) -> TimeTrace:
    """A exp(-t/T2) cos(2 pi dnu t + phi) + B plus noise (Ramsey or echo)."""
    kind = TraceKind(kind)
    if kind not in (TraceKind.RAMSEY, TraceKind.ECHO):
        raise InputError("kind must be ramsey or echo")
    if not t2_us > 0:
        raise InputError("t2_us must be positive")
    x = _time_grid(n_points, t_max_us)
    y = damped_cosine(x, (amplitude, t2_us, detuning_mhz, phase, offset)) + _noise(noise, x.size)
    return TimeTrace(kind, x, y,
                     {"t2_us": t2_us, "detuning_mhz": detuning_mhz, "amplitude": amplitude,
                      "offset": offset, "phase": phase, "sigma": noise.sigma,
                      "seed": noise.seed})


def gen_resonance_sweep(f0, kappa, span, n=401, peak=1.0, offset=0.0,
                        noise: NoiseSpec = NoiseSpec()) -> TimeTrace:
    """Power-Lorentzian resonance sampled on ``n`` points over ``f0 +- span/2`` (GHz)."""
    if not (kappa > 0 and span > 0):
        raise InputError("kappa and span must be positive")
    if span < 10 * kappa:
        raise InputError(f"span {span} GHz is narrower than 10 kappa = {10 * kappa} GHz")
    if int(n) != n or n < MIN_TRACE_POINTS:
        raise InputError(f"n must be an integer >= {MIN_TRACE_POINTS}")
    x = np.linspace(f0 - span / 2, f0 + span / 2, int(n))
    y = lorentzian(x, (f0, kappa, peak, offset)) + _noise(noise, x.size)
    return TimeTrace(TraceKind.RESONANCE, x, y,
                     {"f0_ghz": f0, "kappa_ghz": kappa, "peak": peak, "offset": offset,
                      "sigma": noise.sigma, "seed": noise.seed})


def gen_flux_map(device: DeviceParams, f_r: float, kappa: float, g: float, flux,
                 probe, cutoff: int = DEFAULT_CUTOFF, noise: NoiseSpec = NoiseSpec()
                 ) -> np.ndarray:
    """Transmission magnitude on a (flux, probe frequency) grid.

    Each flux column holds two Lorentzian lines of width ``kappa`` at the
    dressed frequencies, weighted by their photon-like fraction, so a
    far-detuned qubit leaves a single line near ``f_r``.

    Returns
    -------
    ndarray of shape (len(flux), len(probe))
    """
    flux = np.asarray(flux, dtype=float)
    probe = np.asarray(probe, dtype=float)
    if flux.ndim != 1 or flux.size < 2 or np.any(np.diff(flux) <= 0):
        raise InputError("flux grid must be strictly increasing with >= 2 points")
    if probe.ndim != 1 or probe.size < 2 or np.any(np.diff(probe) <= 0):
        raise InputError("probe grid must be strictly increasing with >= 2 points")
    if not np.allclose(np.diff(flux), flux[1] - flux[0], rtol=1e-9, atol=1e-15):
        raise InputError("flux grid must be uniform")
    curve = spectrum_sweep(device, float(flux[0]), float(flux[-1]), flux.size, cutoff)
    out = np.empty((flux.size, probe.size))
    for i, wq in enumerate(curve.omega01):
        sys = CoupledSystem(f_r, float(wq), g, kappa)
        up, lo = dressed_frequencies(sys)
        w_up, w_lo = resonator_weight(sys)
        out[i] = (w_up * lorentzian(probe, (up, kappa, 1.0, 0.0))
                  + w_lo * lorentzian(probe, (lo, kappa, 1.0, 0.0)))
    if noise.sigma:
        out = out + _noise(noise, out.size).reshape(out.shape)
    return out


def gen_t1_series(mean_us, sigma_us, n, seed=0, outlier_fraction=0.0,
                  return_mask=False):
    """Repeated T1 values: ``n`` Gaussian draws, some replaced by low-side outliers.

    round(outlier_fraction * n) entries at seeded positions are replaced by
    values drawn uniformly from [mean - 8 sigma, mean - 4 sigma]. Non-positive
    values are redrawn.

    Returns
    -------
    ndarray, or (ndarray, bool mask of outliers) when ``return_mask``.
    """
    if int(n) != n or n < 1:
        raise InputError("n must be a positive integer")
    if not (sigma_us >= 0 and mean_us > 0):
        raise InputError("need mean > 0 and sigma >= 0")
    if not 0 <= outlier_fraction < 1:
        raise InputError("outlier_fraction must lie in [0, 1)")
    n = int(n)
    stream = GaussianStream(seed)
    values = np.empty(n)
    for i in range(n):
        v = mean_us + sigma_us * stream.normals(1)[0]
        while v <= 0:
            v = mean_us + sigma_us * stream.normals(1)[0]
        values[i] = v
    mask = np.zeros(n, dtype=bool)
    k = int(round(outlier_fraction * n))
    if k:
        # seeded partial Fisher-Yates shuffle picks the outlier slots
        order = list(range(n))
        u = stream.uniforms(k)
        for j in range(k):
            r = j + int(u[j] * (n - j))
            order[j], order[r] = order[r], order[j]
        lo, hi = mean_us - 8 * sigma_us, mean_us - 4 * sigma_us
        for idx in order[:k]:
            v = 0.0
            while v <= 0:
                v = lo + (hi - lo) * stream.uniforms(1)[0]
                if hi <= 0:
                    v = mean_us * stream.uniforms(1)[0]
            values[idx] = v
            mask[idx] = True
    return (values, mask) if return_mask else values
