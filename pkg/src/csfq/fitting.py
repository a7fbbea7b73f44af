"""Fits of the four measurement models and Gaussian statistics of repeated values.

Time traces use us on the abscissa (detunings in MHz), resonance sweeps use GHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import ConvergenceError, InputError
from .lsq import FitResult, least_squares_core

MIN_TRACE_POINTS = 8
MIN_STATS_VALUES = 20


class TraceKind(str, Enum):
    T1_DECAY = "t1"
    RAMSEY = "ramsey"
    ECHO = "echo"
    RESONANCE = "resonance"


@dataclass(frozen=True)
class TimeTrace:
    """Sampled signal ``y`` against delay (us) or probe frequency (GHz) ``x``."""

    kind: TraceKind
    x: np.ndarray
    y: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = TraceKind(self.kind)
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise InputError("x and y must be 1-d arrays of equal length")
        if x.size < MIN_TRACE_POINTS:
            raise InputError(f"a trace needs at least {MIN_TRACE_POINTS} points, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InputError("trace contains non-finite values")
        if np.any(np.diff(x) <= 0):
            raise InputError("x must be strictly increasing")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


# --- models --------------------------------------------------------------

def exp_decay(x, p):
    amplitude, t1, offset = p
    return amplitude * np.exp(-x / t1) + offset


def damped_cosine(x, p):
    amplitude, t2, detuning, phase, offset = p
    return amplitude * np.exp(-x / t2) * np.cos(2 * np.pi * detuning * x + phase) + offset


def lorentzian(x, p):
    """Power Lorentzian with full width at half maximum ``kappa``."""
    f0, kappa, peak, offset = p
    hw2 = kappa * kappa / 4
    return peak * hw2 / ((x - f0) ** 2 + hw2) + offset


def gaussian(x, p):
    amplitude, mean, sigma = p
    return amplitude * np.exp(-0.5 * ((x - mean) / sigma) ** 2)


EXP_NAMES = ("amplitude", "t1_us", "offset")
SIN_NAMES = ("amplitude", "t2_us", "detuning_mhz", "phase", "offset")
LOR_NAMES = ("f0_ghz", "kappa_ghz", "peak", "offset")
GAUSS_NAMES = ("amplitude", "mean", "sigma")


def _require_kind(trace, *kinds):
    if not isinstance(trace, TimeTrace):
        raise InputError("expected a TimeTrace")
    if trace.kind not in kinds:
        raise InputError(f"trace kind {trace.kind.value!r} not valid here; "
                         f"expected {', '.join(k.value for k in kinds)}")


def _require_signal(y):
    if np.ptp(y) == 0:
        raise ConvergenceError("constant signal: nothing to fit")


def _guess(names, auto, initial):
    if initial is None:
        return [auto[n] for n in names]
    unknown = set(initial) - set(names)
    if unknown:
        raise InputError(f"unknown initial-guess keys: {', '.join(sorted(unknown))}")
    return [float(initial.get(n, auto[n])) for n in names]


def _finish(result: FitResult, what: str) -> FitResult:
    if not result.converged:
        raise ConvergenceError(f"{what} fit did not converge: {result.message}", result)
    return result


def _transform(result: FitResult, names, values, jac_diag, warnings=()) -> FitResult:
    """Re-express a fit in new parameters related by a diagonal linear map."""
    T = np.diag(jac_diag)
    cov = T @ result.covariance @ T
    sig = np.sqrt(np.clip(np.diag(cov), 0, None))
    return replace(result, names=tuple(names),
                   params={n: float(v) for n, v in zip(names, values)},
                   sigmas={n: float(s) for n, s in zip(names, sig)},
                   covariance=cov, warnings=tuple(result.warnings) + tuple(warnings))


# --- exponential decay ---------------------------------------------------

def _linear_amp_offset(basis, y):
    """Least-squares coefficients of y ~ basis @ c + offset."""
    M = np.column_stack([*basis, np.ones_like(y)])
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    res = y - M @ coef
    return coef, float(res @ res)


def _decay_guess(x, y):
    n_tail = max(2, x.size // 10)
    offset = float(np.mean(y[-n_tail:]))
    amp = float(y[0] - offset)
    t = x - x[0]
    span = float(t[-1])
    t1 = span / 3
    if amp != 0:
        frac = (y - offset) / amp
        below = np.nonzero(frac <= 1 / math.e)[0]
        if below.size and below[0] > 0:
            k = below[0]
            # linear interpolation of the 1/e crossing
            f0, f1 = frac[k - 1], frac[k]
            w = (f0 - 1 / math.e) / (f0 - f1) if f0 != f1 else 0.0
            t1 = float(t[k - 1] + w * (t[k] - t[k - 1]))
    t1 = max(t1, span / 50)
    (a, b), _ = _linear_amp_offset([np.exp(-x / t1)], y)
    return {"amplitude": float(a), "t1_us": t1, "offset": float(b)}


def fit_exponential_decay(trace: TimeTrace, initial: dict | None = None, **core) -> FitResult:
    """Fit A exp(-t/T1) + B.

    Raises
    ------
    ConvergenceError
        Constant signal, non-convergence, or a non-positive fitted T1.
    """
    _require_kind(trace, TraceKind.T1_DECAY)
    _require_signal(trace.y)
    p0 = _guess(EXP_NAMES, _decay_guess(trace.x, trace.y), initial)
    res = least_squares_core(exp_decay, p0, (trace.x, trace.y), names=EXP_NAMES, **core)
    if res.params["t1_us"] <= 0:
        raise ConvergenceError("fitted T1 is not positive", res)
    return _finish(res, "exponential decay")


# --- damped sinusoid -----------------------------------------------------

def _spectral_power(x, y, freqs):
    ph = np.exp(-2j * np.pi * np.outer(freqs, x))
    return np.abs(ph @ y) ** 2


def dominant_frequency(x, y, lo=None, hi=None) -> float:
    """Strongest spectral component (cycles per x unit) of the mean-subtracted signal.

    A zero-padded FFT locates the peak, then a fine direct DFT scan refines
    it. ``lo``/``hi`` restrict the search window.
    """
    yc = y - np.mean(y)
    dx = float(np.median(np.diff(x)))
    span = float(x[-1] - x[0])
    nyq = 0.5 / dx
    lo = 0.5 / span if lo is None else max(lo, 1e-12)
    hi = nyq if hi is None else min(hi, nyq)
    if not lo < hi:
        raise InputError("empty frequency search window")
    if (hi - lo) < 64 / span:
        coarse = np.linspace(lo, hi, 257)
    else:
        nfft = 8 * int(2 ** math.ceil(math.log2(x.size)))
        grid = np.interp(np.arange(x.size) * dx + x[0], x, yc)
        spec = np.abs(np.fft.rfft(grid, nfft)) ** 2
        freqs = np.fft.rfftfreq(nfft, dx)
        mask = (freqs >= lo) & (freqs <= hi)
        if not np.any(mask):
            raise InputError("no spectral bins inside the search window")
        coarse = freqs[mask]
        k = int(np.argmax(spec[mask]))
        df = freqs[1] - freqs[0]
        coarse = np.linspace(max(lo, coarse[k] - df), min(hi, coarse[k] + df), 65)
    power = _spectral_power(x, yc, coarse)
    f = coarse[int(np.argmax(power))]
    step = coarse[1] - coarse[0]
    fine = np.linspace(f - step, f + step, 65)
    return float(fine[int(np.argmax(_spectral_power(x, yc, fine)))])


def _sinusoid_guess(x, y, detuning, t2=None):
    span = float(x[-1] - x[0])
    w = 2 * np.pi * detuning
    candidates = [t2] if t2 else [span * c for c in (0.05, 0.1, 0.2, 0.35, 0.5, 1.0, 2.0, 5.0)]
    best = None
    for t in candidates:
        env = np.exp(-x / t)
        coef, ssr = _linear_amp_offset([env * np.cos(w * x), env * np.sin(w * x)], y)
        if best is None or ssr < best[0]:
            best = (ssr, t, coef)
    _, t, (a, b, c) = best
    return {"amplitude": float(math.hypot(a, b)), "t2_us": float(t),
            "detuning_mhz": float(detuning), "phase": float(math.atan2(-b, a)),
            "offset": float(c)}


def _wrap_phase(phi):
    phi = math.remainder(phi, 2 * math.pi)
    return math.pi if phi == -math.pi else phi


def fit_damped_sinusoid(trace: TimeTrace, initial: dict | None = None, **core) -> FitResult:
    """Fit A exp(-t/T2) cos(2 pi dnu t + phi) + B to a Ramsey or echo trace.

    The detuning starts from the dominant spectral component; a supplied
    detuning guess is polished by a spectral search within +-50 % of it.
    Results are normalized to A > 0, dnu > 0 and phi in (-pi, pi].

    Raises
    ------
    ConvergenceError
        Constant signal, fewer than two sampled oscillation periods,
        non-convergence, or a non-positive fitted T2.
    """
    _require_kind(trace, TraceKind.RAMSEY, TraceKind.ECHO)
    x, y = trace.x, trace.y
    _require_signal(y)
    span = float(x[-1] - x[0])
    given = (initial or {}).get("detuning_mhz")
    if given is not None:
        g = abs(float(given))
        detuning = dominant_frequency(x, y, 0.5 * g, 1.5 * g)
    else:
        detuning = dominant_frequency(x, y)
    if detuning * span < 2:
        raise ConvergenceError(
            f"fewer than two oscillation periods sampled ({detuning * span:.2f})")
    t2_given = (initial or {}).get("t2_us")
    auto = _sinusoid_guess(x, y, detuning, t2_given)
    p0 = _guess(SIN_NAMES, auto, initial)
    p0[2] = detuning
    res = least_squares_core(damped_cosine, p0, (x, y), names=SIN_NAMES, **core)
    a, t2, nu, phi, b = res.values()
    signs = np.ones(5)
    if nu < 0:
        nu, phi = -nu, -phi
        signs[2] = signs[3] = -1
    if a < 0:
        a, phi = -a, phi + math.pi
        signs[0] = -1
    res = _transform(res, SIN_NAMES, [a, t2, nu, _wrap_phase(phi), b], signs)
    if t2 <= 0:
        raise ConvergenceError("fitted T2 is not positive", res)
    if res.converged and res.residual_rms > 0 and a < 3 * res.sigmas["amplitude"]:
        res = replace(res, warnings=res.warnings + ("amplitude consistent with zero; "
                                                    "oscillation parameters degenerate",))
    return _finish(res, "damped sinusoid")


# --- Lorentzian ----------------------------------------------------------

def _lorentzian_guess(u, y):
    offset = float(np.percentile(y, 10))
    k = int(np.argmax(y))
    peak = float(y[k] - offset)
    half = offset + peak / 2
    left = k
    while left > 0 and y[left] > half:
        left -= 1
    right = k
    while right < y.size - 1 and y[right] > half:
        right += 1

    def cross(i, j):
        if y[i] == y[j]:
            return u[i]
        return u[i] + (half - y[i]) * (u[j] - u[i]) / (y[j] - y[i])

    if y[left] <= half and y[right] <= half and right > left:
        kappa = cross(left, left + 1) - cross(right - 1, right)
        kappa = abs(kappa)
    else:
        kappa = (u[-1] - u[0]) / 10
    if kappa <= 0:
        kappa = (u[-1] - u[0]) / 10
    return {"f0_ghz": float(u[k]), "kappa_ghz": float(kappa), "peak": peak, "offset": offset}, k


def fit_lorentzian(trace: TimeTrace, initial: dict | None = None, **core) -> FitResult:
    """Fit peak (kappa^2/4)/((f - f0)^2 + kappa^2/4) + offset to a resonance sweep.

    Internally the fit runs on a MHz axis centered on the sweep midpoint;
    reported values and covariance are converted back to GHz. A peak at the
    sweep boundary is reported in ``warnings``.
    """
    _require_kind(trace, TraceKind.RESONANCE)
    x, y = trace.x, trace.y
    _require_signal(y)
    center = 0.5 * (x[0] + x[-1])
    u = (x - center) * 1e3
    auto, k = _lorentzian_guess(u, y)
    if initial is not None:
        initial = dict(initial)
        if "f0_ghz" in initial:
            initial["f0_ghz"] = (initial["f0_ghz"] - center) * 1e3
        if "kappa_ghz" in initial:
            initial["kappa_ghz"] = initial["kappa_ghz"] * 1e3
    p0 = _guess(LOR_NAMES, auto, initial)
    res = least_squares_core(lorentzian, p0, (u, y), names=LOR_NAMES, **core)
    u0, kap, peak, off = res.values()
    warnings = []
    if k <= 1 or k >= y.size - 2 or not (u[0] + abs(kap) < u0 < u[-1] - abs(kap)):
        warnings.append("peak at sweep boundary")
    res = _transform(res, LOR_NAMES, [center + u0 * 1e-3, abs(kap) * 1e-3, peak, off],
                     [1e-3, 1e-3 if kap >= 0 else -1e-3, 1.0, 1.0], warnings)
    return _finish(res, "Lorentzian")


# --- Gaussian ------------------------------------------------------------

def fit_gaussian(x, y, initial: dict | None = None, **core) -> FitResult:
    """Fit amplitude exp(-(x - mean)^2 / (2 sigma^2)); sigma reported positive."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _require_signal(y)
    w = np.clip(y, 0, None)
    total = w.sum()
    mean = float((w * x).sum() / total) if total > 0 else float(np.mean(x))
    var = float((w * (x - mean) ** 2).sum() / total) if total > 0 else float(np.var(x))
    auto = {"amplitude": float(np.max(y)), "mean": mean,
            "sigma": math.sqrt(var) if var > 0 else float(np.ptp(x)) / 4}
    p0 = _guess(GAUSS_NAMES, auto, initial)
    res = least_squares_core(gaussian, p0, (x, y), names=GAUSS_NAMES, **core)
    a, m, s = res.values()
    res = _transform(res, GAUSS_NAMES, [a, m, abs(s)], [1.0, 1.0, 1.0 if s >= 0 else -1.0])
    return _finish(res, "Gaussian")


@dataclass(frozen=True)
class HistogramStats:
    """Histogram of repeated values with the fitted Gaussian.

    ``method`` is "histogram fit" normally and "moments" when the Gaussian
    fit over the bins fails (e.g. a bimodal histogram); ``fit`` is then None
    and mean and sigma are the sample moments.
    """

    values: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    mean: float
    sigma: float
    amplitude: float
    mean_err: float
    sigma_err: float
    outliers: tuple
    fit: FitResult | None
    method: str = "histogram fit"
    warnings: tuple = ()

    def to_dict(self) -> dict:
        return {
            "n": int(self.values.size),
            "method": self.method,
            "mean": self.mean,
            "sigma": self.sigma,
            "mean_err": self.mean_err,
            "sigma_err": self.sigma_err,
            "amplitude": self.amplitude,
            "bin_edges": self.bin_edges.tolist(),
            "counts": self.counts.tolist(),
            "outliers": list(self.outliers),
            "outlier_values": self.values[list(self.outliers)].tolist(),
            "converged": None if self.fit is None else self.fit.converged,
            "iterations": None if self.fit is None else self.fit.iterations,
            "warnings": list(self.warnings),
        }


def gaussian_stats(values, bins: int | str | None = None, outlier_sigmas: float = 3.0
                   ) -> HistogramStats:
    """Histogram ``values`` and fit a Gaussian over the bin centers.

    Parameters
    ----------
    values : sequence of float
        At least 20 values.
    bins : int or "sqrt", optional
        Bin count; the default is ceil(sqrt(n)).
    outlier_sigmas : float
        Values outside mean +- outlier_sigmas * sigma (fitted) are outliers.
    """
    v = np.array(values, dtype=float)
    if v.ndim != 1 or v.size < MIN_STATS_VALUES:
        raise InputError(f"need at least {MIN_STATS_VALUES} values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise InputError("values must be finite")
    if np.ptp(v) == 0:
        raise InputError("all values are identical")
    if bins is None or bins == "sqrt":
        nbins = math.ceil(math.sqrt(v.size))
    else:
        nbins = int(bins)
        if nbins < 3:
            raise InputError("need at least 3 bins")
    counts, edges = np.histogram(v, bins=nbins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    med = float(np.median(v))
    mad = 1.4826 * float(np.median(np.abs(v - med)))
    init = {"amplitude": float(counts.max()), "mean": med,
            "sigma": mad if mad > 0 else float(np.std(v))}
    warnings = ()
    try:
        fit = fit_gaussian(centers, counts.astype(float), init)
        if not fit.params["sigma"] > 0:
            raise ConvergenceError("fitted Gaussian width is not positive", fit)
        mean, sigma = fit.params["mean"], fit.params["sigma"]
        amplitude = fit.params["amplitude"]
        mean_err, sigma_err = fit.sigmas["mean"], fit.sigmas["sigma"]
        method = "histogram fit"
    except ConvergenceError as exc:
        fit = None
        method = "moments"
        warnings = (f"Gaussian fit to the histogram failed ({exc}); "
                    "using sample mean and standard deviation",)
        mean, sigma = float(np.mean(v)), float(np.std(v, ddof=1))
        amplitude = v.size * (edges[1] - edges[0]) / (sigma * math.sqrt(2 * math.pi))
        mean_err, sigma_err = sigma / math.sqrt(v.size), sigma / math.sqrt(2 * (v.size - 1))
    lo, hi = mean - outlier_sigmas * sigma, mean + outlier_sigmas * sigma
    outliers = tuple(int(i) for i in np.nonzero((v < lo) | (v > hi))[0])
    v.setflags(write=False)
    return HistogramStats(v, edges, counts, mean, sigma, amplitude, mean_err, sigma_err,
                          outliers, fit, method, warnings)
