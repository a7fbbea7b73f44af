"""Charge-basis spectrum of the three-junction capacitively-shunted flux qubit.

Coordinates are the phases across the two large junctions; fluxoid
quantization puts the whole flux dependence into the small-junction term,

    U = -E_J cos t1 - E_J cos t2 - alpha E_J cos(2 pi f - t1 - t2),

and the charging term is (2e)^2/2 n^T M^-1 n with

    M = [[C + C', C'], [C', C + C']],   C' = alpha C + C_S.

M is rescaled so that e^2/(2 C_sigma) equals the configured E_C, which makes
the kinetic energy 4 E_C C_sigma n^T M^-1 n with M in any capacitance unit.
Charge offsets are zero. Energies are E/h in GHz.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from .circuit import DeviceParams
from .errors import InputError, SolverError

log = logging.getLogger(__name__)

DEFAULT_CUTOFF = 12
MIN_CUTOFF = 4
#: largest tolerated change of omega01 between cutoffs N and N + 2 (GHz)
CONVERGENCE_LIMIT_GHZ = 1e-3


@dataclass(frozen=True)
class QubitHamiltonianSpec:
    """Device, reduced flux f = Phi/Phi0 and charge cutoff N (n in [-N, N] per island)."""

    device: DeviceParams
    flux_frac: float
    charge_cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if not math.isfinite(self.flux_frac):
            raise InputError(f"flux_frac must be finite, got {self.flux_frac!r}")
        if int(self.charge_cutoff) != self.charge_cutoff or self.charge_cutoff < MIN_CUTOFF:
            raise InputError(f"charge_cutoff must be an integer >= {MIN_CUTOFF}, "
                             f"got {self.charge_cutoff!r}")

    @property
    def dimension(self) -> int:
        return (2 * self.charge_cutoff + 1) ** 2

    def with_cutoff(self, N: int) -> QubitHamiltonianSpec:
        return QubitHamiltonianSpec(self.device, self.flux_frac, N)


@dataclass(frozen=True)
class EnergyLevels:
    """Ground-referenced eigenfrequencies (GHz) and the omega01 change from N to N + 2."""

    levels: tuple
    convergence_delta: float
    charge_cutoff: int

    def transition(self, i: int, j: int) -> float:
        return self.levels[j] - self.levels[i]


@dataclass(frozen=True)
class SpectrumCurve:
    flux: np.ndarray
    omega01: np.ndarray
    omega12: np.ndarray | None = None
    convergence_delta: float = 0.0
    charge_cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if np.any(np.diff(self.flux) <= 0):
            raise InputError("flux values must be strictly increasing")
        if np.any(self.omega01 <= 0):
            raise SolverError("non-positive omega01 in spectrum")

    @property
    def points(self):
        return list(zip(self.flux.tolist(), self.omega01.tolist()))


def charging_matrix(device: DeviceParams) -> np.ndarray:
    """Matrix K (GHz) with kinetic energy n^T K n, i.e. K = 4 E_C C_sigma M^-1."""
    C = device.C_large
    Cp = device.alpha * C + device.C_shunt
    M = np.array([[C + Cp, Cp], [Cp, C + Cp]])
    det = (C + Cp) ** 2 - Cp**2
    if not det > 0 or not np.isfinite(det):
        raise InputError("singular capacitance matrix")
    Minv = np.array([[C + Cp, -Cp], [-Cp, C + Cp]]) / det
    if not np.allclose(M @ Minv, np.eye(2), rtol=0, atol=1e-12):
        raise InputError("singular capacitance matrix")
    return 4.0 * device.E_C * device.C_sigma * Minv


@lru_cache(maxsize=16)
def _charge_grid(N: int):
    d = 2 * N + 1
    n = np.arange(-N, N + 1)
    n1, n2 = np.meshgrid(n, n, indexing="ij")
    n1 = n1.ravel()
    n2 = n2.ravel()
    idx = np.arange(d * d)
    # hops raising n1, n2, and both at once (only where the target stays in the box)
    up1 = idx[n1 < N]
    up2 = idx[n2 < N]
    up12 = idx[(n1 < N) & (n2 < N)]
    for a in (n1, n2, up1, up2, up12):
        a.setflags(write=False)
    return n1, n2, up1, up2, up12, d


def _hamiltonian_parts(spec: QubitHamiltonianSpec):
    """Diagonal and the upper-side hopping entries (rows, cols, values)."""
    dev = spec.device
    N = spec.charge_cutoff
    n1, n2, up1, up2, up12, d = _charge_grid(N)
    K = charging_matrix(dev)
    diag = K[0, 0] * n1**2 + 2 * K[0, 1] * n1 * n2 + K[1, 1] * n2**2

    ej = dev.E_J
    theta = 2 * math.pi * spec.flux_frac
    # <n1+1, n2+1| cos(2 pi f - t1 - t2) |n1, n2> = exp(-i 2 pi f) / 2
    hop12 = -0.5 * dev.alpha * ej * complex(math.cos(theta), -math.sin(theta))
    rows = np.concatenate([up1 + d, up2 + 1, up12 + d + 1])
    cols = np.concatenate([up1, up2, up12])
    vals = np.concatenate([
        np.full(up1.size, -0.5 * ej, dtype=complex),
        np.full(up2.size, -0.5 * ej, dtype=complex),
        np.full(up12.size, hop12, dtype=complex),
    ])
    return diag, rows, cols, vals, d * d


def build_hamiltonian(spec: QubitHamiltonianSpec) -> np.ndarray:
    """Dense Hermitian Hamiltonian (GHz) in the two-island charge basis.

    State (n1, n2) sits at index (n1 + N)(2N + 1) + (n2 + N). Every
    off-diagonal element is written together with its conjugate mirror, so
    the result is Hermitian bit for bit.
    """
    diag, rows, cols, vals, dim = _hamiltonian_parts(spec)
    H = np.zeros((dim, dim), dtype=complex)
    H[np.arange(dim), np.arange(dim)] = diag
    H[rows, cols] = vals
    H[cols, rows] = vals.conj()
    return H


def _sparse_hamiltonian(spec):
    diag, rows, cols, vals, dim = _hamiltonian_parts(spec)
    r = np.concatenate([np.arange(dim), rows, cols])
    c = np.concatenate([np.arange(dim), cols, rows])
    v = np.concatenate([diag.astype(complex), vals, vals.conj()])
    return sp.csr_matrix((v, (r, c)), shape=(dim, dim)), diag, vals


def _lowest_eigenvalues(spec: QubitHamiltonianSpec, k: int, method: str) -> np.ndarray:
    dim = spec.dimension
    if method == "sparse" and k < dim - 1:
        H, diag, vals = _sparse_hamiltonian(spec)
        # Gershgorin bound puts the shift below the whole spectrum, so the
        # eigenvalues nearest to it are the lowest ones
        row_abs = np.asarray(abs(H).sum(axis=1)).ravel() - np.abs(diag)
        sigma = float(np.min(diag - row_abs)) - 1.0
        v0 = np.random.default_rng(0).standard_normal(dim).astype(complex)
        try:
            w = spla.eigsh(H, k=k, sigma=sigma, which="LM", tol=0, v0=v0,
                           return_eigenvectors=False)
            return np.sort(w.real)
        except (spla.ArpackNoConvergence, spla.ArpackError, RuntimeError) as exc:
            log.warning("sparse eigensolver failed at f=%s N=%s (%s); using dense",
                        spec.flux_frac, spec.charge_cutoff, exc)
    elif method not in ("sparse", "dense"):
        raise InputError(f"unknown eigensolver method {method!r}")
    try:
        return sla.eigh(build_hamiltonian(spec), eigvals_only=True,
                        subset_by_index=[0, k - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"eigensolver failed at flux {spec.flux_frac} with cutoff "
                          f"{spec.charge_cutoff} (dimension {dim}): {exc}") from exc


def eigenlevels(spec: QubitHamiltonianSpec, k: int = 3, *, method: str = "sparse",
                check_convergence: bool = True) -> EnergyLevels:
    """Lowest ``k`` levels relative to the ground state.

    ``convergence_delta`` is |omega01(N) - omega01(N + 2)|; exceeding
    :data:`CONVERGENCE_LIMIT_GHZ` raises :class:`SolverError`.
    """
    if not 1 <= k <= spec.dimension:
        raise InputError(f"k must be in [1, {spec.dimension}], got {k!r}")
    kk = max(k, 2)
    e = _lowest_eigenvalues(spec, kk, method)
    if not np.all(np.isfinite(e)):
        raise SolverError(f"non-finite eigenvalues at flux {spec.flux_frac}")
    levels = e - e[0]
    delta = 0.0
    if check_convergence:
        e2 = _lowest_eigenvalues(spec.with_cutoff(spec.charge_cutoff + 2), 2, method)
        delta = abs((e2[1] - e2[0]) - levels[1])
        if delta > CONVERGENCE_LIMIT_GHZ:
            raise SolverError(
                f"charge cutoff {spec.charge_cutoff} not converged at flux {spec.flux_frac}: "
                f"omega01 moves by {delta * 1e3:.3g} MHz at N+2")
    return EnergyLevels(tuple(float(x) for x in levels[:k]), float(delta), spec.charge_cutoff)


def transition_frequency(spec: QubitHamiltonianSpec, i: int, j: int, **kwargs) -> float:
    """Frequency (GHz) of the i -> j transition."""
    if i < 0 or j < 0 or i > j or j >= spec.dimension:
        raise InputError(f"transition indices out of range: ({i}, {j})")
    if i == j:
        return 0.0
    return eigenlevels(spec, j + 1, **kwargs).transition(i, j)


def anharmonicity(device: DeviceParams, f: float, cutoff: int = DEFAULT_CUTOFF,
                  **kwargs) -> float:
    """omega12 - omega01 in GHz."""
    lv = eigenlevels(QubitHamiltonianSpec(device, f, cutoff), 3, **kwargs).levels
    return (lv[2] - lv[1]) - lv[1]


def flux_grid(f_start: float, f_end: float, n_points: int) -> np.ndarray:
    if not f_start < f_end:
        raise InputError("f_start must be smaller than f_end")
    if int(n_points) != n_points or n_points < 2:
        raise InputError("n_points must be an integer >= 2")
    return np.linspace(f_start, f_end, int(n_points))


def spectrum_sweep(device: DeviceParams, f_start: float, f_end: float, n_points: int,
                   cutoff: int = DEFAULT_CUTOFF, *, higher: bool = False,
                   check_convergence: bool = True, workers: int | None = None,
                   method: str = "sparse") -> SpectrumCurve:
    """omega01 (and optionally omega12) on a uniform flux grid.

    Flux points are independent; ``workers > 1`` evaluates them on a thread
    pool. Results do not depend on the number of workers.
    """
    grid = flux_grid(f_start, f_end, n_points)
    QubitHamiltonianSpec(device, float(grid[0]), cutoff)  # validate once up front

    def point(f):
        spec = QubitHamiltonianSpec(device, float(f), cutoff)
        try:
            lv = eigenlevels(spec, 3 if higher else 2, method=method,
                             check_convergence=check_convergence)
        except SolverError as exc:
            raise SolverError(f"spectrum failed at flux {float(f)!r}: {exc}") from exc
        return lv

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, grid))
    else:
        results = [point(f) for f in grid]

    w01 = np.array([r.levels[1] for r in results])
    w12 = np.array([r.levels[2] - r.levels[1] for r in results]) if higher else None
    delta = max(r.convergence_delta for r in results)
    return SpectrumCurve(grid, w01, w12, delta, cutoff)


def find_flux_for_frequency(device: DeviceParams, target_ghz: float, f_lo: float,
                            f_hi: float, cutoff: int = DEFAULT_CUTOFF,
                            xtol: float = 1e-10) -> float:
    """Flux in [f_lo, f_hi] where omega01 equals ``target_ghz`` (bracketing root search)."""

    def gap(f):
        spec = QubitHamiltonianSpec(device, f, cutoff)
        return eigenlevels(spec, 2, check_convergence=False).levels[1] - target_ghz

    g_lo, g_hi = gap(f_lo), gap(f_hi)
    if g_lo * g_hi > 0:
        raise InputError(f"omega01 does not cross {target_ghz} GHz in [{f_lo}, {f_hi}]")
    return brentq(gap, f_lo, f_hi, xtol=xtol)
