"""Acceptance criteria 1-10, one test each.

Each test prints a single ``criterion N: PASS|FAIL ...`` line (also echoed in
the pytest terminal summary). Run alone with::

    pytest tests/test_acceptance.py -v
"""

from __future__ import annotations

import itertools
import subprocess
import sys
import time

import numpy as np

from csfq.cavity import CoupledSystem, dressed_frequencies
from csfq.circuit import (charging_energy, critical_current_from_ej,
                          josephson_energy_from_critical_current, scale_shunt_capacitance,
                          total_junction_capacitance)
from csfq.fitting import (fit_damped_sinusoid, fit_exponential_decay, fit_gaussian,
                          fit_lorentzian, gaussian, gaussian_stats)
from csfq.losses import (CoherenceSet, ResonatorParams, combine_q, internal_q, loaded_q,
                         loss_report, loss_tangent, pure_dephasing_time, qubit_quality_factor,
                         t2_from_components)
from csfq.spectrum import QubitHamiltonianSpec, build_hamiltonian, eigenlevels, spectrum_sweep
from csfq.synth import (GaussianStream, NoiseSpec, gen_ramsey_trace, gen_resonance_sweep,
                        gen_t1_series, gen_t1_trace)

from .conftest import ACCEPTANCE_LINES

F_R = 9.796
KAPPA = 0.697e-3
IL_DB = 0.461
F01_MEASURED = 6.61
T1_MEAN = 16.3
T2_MEAN = 21.5


def report(n, checks, extra=""):
    """Record and print one line for criterion ``n``; ``checks`` maps label -> bool."""
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
    if extra:
        line += f"  {extra}"
    if failed:
        line += f"  failed: {', '.join(failed)}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_1_spectrum(device):
    t0 = time.perf_counter()
    curve = spectrum_sweep(device, 0.45, 0.55, 201, 12)
    elapsed = time.perf_counter() - t0
    w = curve.omega01
    mid = 100
    sym = np.max(np.abs(w - w[::-1]) / w)
    checks = {
        "midpoint is f=0.5": curve.flux[mid] == 0.5,
        "omega01(0.5) within 5% of 6.61": rel(w[mid], 6.61) <= 0.05,
        "argmin at f=0.5": int(np.argmin(w)) == mid,
        "symmetric to 1e-6": sym <= 1e-6,
        "runtime under 60 s": elapsed < 60,
    }
    report(1, checks, f"omega01(0.5)={w[mid]:.6f} GHz, asym={sym:.1e}, {elapsed:.1f} s")


def test_criterion_2_detuning():
    delta = -CoupledSystem(F_R, F01_MEASURED, 0.09, KAPPA).detuning
    report(2, {"|delta - 3.19| <= 0.01": abs(delta - 3.19) <= 0.01}, f"delta={delta:.4f} GHz")


def test_criterion_3_resonator_chain():
    ql = loaded_q(F_R, KAPPA)
    qi = internal_q(ql, IL_DB)
    td = loss_tangent(qi)
    checks = {
        "Q_L 1.405e4 +-0.1%": rel(ql, 1.405e4) <= 1e-3,
        "Q_int 2.72e5 +-1%": rel(qi, 2.72e5) <= 1e-2,
        "tan_delta 3.68e-6 +-1%": rel(td, 3.68e-6) <= 1e-2,
    }
    report(3, checks, f"Q_L={ql:.1f} Q_int={qi:.0f} tan_delta={td:.4e}")


def test_criterion_4_loss_budget(device):
    resonator = ResonatorParams(F_R, KAPPA, IL_DB)
    coherence = CoherenceSet(T1_MEAN, T2_MEAN, F01_MEASURED)
    coupled = CoupledSystem(F_R, F01_MEASURED, 0.09, KAPPA)
    b = loss_report(device, resonator, coherence, coupled, c_shunt_ff=52.7)["budget"]
    checks = {
        "P_Si 0.662 +-0.3%": rel(b["p_si"], 0.662) <= 3e-3,
        "Q_cap 4.10e5 +-1%": rel(b["Q_cap"], 4.10e5) <= 1e-2,
        "T1 budget 9.88 us +-1.5%": rel(b["t1_budget_us"], 9.88) <= 1.5e-2,
        "Purcell in [270, 310] us": 270 <= b["purcell_t1_us"] <= 310,
    }
    report(4, checks, f"P_Si={b['p_si']:.5f} Q_cap={b['Q_cap']:.0f} "
                      f"T1={b['t1_budget_us']:.3f} us Purcell={b['purcell_t1_us']:.1f} us")


def test_criterion_5_quality_factors():
    q1 = qubit_quality_factor(F01_MEASURED, T1_MEAN)
    q2 = qubit_quality_factor(F01_MEASURED, T2_MEAN)
    tphi = pure_dephasing_time(T1_MEAN, T2_MEAN)
    checks = {
        "Q1 6.77e5 +-0.5%": rel(q1, 6.77e5) <= 5e-3,
        "Q2 8.93e5 +-0.5%": rel(q2, 8.93e5) <= 5e-3,
        "T_phi 63.14 us +-0.5%": rel(tphi, 63.14) <= 5e-3,
    }
    report(5, checks, f"Q1={q1:.0f} Q2={q2:.0f} T_phi={tphi:.3f} us")


def test_criterion_6_circuit_arithmetic():
    cj = total_junction_capacitance(0.36, 31.2)
    cs = scale_shunt_capacitance(51.0, 11.5, 11.9)
    ec = charging_energy(79.6)
    checks = {
        "C_J 26.8 fF +-0.2%": rel(cj, 26.8) <= 2e-3,
        "C_S 52.77 fF +-0.2%": rel(cs, 52.77) <= 2e-3,
        "E_C 0.244 GHz +-1%": rel(ec, 0.244) <= 1e-2,
    }
    report(6, checks, f"C_J={cj:.3f} fF C_S={cs:.3f} fF E_C={ec:.5f} GHz")


# --- criterion 7 ---------------------------------------------------------

T1_TRUTH = dict(amplitude=1.0, t1_us=18.25, offset=0.05)
RAMSEY_TRUTH = dict(amplitude=0.5, t2_us=3.33, detuning_mhz=5.0, phase=0.3, offset=0.5)
ECHO_TRUTH = dict(amplitude=0.5, t2_us=23.2, detuning_mhz=5.0, phase=0.3, offset=0.5)
LOR_TRUTH = dict(f0_ghz=F_R, kappa_ghz=KAPPA, peak=1.0, offset=0.02)
GAUSS_TRUTH = dict(amplitude=10.0, mean=16.3, sigma=1.73)
# location parameters are perturbed by 20% of the line width, not of their value
LOCATION_SCALE = {"f0_ghz": KAPPA, "mean": 1.73}
GAUSS_X = np.linspace(16.3 - 5 * 1.73, 16.3 + 5 * 1.73, 101)


def _traces(seed, noisy):
    def ns(amplitude):
        return NoiseSpec(0.02 * amplitude if noisy else 0.0, seed)

    gauss_y = gaussian(GAUSS_X, tuple(GAUSS_TRUTH.values()))
    if noisy:
        gauss_y = gauss_y + 0.02 * GAUSS_TRUTH["amplitude"] * GaussianStream(seed).normals(
            GAUSS_X.size)
    return {
        "exponential": (gen_t1_trace(18.25, 201, 80.0, 1.0, 0.05, ns(1.0)),
                        fit_exponential_decay, T1_TRUTH),
        "ramsey": (gen_ramsey_trace(3.33, 5.0, 401, 10.0, 0.5, 0.5, 0.3, ns(0.5)),
                   fit_damped_sinusoid, RAMSEY_TRUTH),
        "echo": (gen_ramsey_trace(23.2, 5.0, 1201, 60.0, 0.5, 0.5, 0.3, ns(0.5), kind="echo"),
                 fit_damped_sinusoid, ECHO_TRUTH),
        "lorentzian": (gen_resonance_sweep(F_R, KAPPA, 20 * KAPPA, 401, 1.0, 0.02, ns(1.0)),
                       fit_lorentzian, LOR_TRUTH),
        "gaussian": ((GAUSS_X, gauss_y), lambda d, initial=None: fit_gaussian(*d, initial),
                     GAUSS_TRUTH),
    }


def _perturbed(truth, signs):
    return {k: v + s * 0.2 * LOCATION_SCALE[k] if k in LOCATION_SCALE else v * (1 + 0.2 * s)
            for (k, v), s in zip(truth.items(), signs)}


def test_criterion_7_fit_round_trips():
    t0 = time.perf_counter()
    checks = {}
    notes = []
    for name, (trace, fitter, truth) in _traces(0, noisy=False).items():
        worst = 0.0
        for signs in itertools.product((-1, 1), repeat=len(truth)):
            res = fitter(trace, initial=_perturbed(truth, signs))
            worst = max(worst, max(rel(res.params[k], v) for k, v in truth.items()))
        checks[f"{name} noiseless 1e-6"] = worst <= 1e-6
        notes.append(f"{name} err={worst:.0e}")
    covered = dict.fromkeys(_traces(0, noisy=False), 0)
    for seed in range(100):
        for name, (trace, fitter, truth) in _traces(seed, noisy=True).items():
            res = fitter(trace)
            covered[name] += all(abs(res.params[k] - v) <= 3 * res.sigmas[k]
                                 for k, v in truth.items())
    for name, n in covered.items():
        checks[f"{name} 3-sigma coverage >= 95/100"] = n >= 95
    elapsed = time.perf_counter() - t0
    checks["runtime under 60 s"] = elapsed < 60
    notes.append("coverage " + " ".join(f"{k}={v}" for k, v in covered.items()))
    report(7, checks, "; ".join(notes) + f"; {elapsed:.1f} s")


def test_criterion_8_drift_statistics():
    stats = gaussian_stats(gen_t1_series(16.3, 1.73, 100, seed=0))
    flagged = injected = 0
    for seed in range(50):
        values, mask = gen_t1_series(16.3, 1.73, 100, seed=seed, outlier_fraction=0.05,
                                     return_mask=True)
        out = set(gaussian_stats(values).outliers)
        injected += int(mask.sum())
        flagged += len(out & set(np.flatnonzero(mask).tolist()))
    rate = flagged / injected
    checks = {
        "mean within 0.6 us": abs(stats.mean - 16.3) <= 0.6,
        "sigma within 0.5 us": abs(stats.sigma - 1.73) <= 0.5,
        "outlier detection >= 80%": rate >= 0.8,
    }
    report(8, checks, f"mean={stats.mean:.3f} sigma={stats.sigma:.3f} "
                      f"detection={flagged}/{injected}")


def test_criterion_9_invariants(device):
    rng = np.random.default_rng(9)
    checks = {}
    herm = 0.0
    for f in rng.uniform(-1, 2, 5):
        H = build_hamiltonian(QubitHamiltonianSpec(device, float(f), 6))
        herm = max(herm, float(np.max(np.abs(H - H.conj().T))))
    checks["Hermiticity exact"] = herm == 0.0

    worst = 0.0
    for f in (0.46, 0.48, 0.493):
        base = eigenlevels(QubitHamiltonianSpec(device, f), 3).levels
        for g in (1 - f, f + 1):
            other = eigenlevels(QubitHamiltonianSpec(device, g), 3).levels
            worst = max(worst, max(rel(a, b) for a, b in zip(other[1:], base[1:])))
    checks["flux symmetry/periodicity 1e-6"] = worst <= 1e-6

    sum_ok = True
    for wr, wq, g in rng.uniform([1, 1, 0], [20, 20, 0.5], (200, 3)):
        up, lo = dressed_frequencies(CoupledSystem(wr, wq, g, 1e-3))
        sum_ok &= (up + lo) == (wr + wq)
    checks["dressed sum rule exact"] = bool(sum_ok)

    cq_ok = True
    for qs in rng.uniform(1e3, 1e7, (200, 3)):
        cq_ok &= combine_q(qs) <= min(qs)
    checks["combine_q <= min"] = bool(cq_ok)

    inv = 0.0
    for ic in rng.uniform(0.01, 5, 100):
        inv = max(inv, rel(critical_current_from_ej(josephson_energy_from_critical_current(ic)),
                           ic))
    for t1, frac in rng.uniform([1, 0.05], [100, 0.99], (100, 2)):
        t2 = 2 * t1 * frac
        inv = max(inv, rel(t2_from_components(t1, pure_dephasing_time(t1, t2)), t2))
    checks["inverse pairs 1e-9"] = inv <= 1e-9
    report(9, checks, f"herm={herm:.0e} flux={worst:.1e} inverse={inv:.1e}")


def test_criterion_10_cli_determinism(tmp_path):
    (tmp_path / "measured.cfg").write_text(
        "f_r_ghz = 9.796\nkappa_ghz = 0.000697\nil_db = 0.461\nf01_ghz = 6.61\n"
        "t1_us = 16.3\nt2_echo_us = 21.5\nc_shunt_ff = 52.7\n")

    def run(*argv):
        subprocess.run([sys.executable, "-m", "csfq", *argv], cwd=tmp_path, check=True,
                       capture_output=True)

    simulate = [
        ("t1.csv", ["simulate", "t1", "--seed", "7"]),
        ("ramsey.csv", ["simulate", "ramsey", "--seed", "7"]),
        ("echo.csv", ["simulate", "echo", "--seed", "7"]),
        ("res.csv", ["simulate", "resonance", "--seed", "7"]),
        ("series.csv", ["simulate", "t1series", "--seed", "7", "--outlier-fraction", "0.05"]),
        ("map.csv", ["simulate", "fluxmap", "--flux-points", "5", "--probe-points", "21",
                     "--sigma", "0.01", "--seed", "7"]),
    ]
    derived = [
        ("spec.csv", ["spectrum", "--points", "21", "--higher"]),
        ("ac.csv", ["anticrossing", "--points", "13"]),
        ("budget.json", ["lossbudget", "--measured", "measured.cfg"]),
        ("t1.json", ["fit", "t1", "--in", "t1.csv", "--svg", "t1.svg"]),
        ("ramsey.json", ["fit", "ramsey", "--in", "ramsey.csv"]),
        ("echo.json", ["fit", "echo", "--in", "echo.csv"]),
        ("res.json", ["fit", "resonance", "--in", "res.csv"]),
        ("stats.json", ["stats", "--in", "series.csv", "--svg", "hist.svg"]),
    ]
    outputs = {}
    for attempt in range(2):
        for out, argv in simulate + derived:
            run(*argv, "--out", out)
        outputs[attempt] = {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())
                            if p.name != "measured.cfg"}
    differing = [k for k in outputs[0] if outputs[0][k] != outputs[1].get(k)]
    checks = {"all outputs byte-identical": not differing and len(outputs[0]) == 16}
    report(10, checks, f"{len(outputs[0])} files compared"
                       + (f", differing: {differing}" if differing else ""))
