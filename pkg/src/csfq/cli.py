"""Command-line entry point.

Usage::

    csfq spectrum --config device.cfg --f-start 0.45 --f-end 0.55 --points 201 --out spec.csv
    csfq anticrossing --f-start 0.38 --f-end 0.62 --points 121 --out ac.csv
    csfq lossbudget --config device.cfg --measured measured.cfg --out budget.json
    csfq simulate t1 --t1-us 18.25 --seed 7 --out t1.csv
    csfq fit t1 --in t1.csv --out t1.json
    csfq stats --in series.csv --out stats.json --svg hist.svg

Exit codes: 0 success, 2 input error, 3 fit non-convergence, 4 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cavity import G_PURCELL_GHZ, G_SPLITTING_GHZ, CoupledSystem, anticrossing_curve
from .circuit import DEVICE_KEYS, device_from_config, fitted_device
from .errors import CsfqError, FitError, InputError
from .fitting import (TimeTrace, TraceKind, damped_cosine, exp_decay, fit_damped_sinusoid,
                      fit_exponential_decay, fit_lorentzian, gaussian, gaussian_stats,
                      lorentzian)
from .io import (csv_text, dumps_json, read_keyvalue, read_values_csv, read_xy_csv,
                 svg_plot, write_text)
from .losses import CoherenceSet, ResonatorParams, loss_report
from .spectrum import QubitHamiltonianSpec, eigenlevels, spectrum_sweep
from .synth import (DEFAULT_NOISE_FRACTION, NoiseSpec, gen_flux_map, gen_ramsey_trace,
                    gen_resonance_sweep, gen_t1_series, gen_t1_trace)

log = logging.getLogger("csfq")

MEASURED_KEYS = ("f_r_ghz", "kappa_ghz", "il_db", "f01_ghz", "t1_us", "t2_echo_us",
                 "t2_ramsey_us", "g_ghz", "c_shunt_ff", "q_ind", "q_rad")
MEASURED_REQUIRED = ("f_r_ghz", "kappa_ghz", "il_db", "t1_us", "t2_echo_us")


def _check_out(path):
    if path == "-":
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise InputError(f"output directory does not exist: {parent}")


def _check_in(path):
    if not Path(path).is_file():
        raise InputError(f"input file not found: {path}")


def load_device(path):
    if path is None:
        return fitted_device()
    _check_in(path)
    return device_from_config(read_keyvalue(path, allowed=DEVICE_KEYS))


# --- subcommands ----------------------------------------------------------

def cmd_spectrum(args):
    _check_out(args.out)
    device = load_device(args.config)
    curve = spectrum_sweep(device, args.f_start, args.f_end, args.points, args.cutoff,
                           higher=args.higher, check_convergence=not args.no_convergence_check,
                           workers=args.workers)
    log.info("max convergence delta %.3g GHz", curve.convergence_delta)
    if args.higher:
        header = ["flux_frac", "omega01_ghz", "omega12_ghz"]
        rows = zip(curve.flux, curve.omega01, curve.omega12)
    else:
        header = ["flux_frac", "omega01_ghz"]
        rows = zip(curve.flux, curve.omega01)
    write_text(args.out, csv_text(header, rows))


def cmd_anticrossing(args):
    _check_out(args.out)
    device = load_device(args.config)
    rows = anticrossing_curve(device, args.omega_r, args.g, args.f_start, args.f_end,
                              args.points, args.cutoff)
    write_text(args.out, csv_text(["flux_frac", "upper_ghz", "lower_ghz"], rows))


def cmd_lossbudget(args):
    _check_out(args.out)
    device = load_device(args.config)
    _check_in(args.measured)
    m = read_keyvalue(args.measured, allowed=MEASURED_KEYS, required=MEASURED_REQUIRED)
    f01_source = "measured"
    if "f01_ghz" in m:
        f01 = m["f01_ghz"]
    else:
        f01 = eigenlevels(QubitHamiltonianSpec(device, 0.5), 2).levels[1]
        f01_source = "model at flux 0.5"
    resonator = ResonatorParams(m["f_r_ghz"], m["kappa_ghz"], m["il_db"])
    coherence = CoherenceSet(m["t1_us"], m["t2_echo_us"], f01, m.get("t2_ramsey_us"))
    coupled = CoupledSystem(m["f_r_ghz"], f01, m.get("g_ghz", G_PURCELL_GHZ), m["kappa_ghz"])
    report = loss_report(device, resonator, coherence, coupled,
                         c_shunt_ff=m.get("c_shunt_ff"), q_ind=m.get("q_ind"),
                         q_rad=m.get("q_rad"))
    report["f01_source"] = f01_source
    write_text(args.out, dumps_json(report))


_FITTERS = {
    "t1": (TraceKind.T1_DECAY, fit_exponential_decay, exp_decay),
    "ramsey": (TraceKind.RAMSEY, fit_damped_sinusoid, damped_cosine),
    "echo": (TraceKind.ECHO, fit_damped_sinusoid, damped_cosine),
    "resonance": (TraceKind.RESONANCE, fit_lorentzian, lorentzian),
}


def cmd_fit(args):
    _check_in(args.inp)
    _check_out(args.out)
    kind, fitter, model = _FITTERS[args.kind]
    x, y = read_xy_csv(args.inp)
    trace = TimeTrace(kind, x, y)
    try:
        res = fitter(trace)
    except FitError as exc:
        if exc.result is not None:
            payload = {"kind": args.kind, **exc.result.to_dict()}
            payload.pop("covariance")
            write_text(args.out, dumps_json(payload))
        raise
    payload = {"kind": args.kind, **res.to_dict()}
    write_text(args.out, dumps_json(payload))
    if args.svg:
        xs = np.linspace(x[0], x[-1], 800)
        yfit = model(xs, res.values())
        xlabel = "probe frequency (GHz)" if kind is TraceKind.RESONANCE else "delay (us)"
        write_text(args.svg, svg_plot(points=(x, y), curve=(xs, yfit),
                                      title=f"{args.kind} fit", xlabel=xlabel,
                                      ylabel="signal"))


def cmd_stats(args):
    _check_in(args.inp)
    _check_out(args.out)
    values = read_values_csv(args.inp)
    stats = gaussian_stats(values, bins=args.bins)
    write_text(args.out, dumps_json(stats.to_dict()))
    if args.svg:
        xs = np.linspace(stats.bin_edges[0], stats.bin_edges[-1], 400)
        yfit = gaussian(xs, (stats.amplitude, stats.mean, stats.sigma))
        write_text(args.svg, svg_plot(curve=(xs, yfit), bars=(stats.bin_edges, stats.counts),
                                      title="histogram with Gaussian fit", xlabel="value",
                                      ylabel="count"))


def _sigma(args, amplitude):
    return DEFAULT_NOISE_FRACTION * abs(amplitude) if args.sigma is None else args.sigma


def cmd_simulate(args):
    _check_out(args.out)
    kind = args.kind
    if kind == "t1":
        tr = gen_t1_trace(args.t1_us, args.points, args.t_max_us, args.amplitude, args.offset,
                          NoiseSpec(_sigma(args, args.amplitude), args.seed))
    elif kind in ("ramsey", "echo"):
        tr = gen_ramsey_trace(args.t2_us, args.detuning_mhz, args.points, args.t_max_us,
                              args.amplitude, args.offset, args.phase,
                              NoiseSpec(_sigma(args, args.amplitude), args.seed), kind=kind)
    elif kind == "resonance":
        span = args.span_ghz if args.span_ghz is not None else 20 * args.kappa_ghz
        tr = gen_resonance_sweep(args.f0_ghz, args.kappa_ghz, span, args.points, args.peak,
                                 args.offset, NoiseSpec(_sigma(args, args.peak), args.seed))
    elif kind == "fluxmap":
        device = load_device(args.config)
        flux = np.linspace(args.f_start, args.f_end, args.flux_points)
        probe = np.linspace(args.probe_start, args.probe_end, args.probe_points)
        mag = gen_flux_map(device, args.f_r_ghz, args.kappa_ghz, args.g_ghz, flux, probe,
                           args.cutoff, NoiseSpec(args.sigma or 0.0, args.seed))
        rows = ((f, p, mag[i, j]) for i, f in enumerate(flux) for j, p in enumerate(probe))
        write_text(args.out, csv_text(["flux_frac", "probe_ghz", "magnitude"], rows))
        return
    elif kind == "t1series":
        v = gen_t1_series(args.mean_us, args.sigma_us, args.n, args.seed, args.outlier_fraction)
        write_text(args.out, csv_text(["value"], ((a,) for a in v)))
        return
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown simulation kind {kind!r}")
    write_text(args.out, csv_text(["x", "y"], zip(tr.x, tr.y)))


# --- parser ---------------------------------------------------------------

def _flux_args(p, f_start, f_end, points):
    p.add_argument("--config", help="device config file (default: fitted NbN device)")
    p.add_argument("--f-start", type=float, default=f_start)
    p.add_argument("--f-end", type=float, default=f_end)
    p.add_argument("--points", type=int, default=points)
    p.add_argument("--cutoff", type=int, default=12, help="charge cutoff N")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csfq", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0,
                    help="diagnostics on stderr (-v info, -vv debug)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="omega01 versus flux as CSV")
    _flux_args(p, 0.45, 0.55, 201)
    p.add_argument("--higher", action="store_true", help="also emit omega12")
    p.add_argument("--no-convergence-check", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("anticrossing", help="dressed qubit-resonator branches versus flux")
    _flux_args(p, 0.38, 0.62, 121)
    p.add_argument("--omega-r", type=float, default=9.796, help="resonator frequency (GHz)")
    p.add_argument("--g", type=float, default=G_SPLITTING_GHZ, help="coupling (GHz)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_anticrossing)

    p = sub.add_parser("lossbudget", help="loss budget JSON report")
    p.add_argument("--config")
    p.add_argument("--measured", required=True, help="measured-values key = value file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lossbudget)

    p = sub.add_parser("fit", help="fit a measured trace")
    p.add_argument("kind", choices=sorted(_FITTERS))
    p.add_argument("--in", dest="inp", required=True, help="CSV with header x,y")
    p.add_argument("--out", required=True)
    p.add_argument("--svg", help="optional SVG plot of data and fit")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("stats", help="histogram and Gaussian fit of repeated values")
    p.add_argument("--in", dest="inp", required=True, help="CSV with header value")
    p.add_argument("--bins", type=int, default=None, help="bin count (default ceil(sqrt(n)))")
    p.add_argument("--out", required=True)
    p.add_argument("--svg", help="optional SVG histogram")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("simulate", help="seeded synthetic data")
    ssub = p.add_subparsers(dest="kind", required=True)

    def common(sp, amplitude=1.0, offset=0.0):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--sigma", type=float, default=None,
                        help="noise std (default 2%% of the amplitude)")
        sp.add_argument("--out", required=True)
        sp.set_defaults(func=cmd_simulate)

    s = ssub.add_parser("t1")
    s.add_argument("--t1-us", type=float, default=18.25)
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--t-max-us", type=float, default=80.0)
    s.add_argument("--amplitude", type=float, default=1.0)
    s.add_argument("--offset", type=float, default=0.0)
    common(s)
    for name, t2, tmax, points in (("ramsey", 3.33, 10.0, 401), ("echo", 23.2, 60.0, 1201)):
        s = ssub.add_parser(name)
        s.add_argument("--t2-us", type=float, default=t2)
        s.add_argument("--detuning-mhz", type=float, default=5.0)
        s.add_argument("--points", type=int, default=points)
        s.add_argument("--t-max-us", type=float, default=tmax)
        s.add_argument("--amplitude", type=float, default=0.5)
        s.add_argument("--offset", type=float, default=0.5)
        s.add_argument("--phase", type=float, default=0.0)
        common(s)
    s = ssub.add_parser("resonance")
    s.add_argument("--f0-ghz", type=float, default=9.796)
    s.add_argument("--kappa-ghz", type=float, default=0.697e-3)
    s.add_argument("--span-ghz", type=float, default=None, help="default 20 kappa")
    s.add_argument("--points", type=int, default=401)
    s.add_argument("--peak", type=float, default=1.0)
    s.add_argument("--offset", type=float, default=0.0)
    common(s)
    s = ssub.add_parser("fluxmap")
    s.add_argument("--config")
    s.add_argument("--f-start", type=float, default=0.38)
    s.add_argument("--f-end", type=float, default=0.62)
    s.add_argument("--flux-points", type=int, default=49)
    s.add_argument("--probe-start", type=float, default=9.60)
    s.add_argument("--probe-end", type=float, default=10.0)
    s.add_argument("--probe-points", type=int, default=201)
    s.add_argument("--f-r-ghz", type=float, default=9.796)
    s.add_argument("--kappa-ghz", type=float, default=0.697e-3)
    s.add_argument("--g-ghz", type=float, default=G_SPLITTING_GHZ)
    s.add_argument("--cutoff", type=int, default=12)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)
    s = ssub.add_parser("t1series")
    s.add_argument("--mean-us", type=float, default=16.3)
    s.add_argument("--sigma-us", type=float, default=1.73)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--outlier-fraction", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except CsfqError as exc:
        print(f"csfq {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"csfq {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
