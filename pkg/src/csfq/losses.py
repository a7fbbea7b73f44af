"""Quality factors, participation and coherence decomposition for the loss budget.

Frequencies are in GHz and times in us; every Q is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .cavity import CoupledSystem, purcell_t1
from .circuit import DeviceParams
from .errors import InputError

TWO_PI = 2 * math.pi


def _require_positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise InputError(f"{k} must be positive and finite, got {v!r}")


def loaded_q(f_r: float, kappa: float) -> float:
    """Loaded quality factor f_r / kappa."""
    _require_positive(f_r=f_r, kappa=kappa)
    return f_r / kappa


def internal_q(q_loaded: float, il_db: float) -> float:
    """Internal quality factor Q_L / (1 - 10^(-IL/20)) from insertion loss in dB."""
    _require_positive(q_loaded=q_loaded)
    if not il_db > 0:
        raise InputError(f"insertion loss must be positive (formula diverges), got {il_db!r}")
    return q_loaded / -math.expm1(-il_db / 20 * math.log(10))


def loss_tangent(q_internal: float) -> float:
    _require_positive(q_internal=q_internal)
    return 1.0 / q_internal


def participation_si(c_shunt: float, c_sigma: float) -> float:
    """Fraction of the total capacitance that sits across the substrate."""
    _require_positive(c_shunt=c_shunt, c_sigma=c_sigma)
    if c_shunt > c_sigma:
        raise InputError("shunt capacitance cannot exceed the total capacitance")
    return c_shunt / c_sigma


def t1_from_dielectric_budget(q_internal: float, p_si: float, omega01_ghz: float) -> float:
    """T1 (us) when capacitive loss Q_int / P_Si is the only channel."""
    _require_positive(q_internal=q_internal, omega01_ghz=omega01_ghz)
    if not 0 < p_si <= 1:
        raise InputError(f"participation must lie in (0, 1], got {p_si!r}")
    return (q_internal / p_si) / (TWO_PI * omega01_ghz * 1e3)


def combine_q(components) -> float:
    """Total Q from 1/Q = sum 1/Q_i; ``None`` entries are lossless channels."""
    components = list(components)
    if not components:
        raise InputError("combine_q needs at least one component")
    supplied = [q for q in components if q is not None]
    if not supplied:
        raise InputError("combine_q needs at least one supplied channel")
    for q in supplied:
        if not q > 0:
            raise InputError(f"quality factors must be positive, got {q!r}")
    if len(supplied) == 1:
        return float(supplied[0])
    # the clamp only absorbs rounding in 1/(1/q); the exact result never exceeds min
    return min(1.0 / sum(1.0 / q for q in supplied), min(supplied))


def qubit_quality_factor(f01_ghz: float, t_us: float) -> float:
    """Q = omega01 T = 2 pi f01 T."""
    if not f01_ghz > 0 or t_us < 0:
        raise InputError("qubit_quality_factor needs f01 > 0 and T >= 0")
    return TWO_PI * f01_ghz * 1e3 * t_us


def pure_dephasing_time(t1_us: float, t2_us: float) -> float:
    """T_phi from 1/T2 = 1/(2 T1) + 1/T_phi, in us.

    Returns ``math.inf`` when T2 = 2 T1 (dephasing-free); T2 > 2 T1 is
    unphysical and rejected.
    """
    _require_positive(t1_us=t1_us, t2_us=t2_us)
    limit = 2.0 * t1_us
    if t2_us > limit * (1 + 1e-12):
        raise InputError(f"T2 = {t2_us} us exceeds 2 T1 = {limit} us")
    rate = 1.0 / t2_us - 1.0 / limit
    if rate <= 0 or abs(t2_us - limit) <= 1e-12 * limit:
        return math.inf
    return 1.0 / rate


def t2_from_components(t1_us: float, t_phi_us: float) -> float:
    """Forward relation 1/T2 = 1/(2 T1) + 1/T_phi."""
    _require_positive(t1_us=t1_us)
    if not t_phi_us > 0:
        raise InputError("T_phi must be positive")
    return 1.0 / (1.0 / (2 * t1_us) + 1.0 / t_phi_us)


@dataclass(frozen=True)
class ResonatorParams:
    f_r: float
    kappa: float
    insertion_loss_db: float
    Q_loaded: float = field(init=False)
    Q_internal: float = field(init=False)
    tan_delta: float = field(init=False)

    def __post_init__(self):
        ql = loaded_q(self.f_r, self.kappa)
        qi = internal_q(ql, self.insertion_loss_db)
        object.__setattr__(self, "Q_loaded", ql)
        object.__setattr__(self, "Q_internal", qi)
        object.__setattr__(self, "tan_delta", loss_tangent(qi))


@dataclass(frozen=True)
class CoherenceSet:
    t1_us: float
    t2_echo_us: float
    omega01_ghz: float
    t2_ramsey_us: float | None = None
    q1: float = field(init=False)
    q2: float = field(init=False)
    t_phi_us: float = field(init=False)

    def __post_init__(self):
        _require_positive(t1_us=self.t1_us, t2_echo_us=self.t2_echo_us,
                          omega01_ghz=self.omega01_ghz)
        if self.t2_echo_us > 2 * self.t1_us * (1 + 1e-12):
            raise InputError(f"T2 = {self.t2_echo_us} us exceeds 2 T1 = {2 * self.t1_us} us")
        object.__setattr__(self, "q1", qubit_quality_factor(self.omega01_ghz, self.t1_us))
        object.__setattr__(self, "q2", qubit_quality_factor(self.omega01_ghz, self.t2_echo_us))
        object.__setattr__(self, "t_phi_us", pure_dephasing_time(self.t1_us, self.t2_echo_us))


@dataclass(frozen=True)
class LossBudget:
    p_si: float
    Q_cap: float
    Q1_total: float
    t1_budget_us: float
    purcell_t1_us: float | None
    Q_ind: float | None = None
    Q_rad: float | None = None
    c_shunt_used_ff: float | None = None

    def __post_init__(self):
        if not 0 <= self.p_si <= 1:
            raise InputError("participation outside [0, 1]")


# formula names carried next to each quantity in the report
FORMULAS = {
    "q_loaded": "Q_L = f_r / kappa",
    "q_internal": "Q_int = Q_L / (1 - 10^(-IL/20))",
    "tan_delta": "tan_delta = 1 / Q_int",
    "c_sigma_ff": "C_sigma = C_S + (alpha + 1/2) C",
    "p_si": "P_Si = C_S / C_sigma",
    "q_cap": "Q_cap = Q_int / P_Si",
    "q1_total": "1/Q_1 = 1/Q_cap + 1/Q_ind + 1/Q_rad",
    "t1_budget_us": "T_1 = Q_1 / (2 pi f01)",
    "purcell_t1_us": "T_Purcell = [2 pi kappa (g / (f_r - f01))^2]^-1",
    "q1_measured": "Q_1 = 2 pi f01 T_1",
    "q2_measured": "Q_2 = 2 pi f01 T_2",
    "t_phi_us": "1/T_2 = 1/(2 T_1) + 1/T_phi",
}


def loss_report(device: DeviceParams, resonator: ResonatorParams, coherence: CoherenceSet,
                coupled: CoupledSystem | None = None, *, c_shunt_ff: float | None = None,
                q_ind: float | None = None, q_rad: float | None = None) -> dict:
    """Assemble the full loss budget as a JSON-ready dictionary.

    ``c_shunt_ff`` overrides the device shunt capacitance for the
    participation ratio only (e.g. 52.7 fF against a 52.8 fF device); the
    value used is recorded in the report.
    """
    c_shunt = device.C_shunt if c_shunt_ff is None else c_shunt_ff
    c_sigma = device.C_sigma
    try:
        p_si = participation_si(c_shunt, c_sigma)
    except InputError as exc:
        raise InputError(f"c_shunt_ff/c_sigma: {exc}") from exc
    try:
        q_cap = resonator.Q_internal / p_si
        q1 = combine_q([q_cap, q_ind, q_rad])
        t1_budget = q1 / (TWO_PI * coherence.omega01_ghz * 1e3)
    except InputError as exc:
        raise InputError(f"q_ind/q_rad: {exc}") from exc
    t_purcell = purcell_t1(coupled) if coupled is not None else None

    budget = LossBudget(p_si=p_si, Q_cap=q_cap, Q1_total=q1, t1_budget_us=t1_budget,
                        purcell_t1_us=t_purcell, Q_ind=q_ind, Q_rad=q_rad,
                        c_shunt_used_ff=c_shunt)

    def q(name, value, unit=""):
        return {"value": value, "unit": unit, "formula": FORMULAS.get(name)}

    dephasing_free = math.isinf(coherence.t_phi_us)
    report = {
        "device": device.as_dict(),
        "resonator": {
            "f_r_ghz": resonator.f_r,
            "kappa_ghz": resonator.kappa,
            "insertion_loss_db": resonator.insertion_loss_db,
        },
        "coherence": {
            "t1_us": coherence.t1_us,
            "t2_echo_us": coherence.t2_echo_us,
            "t2_ramsey_us": coherence.t2_ramsey_us,
            "omega01_ghz": coherence.omega01_ghz,
        },
        "quantities": {
            "q_loaded": q("q_loaded", resonator.Q_loaded),
            "q_internal": q("q_internal", resonator.Q_internal),
            "tan_delta": q("tan_delta", resonator.tan_delta),
            "c_sigma_ff": q("c_sigma_ff", c_sigma, "fF"),
            "p_si": q("p_si", p_si),
            "q_cap": q("q_cap", q_cap),
            "q1_total": q("q1_total", q1),
            "t1_budget_us": q("t1_budget_us", t1_budget, "us"),
            "purcell_t1_us": q("purcell_t1_us", t_purcell, "us"),
            "q1_measured": q("q1_measured", coherence.q1),
            "q2_measured": q("q2_measured", coherence.q2),
            "t_phi_us": q("t_phi_us", None if dephasing_free else coherence.t_phi_us, "us"),
        },
        "channels": {
            "q_cap": "present",
            "q_ind": "absent" if q_ind is None else "present",
            "q_rad": "absent" if q_rad is None else "present",
        },
        "dephasing_free": dephasing_free,
        "c_shunt_used_ff": c_shunt,
        "budget": asdict(budget),
    }
    if coupled is not None:
        report["coupling"] = {"g_ghz": coupled.g, "detuning_ghz": coupled.omega_r - coupled.omega_q}
    return report
