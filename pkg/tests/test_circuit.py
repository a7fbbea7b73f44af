from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csfq.circuit import (DeviceParams, JunctionGeometry, capacitance_from_charging_energy,
                          charging_energy, critical_current_from_density,
                          critical_current_from_ej, device_from_config,
                          ej_consistency_report, josephson_energy_from_critical_current,
                          junction_capacitance, fitted_device, scale_shunt_capacitance,
                          total_junction_capacitance)
from csfq.constants import CONSTANTS, PhysicalConstants
from csfq.errors import InputError

# exact SI values, typed in independently of the package
E = 1.602176634e-19
H = 6.62607015e-34
EPS0 = 8.8541878128e-12

positive = st.floats(1e-3, 1e3, allow_nan=False)


def test_constants_are_codata():
    assert CONSTANTS.e == E
    assert CONSTANTS.h == H
    assert CONSTANTS.eps0 == pytest.approx(EPS0, rel=1e-9)
    assert CONSTANTS.Phi0 == pytest.approx(H / (2 * E), rel=1e-9)


def test_constants_reject_nonpositive():
    with pytest.raises(ValueError):
        PhysicalConstants(e=-1.0)


# --- junction capacitance ------------------------------------------------

def test_junction_capacitance_matches_device():
    c = junction_capacitance(JunctionGeometry(1.07, 1.8, 7.05))
    assert c == pytest.approx(31.2, rel=5e-3)


def test_junction_capacitance_hand_formula():
    d, t, er = 1.07e-6, 1.8e-9, 7.05
    expected = er * EPS0 * math.pi * (d / 2) ** 2 / t / 1e-15
    assert junction_capacitance(JunctionGeometry(1.07, 1.8, er)) == pytest.approx(expected,
                                                                                  rel=1e-9)


def test_junction_capacitance_zero_area_limit():
    assert junction_capacitance(JunctionGeometry(1e-9, 1.8, 7.05)) < 1e-15


def test_doubling_diameter_quadruples_capacitance():
    a = junction_capacitance(JunctionGeometry(0.5, 2.0, 7.0))
    b = junction_capacitance(JunctionGeometry(1.0, 2.0, 7.0))
    assert b == pytest.approx(4 * a, rel=1e-12)


@pytest.mark.parametrize("d, t, er", [(0, 1.8, 7.0), (1.0, 0, 7.0), (-1, 1, 7.0),
                                      (1.0, 1.0, 1.0)])
def test_junction_geometry_rejects_invalid(d, t, er):
    with pytest.raises(InputError):
        JunctionGeometry(d, t, er)


@given(d=st.floats(0.1, 5), t=st.floats(0.5, 5), er=st.floats(1.5, 20), k=st.floats(1.1, 4))
def test_junction_capacitance_scaling(d, t, er, k):
    base = junction_capacitance(JunctionGeometry(d, t, er))
    assert junction_capacitance(JunctionGeometry(d, t, er * k)) == pytest.approx(k * base,
                                                                                 rel=1e-9)
    assert junction_capacitance(JunctionGeometry(d * math.sqrt(k), t, er)) == pytest.approx(
        k * base, rel=1e-9)
    assert junction_capacitance(JunctionGeometry(d, t * k, er)) == pytest.approx(base / k,
                                                                                 rel=1e-9)


# --- capacitances and charging energy ------------------------------------

def test_total_junction_capacitance_values():
    assert total_junction_capacitance(0.36, 31.2) == pytest.approx(26.8, rel=2e-3)
    assert total_junction_capacitance(0.5, 2.0) == 2.0
    assert total_junction_capacitance(0.358, 31.2) == pytest.approx(26.7696, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
def test_total_junction_capacitance_rejects_alpha(alpha):
    with pytest.raises(InputError):
        total_junction_capacitance(alpha, 31.2)


def test_scale_shunt_capacitance():
    assert scale_shunt_capacitance(51.0, 11.5, 11.9) == pytest.approx(52.774, abs=1e-3)
    assert scale_shunt_capacitance(51.0, 11.5, 11.5) == 51.0
    assert scale_shunt_capacitance(51.0, 11.5, 23.0) == pytest.approx(102.0, rel=1e-12)
    with pytest.raises(InputError):
        scale_shunt_capacitance(51.0, 0.0, 11.9)


def test_charging_energy_values():
    assert charging_energy(79.6) == pytest.approx(E ** 2 / (2 * 79.6e-15 * H) / 1e9, rel=1e-12)
    assert charging_energy(79.6) == pytest.approx(0.2433, abs=1e-4)
    assert charging_energy(39.8) == pytest.approx(0.4867, abs=1e-4)
    assert charging_energy(1e20) < 1e-18
    with pytest.raises(InputError):
        charging_energy(0.0)


@given(c=positive)
def test_charging_energy_times_capacitance_constant(c):
    assert charging_energy(c) * c == pytest.approx(E ** 2 / (2 * H) / 1e-15 / 1e9, rel=1e-9)
    assert capacitance_from_charging_energy(charging_energy(c)) == pytest.approx(c, rel=1e-9)


# --- Josephson energy ----------------------------------------------------

def test_josephson_energy_value():
    expected = (H / (2 * E)) * 0.282e-6 / (2 * math.pi * H) / 1e9
    assert josephson_energy_from_critical_current(0.282) == pytest.approx(expected, rel=1e-12)
    assert josephson_energy_from_critical_current(0.282) == pytest.approx(140.0, rel=5e-3)


def test_josephson_energy_rejects_zero_current():
    with pytest.raises(InputError):
        josephson_energy_from_critical_current(0.0)


def test_critical_current_from_density():
    ic = critical_current_from_density(38.6, 1.07)
    assert ic == pytest.approx(0.347, abs=1e-3)
    assert josephson_energy_from_critical_current(ic) == pytest.approx(172, rel=5e-3)


def test_ej_consistency_report_flags_mismatch():
    r = ej_consistency_report(140.0, 38.6, 1.07)
    assert r["relative_mismatch"] == pytest.approx(0.23, abs=0.01)
    assert r["ic_quoted_ua"] == pytest.approx(0.282, abs=1e-3)
    # the effective diameter reproduces the quoted E_J exactly
    ic = critical_current_from_density(38.6, r["effective_diameter_um"])
    assert josephson_energy_from_critical_current(ic) == pytest.approx(140.0, rel=1e-12)


@given(ic=st.floats(1e-4, 1e3))
def test_ej_ic_mutual_inverses(ic):
    ej = josephson_energy_from_critical_current(ic)
    assert critical_current_from_ej(ej) == pytest.approx(ic, rel=1e-9)
    assert josephson_energy_from_critical_current(critical_current_from_ej(ej)) == \
        pytest.approx(ej, rel=1e-9)


# --- DeviceParams --------------------------------------------------------

def test_device_from_fitted_parameters():
    d = DeviceParams(alpha=0.358, C_large=31.2, C_shunt=52.8, E_J=140.0)
    assert d.C_sigma == pytest.approx(79.6, rel=5e-3)
    assert d.E_C == pytest.approx(0.244, rel=1e-2)
    assert d.ec_derived


@given(alpha=st.floats(0.01, 0.99), c=positive, cs=positive)
def test_device_invariants(alpha, c, cs):
    d = DeviceParams(alpha, c, cs, 100.0)
    assert d.C_J == pytest.approx((alpha + 0.5) * c, rel=1e-9)
    assert d.C_sigma == pytest.approx(cs + d.C_J, rel=1e-9)
    assert d.E_C == pytest.approx(E ** 2 / (2 * d.C_sigma * 1e-15 * H) / 1e9, rel=1e-9)


def test_fitted_device_overrides_ec():
    d = fitted_device()
    assert d.E_C == 0.244 and not d.ec_derived
    assert d.replace(E_C=None).ec_derived
    assert d.replace(E_J=70.0).E_C == 0.244


@pytest.mark.parametrize("kw", [dict(alpha=1.2), dict(C_large=0), dict(C_shunt=-1),
                                dict(E_J=-1), dict(E_C=0), dict(E_J=math.inf)])
def test_device_rejects_invalid(kw):
    base = dict(alpha=0.358, C_large=31.2, C_shunt=52.8, E_J=140.0, E_C=0.244)
    base.update(kw)
    with pytest.raises(InputError):
        DeviceParams(**base)


def test_device_from_config_electrical_precedence():
    d = device_from_config({"alpha": 0.358, "c_large_ff": 31.2, "ej_ghz": 140.0,
                            "ec_ghz": 0.244, "d_large_um": 1.07, "t_barrier_nm": 1.8,
                            "jc_a_per_cm2": 38.6})
    assert d == fitted_device()


def test_device_from_config_geometric_route():
    d = device_from_config({"d_large_um": 1.07, "d_small_um": 0.64, "t_barrier_nm": 1.8,
                            "jc_a_per_cm2": 38.6})
    assert d.alpha == pytest.approx((0.64 / 1.07) ** 2)
    assert d.C_large == pytest.approx(31.2, rel=5e-3)
    assert d.E_J == pytest.approx(172, rel=5e-3)
    assert d.C_shunt == 52.8


@pytest.mark.parametrize("values", [
    {"c_large_ff": 31.2, "ej_ghz": 140},
    {"alpha": 0.3, "ej_ghz": 140},
    {"alpha": 0.3, "c_large_ff": 31.2},
    {"alpha": 0.3, "c_large_ff": 31.2, "ej_ghz": 140, "colour": 1},
])
def test_device_from_config_incomplete_or_unknown(values):
    with pytest.raises(InputError):
        device_from_config(values)
