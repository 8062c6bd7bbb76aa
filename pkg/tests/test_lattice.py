"""Lattice construction, calibration, bend profiles, schedules, disorder."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sshlight.lattice import (BendProfile, LatticeError, LatticeSpec, apply_disorder,
                              bend_profile, bond_values, build_ssh,
                              calibrate_distance_model, concat_schedules,
                              coupling_from_distance, merge_split_schedule,
                              move_schedule, solve_profile_params, wall_sites)

U, V = 0.69, 3.22


def spectrum_symmetric(h, rtol=1e-10):
    e = np.sort(np.linalg.eigvalsh(h))
    scale = max(np.abs(e).max(), 1e-30)
    return np.abs(e + e[::-1]).max() <= rtol * scale


# ---------------------------------------------------------------------------
# static lattices
# ---------------------------------------------------------------------------

def test_bare_dimer():
    spec = LatticeSpec(n_sites=2, u=1.0, v=5.0)
    assert np.array_equal(build_ssh(spec), [[0.0, 1.0], [1.0, 0.0]])


def test_five_site_wall_bonds():
    # enumerate by the dimerization rule with one wall insertion at bond 2
    spec = LatticeSpec(n_sites=5, u=1.0, v=2.0, dw_positions=(2,))
    assert bond_values(spec).tolist() == [1.0, 2.0, 1.0, 1.0]


def test_appendix_lattice_zero_modes():
    spec = LatticeSpec(n_sites=31, u=U, v=V, dw_positions=(15,))
    energies = np.linalg.eigvalsh(build_ssh(spec))
    assert np.sum(np.abs(energies) < 1e-3) == 3


def test_wall_sites():
    assert wall_sites(LatticeSpec(n_sites=31, u=U, v=V, dw_positions=(15,))) == (15,)
    assert wall_sites(LatticeSpec(n_sites=5, u=1, v=2, dw_positions=(2,))) == (3,)
    assert wall_sites(LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(13, 18))) == (13, 18)


def test_onsite_goes_on_diagonal():
    spec = LatticeSpec(n_sites=4, u=1.0, v=2.0, onsite=(0.1, 0.2, 0.3, 0.4))
    assert np.allclose(np.diag(build_ssh(spec)), [0.1, 0.2, 0.3, 0.4])


@pytest.mark.parametrize("walls", [(0,), (30,), (-2,), (5, 6), (5, 5)])
def test_invalid_walls_rejected(walls):
    with pytest.raises(LatticeError):
        LatticeSpec(n_sites=32, u=U, v=V, dw_positions=walls)


def test_couplings_must_be_positive():
    with pytest.raises(LatticeError):
        LatticeSpec(n_sites=4, u=-1.0, v=2.0)


# ---------------------------------------------------------------------------
# distance model
# ---------------------------------------------------------------------------

def test_distance_calibration_frozen_values():
    # solved from the 2x2 log-linear system for the (22 um, 0.69) / (10 um, 3.22) anchors
    model = calibrate_distance_model(22.0, U, 10.0, V)
    assert model.c1 == pytest.approx(0.1283704200789291, rel=1e-12)
    assert model.c2 == pytest.approx(11.624158483598714, rel=1e-12)


def test_distance_round_trip():
    model = calibrate_distance_model(22.0, U, 10.0, V)
    assert coupling_from_distance(22.0, model) == pytest.approx(U, rel=1e-12)
    assert coupling_from_distance(10.0, model) == pytest.approx(V, rel=1e-12)
    assert V / U == pytest.approx(4.6666666667, rel=1e-9)


def test_distance_decay_limit():
    model = calibrate_distance_model(22.0, U, 10.0, V)
    assert coupling_from_distance(1e6, model) == pytest.approx(0.0, abs=1e-300)


def test_degenerate_calibration_rejected():
    with pytest.raises(LatticeError):
        calibrate_distance_model(10.0, 1.0, 20.0, 1.0)
    with pytest.raises(LatticeError):
        calibrate_distance_model(10.0, 1.0, 10.0, 2.0)


@given(st.floats(5.0, 40.0), st.floats(0.01, 10.0), st.floats(5.0, 40.0),
       st.floats(0.01, 10.0))
@settings(max_examples=60, deadline=None)
def test_calibration_round_trips_any_anchors(da, ca, db, cb):
    if abs(da - db) < 1e-3 or (da - db) * (np.log(cb) - np.log(ca)) <= 0:
        return
    model = calibrate_distance_model(da, ca, db, cb)
    assert coupling_from_distance(da, model) == pytest.approx(ca, rel=1e-12)
    assert coupling_from_distance(db, model) == pytest.approx(cb, rel=1e-12)


# ---------------------------------------------------------------------------
# bend profile
# ---------------------------------------------------------------------------

def test_profile_endpoints():
    p = BendProfile(a=3.22, b=2.53, s=1.5, z_m=5.5)
    assert bend_profile(0.0, p) == pytest.approx(3.22)
    assert bend_profile(5.5, p) == pytest.approx(0.69)
    eps = 1e-9 * 5.5
    assert bend_profile(eps, p) == pytest.approx(3.22, abs=1e-9)
    assert bend_profile(5.5 - eps, p) == pytest.approx(0.69, abs=1e-9)


def test_profile_midpoint_value():
    # both inner exponents equal exp(-2) at z = Z_m/2, giving A - B/(1+s)
    p = BendProfile(a=3.22, b=2.53, s=1.5, z_m=5.5)
    mid = bend_profile(2.75, p)
    assert mid == pytest.approx(3.22 - 2.53 / 2.5, rel=1e-12)
    assert U < mid < V


def test_profile_out_of_range():
    p = BendProfile(a=1.0, b=0.5, s=1.5, z_m=2.0)
    with pytest.raises(LatticeError):
        bend_profile(-0.1, p)
    with pytest.raises(LatticeError):
        bend_profile(2.1, p)


def test_profile_requires_positive_slope():
    with pytest.raises(LatticeError):
        BendProfile(a=1.0, b=0.5, s=0.0, z_m=1.0)


def test_solve_profile_params():
    assert solve_profile_params(U, U) == (U, 0.0)
    a, b = solve_profile_params(0.69, 3.22)
    assert (a, b) == pytest.approx((0.69, -2.53))
    a, b = solve_profile_params(3.22, 0.69)
    assert (a, b) == pytest.approx((3.22, 2.53))


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(0.2, 6.0))
@settings(max_examples=60, deadline=None)
def test_profile_monotone_between_endpoints(c_start, c_end, s):
    a, b = solve_profile_params(c_start, c_end)
    p = BendProfile(a=a, b=b, s=s, z_m=5.5)
    zs = np.linspace(0, 5.5, 101)
    vals = bend_profile(zs, p)
    lo, hi = min(c_start, c_end), max(c_start, c_end)
    assert np.all(vals >= lo - 1e-12) and np.all(vals <= hi + 1e-12)


# ---------------------------------------------------------------------------
# move schedules
# ---------------------------------------------------------------------------

def test_move_endpoint_matches_shifted_lattice():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(15,))
    sched = move_schedule(spec, 0, "right", s=1.5, z_m=5.5)
    shifted = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(17,))
    assert np.abs(sched.hamiltonian(5.5) - build_ssh(shifted)).max() < 1e-12
    assert np.abs(sched.hamiltonian(0.0) - build_ssh(spec)).max() < 1e-12


def test_move_modulates_exactly_two_bonds():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(15,))
    sched = move_schedule(spec, 0, "right", s=1.5, z_m=5.5)
    changed = np.nonzero(sched.bonds(0.0) != sched.bonds(5.5))[0]
    assert len(changed) == 2
    mid = sched.bonds(2.75)
    untouched = np.setdiff1d(np.arange(31), changed)
    assert np.array_equal(mid[untouched], sched.bonds(0.0)[untouched])


def test_move_round_trip_restores_lattice():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(15,))
    right = move_schedule(spec, 0, "right", s=1.5, z_m=5.5)
    back = move_schedule(LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(17,)),
                         0, "left", s=1.5, z_m=5.5)
    both = concat_schedules([right, back])
    assert both.total_length == pytest.approx(11.0)
    assert np.abs(both.hamiltonian(11.0) - both.hamiltonian(0.0)).max() < 1e-12


def test_move_chiral_symmetry_along_z():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(15,))
    sched = move_schedule(spec, 0, "right", s=1.5, z_m=5.5)
    for z in np.linspace(0, 5.5, 23):
        h = sched.hamiltonian(z)
        assert np.abs(h - h.T).max() == 0.0
        assert spectrum_symmetric(h)


def test_move_off_lattice_rejected():
    spec = LatticeSpec(n_sites=8, u=U, v=V, dw_positions=(4,))
    with pytest.raises(LatticeError):
        move_schedule(spec, 0, "right", s=1.5, z_m=5.5)
    with pytest.raises(LatticeError):
        move_schedule(spec, 0, "up", s=1.5, z_m=5.5)


# ---------------------------------------------------------------------------
# merge / split schedules
# ---------------------------------------------------------------------------

def test_merge_split_zero_hold_round_trips():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(13, 18))
    sched = merge_split_schedule(spec, 0, 1, z_int=0.0, s=1.5, z_m=5.5)
    assert np.abs(sched.hamiltonian(0.0) - sched.hamiltonian(sched.total_length)).max() < 1e-12


def test_merge_split_length_arithmetic():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(13, 18))
    for z_int in (0.0, 1.0, 4.55):
        sched = merge_split_schedule(spec, 0, 1, z_int=z_int, s=1.5, z_m=5.5)
        approach = sched.meta["approach_length"]
        assert sched.total_length == pytest.approx(2 * approach + z_int)


def test_merged_walls_form_dimer_bonds():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(13, 18))
    sched = merge_split_schedule(spec, 0, 1, z_int=2.0, s=1.5, z_m=5.5)
    merged = sched.meta["walls_merged"]
    assert merged == (15, 16)
    bonds = sched.bonds(sched.meta["approach_length"] + 1.0)
    # three consecutive weak bonds: the two wall sites couple to each other
    # and to the bulk only through u
    assert np.allclose(bonds[14:17], U)
    assert bonds[13] == pytest.approx(V) and bonds[17] == pytest.approx(V)


def test_merge_even_gap_rejected():
    spec = LatticeSpec(n_sites=32, u=U, v=V, dw_positions=(13, 17))
    with pytest.raises(LatticeError):
        merge_split_schedule(spec, 0, 1, z_int=1.0, s=1.5, z_m=5.5)


# ---------------------------------------------------------------------------
# disorder
# ---------------------------------------------------------------------------

def make_schedule():
    spec = LatticeSpec(n_sites=16, u=U, v=V, dw_positions=(7,))
    return move_schedule(spec, 0, "right", s=1.5, z_m=5.5)


def test_zero_disorder_is_identity():
    sched = make_schedule()
    noisy = apply_disorder(sched, "coupling", 0.0, seed=1)
    for z in (0.0, 2.0, 5.5):
        assert np.abs(noisy.hamiltonian(z) - sched.hamiltonian(z)).max() == 0.0


def test_coupling_disorder_preserves_chirality():
    noisy = apply_disorder(make_schedule(), "coupling", 1.3, seed=3)
    for z in np.linspace(0, 5.5, 11):
        assert spectrum_symmetric(noisy.hamiltonian(z))


def test_onsite_disorder_breaks_chirality():
    noisy = apply_disorder(make_schedule(), "onsite", 1.3, seed=3)
    assert not spectrum_symmetric(noisy.hamiltonian(0.0), rtol=1e-6)


def test_disorder_deterministic_and_independent():
    a = apply_disorder(make_schedule(), "coupling", 1.3, seed=11)
    b = apply_disorder(make_schedule(), "coupling", 1.3, seed=11)
    c = apply_disorder(make_schedule(), "coupling", 1.3, seed=12)
    assert np.array_equal(a.bond_factor, b.bond_factor)
    assert not np.array_equal(a.bond_factor, c.bond_factor)


def test_disorder_scales_with_bond_strength():
    # strongest design coupling wobbles by up to delta, weak bonds in proportion
    noisy = apply_disorder(make_schedule(), "coupling", 1.3, seed=5)
    base = make_schedule().bonds(0.0)
    pert = noisy.bonds(0.0) - base
    assert np.abs(pert).max() <= 1.3 + 1e-12
    assert np.all(np.abs(pert) <= np.abs(base) * (1.3 / V) + 1e-12)


def test_extreme_disorder_clamps_with_warning():
    noisy = apply_disorder(make_schedule(), "coupling", 50.0, seed=2)
    assert any("clamp" in w for w in noisy.warnings)
    for z in (0.0, 5.5):
        assert np.all(noisy.bonds(z) >= 1e-6)


def test_unknown_kind_rejected():
    with pytest.raises(LatticeError):
        apply_disorder(make_schedule(), "both", 0.1, seed=0)


# ---------------------------------------------------------------------------
# schedule evaluation properties
# ---------------------------------------------------------------------------

@given(st.floats(0.0, 1.0))
@settings(max_examples=40, deadline=None)
def test_schedule_hermitian_everywhere(frac):
    sched = make_schedule()
    h = sched.hamiltonian(frac * sched.total_length)
    assert np.abs(h - h.conj().T).max() == 0.0


def test_schedule_rejects_out_of_domain():
    sched = make_schedule()
    with pytest.raises(LatticeError):
        sched.hamiltonian(-0.5)
    with pytest.raises(LatticeError):
        sched.hamiltonian(sched.total_length + 0.5)
