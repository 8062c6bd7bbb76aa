"""Spectra, IPR, gap-state identification, band sweeps."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sshlight.lattice import LatticeSpec, build_ssh
from sshlight.spectral import (band_sweep, bulk_gap, default_gap_tol, diagonalize,
                               gap_mode_peaks, ipr_of, localize_gap_states,
                               locate_gap_states)

U = 0.69


def topo31(delta=4.6):
    return LatticeSpec(n_sites=31, u=U, v=delta * U, dw_positions=(15,))


def test_zero_matrix():
    res = diagonalize(np.zeros((3, 3)))
    assert np.allclose(res.energies, 0.0)
    assert np.allclose(res.states.conj().T @ res.states, np.eye(3), atol=1e-10)
    assert np.all((res.ipr > 0) & (res.ipr <= 1))


def test_dimer_spectrum_and_ipr():
    res = diagonalize(np.array([[0.0, 0.7], [0.7, 0.0]]))
    assert np.allclose(res.energies, [-0.7, 0.7])
    assert np.allclose(res.ipr, 0.5)


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        diagonalize(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_topological_gap_states():
    spec = topo31()
    res = diagonalize(build_ssh(spec))
    idx = locate_gap_states(res, default_gap_tol(spec))
    assert len(idx) == 3
    bulk = np.setdiff1d(np.arange(31), idx)
    assert res.ipr[idx].min() > res.ipr[bulk].max()


def test_gap_state_localization_sites():
    spec = topo31()
    res = diagonalize(build_ssh(spec))
    # localized combinations sit at the two edges and the wall
    assert gap_mode_peaks(res, default_gap_tol(spec)) == [0, 15, 30]


def test_wall_mode_is_sublattice_pure():
    spec = topo31()
    res = diagonalize(build_ssh(spec))
    idx = locate_gap_states(res, default_gap_tol(spec))
    rotated = localize_gap_states(res, idx, anchor_sites=[15])
    mode = rotated[:, 0]
    minority = np.sum(np.abs(mode[0::2]) ** 2)  # wall site 15 is odd
    assert minority < 1e-6


def test_trivial_chain_has_no_gap_states():
    spec = LatticeSpec(n_sites=32, u=3.22, v=0.69)  # strong bond first, no wall
    res = diagonalize(build_ssh(spec))
    assert locate_gap_states(res, default_gap_tol(spec)) == []


def test_trivial_wall_hosts_no_isolated_state():
    # with the bulk ratio inverted the wall coupling is strong, so the
    # near-zero weight at the wall position itself vanishes
    spec = LatticeSpec(n_sites=31, u=1.0, v=0.25, dw_positions=(15,))
    res = diagonalize(build_ssh(spec))
    idx = locate_gap_states(res, 1e-3)
    weight = sum(abs(res.states[15, k]) ** 2 for k in idx)
    assert weight < 1e-6


def test_tolerance_inf_selects_everything():
    res = diagonalize(build_ssh(topo31()))
    assert len(locate_gap_states(res, np.inf)) == 31


def test_gap_closes_at_delta_one():
    gaps = []
    for n in (31, 61, 121, 241):
        spec = LatticeSpec(n_sites=n, u=U, v=U, dw_positions=(15,))
        res = diagonalize(build_ssh(spec))
        gaps.append(bulk_gap(res, 1e-3 * U))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.05 * U


def test_band_sweep_shapes_and_gap():
    sweep = band_sweep(topo31(), np.array([0.25, 1.0, 4.6]))
    by_delta = {d: r for d, r in sweep}
    tol = 1e-3 * 4.6 * U
    assert len(locate_gap_states(by_delta[4.6], tol)) == 3
    assert bulk_gap(by_delta[4.6], tol) > 10 * bulk_gap(by_delta[1.0], 1e-3 * U)


def test_spectrum_symmetric_without_onsite():
    res = diagonalize(build_ssh(topo31()))
    e = np.sort(res.energies)
    assert np.abs(e + e[::-1]).max() < 1e-9 * np.abs(e).max()


@given(st.integers(2, 40), st.integers(0, 1000))
@settings(max_examples=50, deadline=None)
def test_ipr_bounds(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    value = ipr_of(psi)
    assert 1.0 / n - 1e-12 <= value <= 1.0 + 1e-12


def test_ipr_single_site_is_one():
    e = np.zeros(8)
    e[3] = 1.0
    assert ipr_of(e) == pytest.approx(1.0)
