"""Photon numbers, quadrature variances, squeezing in dB, transmission.

Quadrature convention: X(phi) = (a e^{i phi} + a+ e^{-i phi}) / 2, so vacuum
and coherent states have variance 1/4 at every phase; squeezing in dB is
10 log10 of the variance over that reference.  All variances use centered
moments, so displaced states measure correctly.
"""

from __future__ import annotations

import numpy as np

from .states import CorrelationTensor, GaussianMoments

VACUUM_VARIANCE = 0.25
PHASE_UNDEFINED_TOL = 1e-12


def photon_number(m: GaussianMoments, i: int, j: int) -> complex:
    val = m.n_mat[i, j]
    return float(np.real(val)) if i == j else complex(val)


def _effective_pair(m: GaussianMoments, sites: tuple[int, ...]) -> tuple[float, complex]:
    """(N_eff, M_eff) such that Var = 1/4 (1 + 2 N_eff + 2 Re[M_eff e^{2i phi}])."""
    nb, mb = m.centered()
    if len(sites) == 1:
        i = sites[0]
        return float(np.real(nb[i, i])), complex(mb[i, i])
    i, j = sites
    n_eff = 0.5 * float(np.real(nb[i, i] + nb[j, j]) + 2 * np.real(nb[i, j]))
    m_eff = 0.5 * complex(mb[i, i] + mb[j, j] + 2 * mb[i, j])
    return n_eff, m_eff


def quadrature_variance(m: GaussianMoments, site: int, phi: float) -> float:
    n_eff, m_eff = _effective_pair(m, (site,))
    return VACUUM_VARIANCE * (1.0 + 2.0 * n_eff + 2.0 * np.real(m_eff * np.exp(2j * phi)))


def two_mode_quadrature_variance(m: GaussianMoments, i: int, j: int, phi: float) -> float:
    """Variance of (X_i(phi) + X_j(phi)) / sqrt(2), including cross moments."""
    if i == j:
        raise ValueError("two-mode quadrature needs distinct sites")
    n_eff, m_eff = _effective_pair(m, (i, j))
    return VACUUM_VARIANCE * (1.0 + 2.0 * n_eff + 2.0 * np.real(m_eff * np.exp(2j * phi)))


def squeezing_db(m: GaussianMoments, site: int, phi: float) -> float:
    """Negative below the coherent-state reference."""
    return 10.0 * np.log10(quadrature_variance(m, site, phi) / VACUUM_VARIANCE)


def min_variance_phase(m: GaussianMoments, sites: tuple[int, ...],
                       grid: int = 720) -> tuple[float, float, bool]:
    """(phi*, Var*, defined) minimizing the variance over phi in [0, pi).

    The minimum is analytic in the phase of the anomalous moment; a phase
    grid is only scanned as a fallback when that moment vanishes, in which
    case the variance is phase-independent and the result is flagged
    undefined.
    """
    n_eff, m_eff = _effective_pair(m, tuple(sites))
    if abs(m_eff) <= PHASE_UNDEFINED_TOL * max(1.0, 1.0 + 2.0 * n_eff):
        phis = np.linspace(0.0, np.pi, grid, endpoint=False)
        vals = VACUUM_VARIANCE * (1.0 + 2.0 * n_eff
                                  + 2.0 * np.real(m_eff * np.exp(2j * phis)))
        k = int(np.argmin(vals))
        return float(phis[k]), float(vals[k]), False
    phi_star = ((np.pi - np.angle(m_eff)) / 2.0) % np.pi
    var_star = VACUUM_VARIANCE * (1.0 + 2.0 * n_eff - 2.0 * abs(m_eff))
    return float(phi_star), float(var_star), True


def phase_distance(a: float, b: float) -> float:
    """Distance between quadrature phases, which live on [0, pi)."""
    d = abs(a - b) % np.pi
    return float(min(d, np.pi - d))


def g2_entry(t: CorrelationTensor, i: int, j: int, k: int, l: int) -> complex:
    return t.entry(i, j, k, l)


def transmission(traj, target_site: int) -> float:
    """Photon number at the target waveguide at the end of the run, relative
    to the total injected photon number."""
    final_n = traj.final(("n", int(target_site)))
    return float(final_n / traj.meta["initial_total_photons"])
