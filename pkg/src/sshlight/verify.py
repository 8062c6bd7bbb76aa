"""Desk-scale engine-vs-oracle comparisons behind the ``verify`` subcommand.

Small time-dependent lattices (2 and 3 sites) are propagated both with the
moment/tensor engine and with the truncated-Fock reference simulator, and
the photon numbers, fourth-order correlations and quadrature variances are
compared entrywise.  The squeezed case uses a squeeze amplitude at which the
oracle's own truncation leakage stays below its validity threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fock
from .evolution import evolve_g2, evolve_moments, schedule_propagator
from .lattice import CouplingSchedule, Segment
from .observables import quadrature_variance, two_mode_quadrature_variance
from .states import (init_coherent, init_single_photon, init_sq_vacuum,
                     init_two_mode_sq, wick_g2)

TOL_EXACT = 1e-6        # single photon, coherent
TOL_SQUEEZED = 1e-3     # squeezed inputs, truncation-limited
VERIFY_R = 0.35         # squeeze amplitude keeping cutoff-12 leakage < 1e-6
CUTOFF = 12
PHASES = (0.0, np.pi / 4, np.pi / 2)


def ramp_schedule(n_sites: int, length: float = 1.2, s: float = 1.5) -> CouplingSchedule:
    """A genuinely z-dependent small schedule: every bond sweeps between 1 and 2."""
    b0 = np.array([1.0 + 0.5 * (i % 2) for i in range(n_sites - 1)])
    b1 = np.array([2.0 - 0.5 * (i % 2) for i in range(n_sites - 1)])
    seg_up = Segment(length=length, bonds_start=b0, bonds_end=b1, s=s, label="up")
    seg_dn = Segment(length=0.7 * length, bonds_start=b1, bonds_end=b0, s=s, label="down")
    return CouplingSchedule(n_sites=n_sites, segments=(seg_up, seg_dn),
                            onsite=np.zeros(n_sites))


@dataclass
class CheckRow:
    name: str
    max_diff: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_diff < self.tol


def _compare_case(name, n_sites, moments0, tensor0, fock_state, tol, dz=2e-3):
    sched = ramp_schedule(n_sites)
    prop = schedule_propagator(sched, dz)
    mom = evolve_moments(moments0, prop)
    ten = evolve_g2(tensor0, prop)
    fstate = fock.evolve_exact(fock_state, sched, dz)
    fmom, ften, fquad = fock.expectations(fstate, PHASES)

    rows = [
        CheckRow(f"{name}: N", float(np.abs(mom.n_mat - fmom.n_mat).max()), tol),
        CheckRow(f"{name}: g2", float(np.abs(ten.g2 - ften.g2).max()), tol),
    ]
    worst = 0.0
    for (site, phi), var in fquad.items():
        worst = max(worst, abs(quadrature_variance(mom, site, phi) - var))
    rows.append(CheckRow(f"{name}: quadrature", worst, tol))
    return rows, mom, ten


def _wick_drift(moments0, tensor0, n_sites, steps=1000, dz=1.2e-3):
    """Relative gap between tensor evolution and Wick reconstruction after
    many composed steps."""
    sched = ramp_schedule(n_sites, length=steps * dz / 1.7)
    prop = schedule_propagator(sched, dz)
    mom = evolve_moments(moments0, prop)
    ten = evolve_g2(tensor0, prop)
    rebuilt = wick_g2(mom)
    scale = max(np.abs(ten.g2).max(), 1e-30)
    return float(np.abs(ten.g2 - rebuilt.g2).max() / scale)


def run_verification(verbose: bool = False) -> list[str]:
    """Run every oracle comparison; returns the failing row names."""
    rows: list[CheckRow] = []

    m0, t0 = init_single_photon(2, 0)
    f0 = fock.create(fock.vacuum(2, 4), 0)
    rows += _compare_case("single photon / 2 sites", 2, m0, t0, f0, TOL_EXACT)[0]

    m0, t0 = init_single_photon(3, 1)
    f0 = fock.create(fock.vacuum(3, 4), 1)
    rows += _compare_case("single photon / 3 sites", 3, m0, t0, f0, TOL_EXACT)[0]

    m0, t0 = init_coherent(3, 0, 1.0)
    f0 = fock.displace(fock.vacuum(3, CUTOFF), 0, 1.0)
    rows += _compare_case("coherent / 3 sites", 3, m0, t0, f0, TOL_EXACT)[0]

    m0, t0 = init_sq_vacuum(2, 0, VERIFY_R)
    f0 = fock.squeeze(fock.vacuum(2, CUTOFF), 0, VERIFY_R)
    rows += _compare_case("squeezed / 2 sites", 2, m0, t0, f0, TOL_SQUEEZED)[0]

    m0, t0 = init_two_mode_sq(2, 0, 1, VERIFY_R)
    f0 = fock.two_mode_squeeze(fock.vacuum(2, CUTOFF), 0, 1, VERIFY_R)
    case_rows, mom, _ = _compare_case("two-mode squeezed / 2 sites", 2, m0, t0, f0,
                                      TOL_SQUEEZED)
    rows += case_rows
    sched = ramp_schedule(2)
    fstate = fock.evolve_exact(f0, sched, 2e-3)
    worst = 0.0
    for phi in PHASES:
        worst = max(worst, abs(two_mode_quadrature_variance(mom, 0, 1, phi)
                               - fock.pair_variance(fstate, 0, 1, phi)))
    rows.append(CheckRow("two-mode squeezed / pair quadrature", worst, TOL_SQUEEZED))

    for label, (mm, tt) in {
        "coherent": init_coherent(3, 1, 0.7 + 0.3j),
        "squeezed": init_sq_vacuum(3, 0, np.arcsinh(1.0)),
        "two-mode squeezed": init_two_mode_sq(3, 0, 2, np.arcsinh(1.0)),
    }.items():
        rows.append(CheckRow(f"wick closure over 1000 steps: {label}",
                             _wick_drift(mm, tt, 3), 1e-8))

    failures = [r.name for r in rows if not r.passed]
    if verbose:
        width = max(len(r.name) for r in rows)
        for r in rows:
            status = "PASS" if r.passed else "FAIL"
            print(f"{r.name:<{width}}  max|diff| = {r.max_diff:9.3e}  "
                  f"tol = {r.tol:g}  {status}")
        print(f"{len(rows) - len(failures)}/{len(rows)} checks passed")
    return failures
