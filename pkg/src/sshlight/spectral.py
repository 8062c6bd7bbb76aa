"""Static diagnostics: spectra, inverse participation ratios, gap states."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .lattice import LatticeSpec, build_ssh

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralResult:
    """Ascending eigenvalues, matching orthonormal eigenvectors (columns),
    and the inverse participation ratio of each state."""

    energies: np.ndarray
    states: np.ndarray
    ipr: np.ndarray


def ipr_of(psi: np.ndarray) -> float:
    """Sum |psi|^4 / (sum |psi|^2)^2; 1 for a single-site state, ~1/n extended."""
    p2 = np.abs(psi) ** 2
    return float(np.sum(p2 ** 2) / np.sum(p2) ** 2)


def diagonalize(h: np.ndarray) -> SpectralResult:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(np.abs(h).max(), 1.0)
    if np.abs(h - h.conj().T).max() > HERMITICITY_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    energies, states = np.linalg.eigh(h)
    ipr = np.sum(np.abs(states) ** 4, axis=0)
    return SpectralResult(energies=energies, states=states, ipr=ipr)


def locate_gap_states(result: SpectralResult, tol: float) -> list[int]:
    """Indices of states with |E| < tol; empty in the trivial phase."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return [int(i) for i in np.nonzero(np.abs(result.energies) < tol)[0]]


def default_gap_tol(spec: LatticeSpec) -> float:
    """10^-3 of the strong coupling, well inside the dimerization gap."""
    return 1e-3 * max(spec.u, spec.v)


def localize_gap_states(result: SpectralResult, indices: list[int],
                        anchor_sites: list[int] | None = None) -> np.ndarray:
    """Rotate a (near-)degenerate gap-state cluster onto localized combinations.

    Eigensolvers return arbitrary mixtures of degenerate zero modes; protocols
    need one state per site cluster (left edge, each wall, right edge).  Each
    anchor site's basis vector is projected onto the gap subspace and the
    results are Gram-Schmidt orthonormalized, greedily by projection weight.
    Returns the rotated states as columns, one per anchor kept.
    """
    if not indices:
        return np.zeros((result.states.shape[0], 0))
    sub = result.states[:, indices]
    proj = sub @ sub.conj().T
    n = proj.shape[0]
    if anchor_sites is None:
        weights = np.real(np.diag(proj))
        anchor_sites = list(np.argsort(weights)[::-1][: 4 * len(indices)])
    cols = []
    for site in anchor_sites:
        vec = proj[:, site].astype(complex)
        for c in cols:
            vec -= c * (c.conj() @ vec)
        norm = np.linalg.norm(vec)
        if norm > 1e-6:
            cols.append(vec / norm)
        if len(cols) == len(indices):
            break
    return np.column_stack(cols) if cols else np.zeros((n, 0))


def gap_mode_peaks(result: SpectralResult, tol: float) -> list[int]:
    """Peak site of each localized gap mode, sorted."""
    idx = locate_gap_states(result, tol)
    rotated = localize_gap_states(result, idx)
    return sorted(int(np.argmax(np.abs(rotated[:, k]))) for k in range(rotated.shape[1]))


def band_sweep(template: LatticeSpec, deltas: np.ndarray) -> list[tuple[float, SpectralResult]]:
    """Diagonalize the template lattice with u fixed and v = delta * u."""
    out = []
    for d in np.asarray(deltas, dtype=float):
        if d <= 0:
            raise ValueError("delta values must be positive")
        spec = replace(template, v=d * template.u)
        out.append((float(d), diagonalize(build_ssh(spec))))
    return out


def bulk_gap(result: SpectralResult, tol: float) -> float:
    """Smallest |E| outside the near-zero cluster (the in-gap modes)."""
    abse = np.sort(np.abs(result.energies))
    above = abse[abse >= tol]
    return float(above[0]) if above.size else 0.0
