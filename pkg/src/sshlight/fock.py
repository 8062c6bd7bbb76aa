"""Brute-force reference simulator on a truncated multimode Fock space.

Validation-only: at most 4 modes and photon cutoff 16 per mode.  States are
dense amplitude vectors over the product number basis; operators act through
sparse matrices and exponentials are applied with expm_multiply, so nothing
larger than the state vector is ever densified.  Truncation is measured, not
hidden: every constructor records the probability weight sitting in the top
Fock level of each mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from .lattice import CouplingSchedule
from .states import CorrelationTensor, GaussianMoments

MAX_MODES = 4
MAX_CUTOFF = 16
LEAK_WARN = 1e-6


class FockError(ValueError):
    pass


@lru_cache(maxsize=32)
def _mode_ops(n_modes: int, cutoff: int) -> tuple:
    """Annihilation operator of each mode on the product space, sparse."""
    d = cutoff + 1
    a = sparse.diags(np.sqrt(np.arange(1, d)), 1, format="csr")
    eye = sparse.identity(d, format="csr")
    ops = []
    for k in range(n_modes):
        factors = [a if m == k else eye for m in range(n_modes)]
        op = factors[0]
        for f in factors[1:]:
            op = sparse.kron(op, f, format="csr")
        ops.append(op)
    return tuple(ops)


@dataclass
class FockState:
    n_modes: int
    cutoff: int
    amplitudes: np.ndarray
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.n_modes <= MAX_MODES:
            raise FockError(f"n_modes must be in [1, {MAX_MODES}]")
        if not 1 <= self.cutoff <= MAX_CUTOFF:
            raise FockError(f"cutoff must be in [1, {MAX_CUTOFF}]")
        dim = (self.cutoff + 1) ** self.n_modes
        if self.amplitudes.shape != (dim,):
            raise FockError(f"amplitude vector must have length {dim}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockState":
        return FockState(self.n_modes, self.cutoff, self.amplitudes / self.norm,
                         list(self.warnings))

    def leakage(self) -> float:
        """Largest per-mode probability of sitting in the top Fock level."""
        d = self.cutoff + 1
        probs = np.abs(self.amplitudes.reshape((d,) * self.n_modes)) ** 2
        worst = 0.0
        for k in range(self.n_modes):
            worst = max(worst, float(np.take(probs, -1, axis=k).sum()))
        return worst

    def _note_leakage(self, context: str):
        leak = self.leakage()
        if leak > LEAK_WARN:
            self.warnings.append(f"{context}: top-level leakage {leak:.2e}")


def vacuum(n_modes: int, cutoff: int) -> FockState:
    amps = np.zeros((cutoff + 1) ** n_modes, dtype=complex)
    amps[0] = 1.0
    return FockState(n_modes, cutoff, amps)


def _apply_exp(state: FockState, generator: sparse.spmatrix, context: str) -> FockState:
    amps = expm_multiply(generator, state.amplitudes)
    out = FockState(state.n_modes, state.cutoff, amps, list(state.warnings))
    out._note_leakage(context)
    return out


def create(state: FockState, mode: int) -> FockState:
    ops = _mode_ops(state.n_modes, state.cutoff)
    amps = ops[mode].conj().T @ state.amplitudes
    out = FockState(state.n_modes, state.cutoff, amps, list(state.warnings)).normalized()
    out._note_leakage("create")
    return out


def displace(state: FockState, mode: int, alpha: complex) -> FockState:
    a = _mode_ops(state.n_modes, state.cutoff)[mode]
    gen = alpha * a.conj().T - np.conj(alpha) * a
    return _apply_exp(state, gen.tocsc(), "displace")


def squeeze(state: FockState, mode: int, r: float, theta: float = 0.0) -> FockState:
    """exp[(xi* a^2 - xi a+^2)/2] with xi = r e^{i theta}."""
    a = _mode_ops(state.n_modes, state.cutoff)[mode]
    xi = r * np.exp(1j * theta)
    gen = 0.5 * (np.conj(xi) * (a @ a) - xi * (a.conj().T @ a.conj().T))
    return _apply_exp(state, gen.tocsc(), "squeeze")


def two_mode_squeeze(state: FockState, mode_a: int, mode_b: int, r: float,
                     theta: float = 0.0) -> FockState:
    """exp[xi* a b - xi a+ b+] with xi = r e^{i theta}."""
    if mode_a == mode_b:
        raise FockError("two-mode squeeze needs distinct modes")
    ops = _mode_ops(state.n_modes, state.cutoff)
    a, b = ops[mode_a], ops[mode_b]
    xi = r * np.exp(1j * theta)
    gen = np.conj(xi) * (a @ b) - xi * (a.conj().T @ b.conj().T)
    return _apply_exp(state, gen.tocsc(), "two_mode_squeeze")


def evolve_exact(state: FockState, schedule: CouplingSchedule, dz: float) -> FockState:
    """Midpoint-rule stepping of exp(-i H_hat dz), H_hat = sum H_mn a+_m a_n."""
    if schedule.n_sites != state.n_modes:
        raise FockError("schedule size must equal the number of modes")
    ops = _mode_ops(state.n_modes, state.cutoff)
    hops = [[(ops[m].conj().T @ ops[n]).tocsc() for n in range(state.n_modes)]
            for m in range(state.n_modes)]
    amps = state.amplitudes
    z = 0.0
    total = schedule.total_length
    while z < total - 1e-12:
        step = min(dz, total - z)
        h = schedule.hamiltonian(z + 0.5 * step)
        gen = None
        for m in range(state.n_modes):
            for n in range(state.n_modes):
                if h[m, n] != 0:
                    term = (-1j * step * h[m, n]) * hops[m][n]
                    gen = term if gen is None else gen + term
        if gen is None:
            z += step
            continue
        amps = expm_multiply(gen, amps)
        z += step
    out = FockState(state.n_modes, state.cutoff, amps, list(state.warnings))
    out._note_leakage("evolve")
    return out


def expectations(state: FockState,
                 phases: tuple[float, ...] = ()) -> tuple[GaussianMoments, CorrelationTensor, dict]:
    """All first, second and fourth moments plus quadrature variances.

    Returns moments and tensor shaped like the engine's own records so the
    two can be compared entrywise, and a dict of Var X_i(phi) per (site,
    phase).
    """
    ops = _mode_ops(state.n_modes, state.cutoff)
    psi = state.amplitudes
    nm = state.n_modes

    def ev(op):
        return complex(np.vdot(psi, op @ psi))

    alpha = np.array([ev(ops[i]) for i in range(nm)])
    n_mat = np.empty((nm, nm), dtype=complex)
    m_mat = np.empty((nm, nm), dtype=complex)
    a_psi = [ops[i] @ psi for i in range(nm)]
    ad_psi = [ops[i].conj().T @ psi for i in range(nm)]
    for i in range(nm):
        for j in range(nm):
            n_mat[i, j] = np.vdot(a_psi[i], a_psi[j])
            m_mat[i, j] = np.vdot(ad_psi[i], a_psi[j])
    g2 = np.empty((nm, nm, nm, nm), dtype=complex)
    for k in range(nm):
        for l in range(nm):
            right = ops[k].conj().T @ a_psi[l]
            for i in range(nm):
                for j in range(nm):
                    # <a+_i a_j a+_k a_l> = <(a+_j a_i psi), (a+_k a_l psi)>
                    left = ops[j].conj().T @ a_psi[i]
                    g2[i, j, k, l] = np.vdot(left, right)
    quads = {}
    for phi in phases:
        for i in range(nm):
            x = (ops[i] * np.exp(1j * phi) + ops[i].conj().T * np.exp(-1j * phi)) * 0.5
            mean = np.real(np.vdot(psi, x @ psi))
            quads[(i, round(float(phi), 12))] = float(
                np.real(np.vdot(x @ psi, x @ psi)) - mean ** 2)
    moments = GaussianMoments(alpha=alpha, n_mat=n_mat, m_mat=m_mat)
    return moments, CorrelationTensor(g2=g2), quads


def pair_variance(state: FockState, i: int, j: int, phi: float) -> float:
    """Var of (X_i(phi) + X_j(phi)) / sqrt(2) evaluated directly."""
    ops = _mode_ops(state.n_modes, state.cutoff)
    psi = state.amplitudes
    xi = (ops[i] * np.exp(1j * phi) + ops[i].conj().T * np.exp(-1j * phi)) * 0.5
    xj = (ops[j] * np.exp(1j * phi) + ops[j].conj().T * np.exp(-1j * phi)) * 0.5
    xp = (xi + xj) / np.sqrt(2.0)
    mean = np.real(np.vdot(psi, xp @ psi))
    return float(np.real(np.vdot(xp @ psi, xp @ psi)) - mean ** 2)
