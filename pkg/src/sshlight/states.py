"""Initial states as second moments plus fourth-order correlation tensors.

A state enters the engine as first moments <a_i>, the number matrix
N_ij = <a+_i a_j>, the anomalous matrix M_ij = <a_i a_j>, and the tensor
g2[i,j,k,l] = <a+_i a_j a+_k a_l>.  For Gaussian states the tensor follows
from the moments by Wick factorization; the single photon needs its own
closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GaussianMoments:
    """First and second moments; N Hermitian, M symmetric."""

    alpha: np.ndarray
    n_mat: np.ndarray
    m_mat: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.alpha)

    @property
    def total_photons(self) -> float:
        return float(np.real(np.trace(self.n_mat)))

    def centered(self) -> tuple[np.ndarray, np.ndarray]:
        """(N, M) with the displacement contribution removed."""
        ac = self.alpha.conj()
        return (self.n_mat - np.outer(ac, self.alpha),
                self.m_mat - np.outer(self.alpha, self.alpha))


@dataclass(frozen=True)
class CorrelationTensor:
    """Dense fourth-order tensor g2[i,j,k,l] = <a+_i a_j a+_k a_l>."""

    g2: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.g2.shape[0]

    def entry(self, i: int, j: int, k: int, l: int) -> complex:
        return complex(self.g2[i, j, k, l])

    def hermiticity_defect(self) -> float:
        """Max deviation from g2[i,j,k,l] = conj(g2[l,k,j,i])."""
        return float(np.abs(self.g2 - self.g2.transpose(3, 2, 1, 0).conj()).max())


@dataclass(frozen=True)
class InitialState:
    """A labelled initial condition for the propagation engine."""

    label: str
    moments: GaussianMoments
    tensor: CorrelationTensor
    gaussian: bool


def zero_moments(n: int) -> GaussianMoments:
    return GaussianMoments(alpha=np.zeros(n, dtype=complex),
                           n_mat=np.zeros((n, n), dtype=complex),
                           m_mat=np.zeros((n, n), dtype=complex))


def _check_site(n: int, site: int):
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} modes")


# ---------------------------------------------------------------------------
# Wick factorization
# ---------------------------------------------------------------------------

def wick_g2(m: GaussianMoments) -> CorrelationTensor:
    """Fourth moments of a Gaussian state from its first and second moments.

    Centered covariances pair up as <ABCD> = sum over pairings, and every
    pair of leftover operators contributes a product of means; exact for
    Gaussian states, used both to seed squeezed inputs and as a cross-check
    on tensor evolution.
    """
    n = m.n_sites
    a = m.alpha
    ac = a.conj()
    nb, mb = m.centered()
    eye_nt = np.eye(n) + nb.T  # (j,k) entry: delta_jk + <a_j a+_k> centered part
    g = np.einsum('i,j,k,l->ijkl', ac, a, ac, a)
    g += np.einsum('ij,k,l->ijkl', nb, ac, a)
    g += np.einsum('ik,j,l->ijkl', mb.conj(), a, a)
    g += np.einsum('il,j,k->ijkl', nb, a, ac)
    g += np.einsum('jk,i,l->ijkl', eye_nt, ac, a)
    g += np.einsum('jl,i,k->ijkl', mb, ac, ac)
    g += np.einsum('kl,i,j->ijkl', nb, ac, a)
    g += np.einsum('ij,kl->ijkl', nb, nb)
    g += np.einsum('ik,jl->ijkl', mb.conj(), mb)
    g += np.einsum('il,jk->ijkl', nb, eye_nt)
    return CorrelationTensor(g2=g)


def wick_g2_entry(m: GaussianMoments, i: int, j: int, k: int, l: int) -> complex:
    """Single tensor entry by Wick factorization, O(1)."""
    a = m.alpha
    ac = a.conj()
    nb, mb = m.centered()
    djk = 1.0 if j == k else 0.0
    val = (ac[i] * a[j] * ac[k] * a[l]
           + nb[i, j] * ac[k] * a[l]
           + np.conj(mb[i, k]) * a[j] * a[l]
           + nb[i, l] * a[j] * ac[k]
           + (djk + nb[k, j]) * ac[i] * a[l]
           + mb[j, l] * ac[i] * ac[k]
           + nb[k, l] * ac[i] * a[j]
           + nb[i, j] * nb[k, l]
           + np.conj(mb[i, k]) * mb[j, l]
           + nb[i, l] * (djk + nb[k, j]))
    return complex(val)


# ---------------------------------------------------------------------------
# initializers
# ---------------------------------------------------------------------------

def init_single_photon(n: int, site: int) -> tuple[GaussianMoments, CorrelationTensor]:
    """One photon in a single waveguide: a+_d |0>."""
    _check_site(n, site)
    m = zero_moments(n)
    m.n_mat[site, site] = 1.0
    # two annihilations kill the state, so only the commutator term survives:
    # g2[i,j,k,l] = delta_jk * delta_id * delta_ld
    g = np.zeros((n, n, n, n), dtype=complex)
    for j in range(n):
        g[site, j, j, site] = 1.0
    return m, CorrelationTensor(g2=g)


def init_coherent(n: int, site: int, alpha: complex) -> tuple[GaussianMoments, CorrelationTensor]:
    """Displaced vacuum with amplitude alpha in one waveguide."""
    _check_site(n, site)
    m = zero_moments(n)
    m.alpha[site] = alpha
    m.n_mat[site, site] = abs(alpha) ** 2
    m.m_mat[site, site] = alpha ** 2
    return m, wick_g2(m)


def init_sq_vacuum(n: int, site: int, r: float,
                   theta: float = 0.0) -> tuple[GaussianMoments, CorrelationTensor]:
    """Single-mode squeezed vacuum, generator (xi* a^2 - xi a+^2)/2, xi = r e^{i theta}.

    Sign convention: for real xi the phi = 0 quadrature is squeezed to
    (1/4) e^{-2r}.
    """
    _check_site(n, site)
    if r < 0:
        raise ValueError("squeeze magnitude must be non-negative")
    m = zero_moments(n)
    m.n_mat[site, site] = np.sinh(r) ** 2
    m.m_mat[site, site] = -np.exp(1j * theta) * np.sinh(r) * np.cosh(r)
    return m, wick_g2(m)


def init_two_mode_sq(n: int, site_a: int, site_b: int, r: float,
                     theta: float = 0.0) -> tuple[GaussianMoments, CorrelationTensor]:
    """Two-mode squeezed vacuum between two waveguides, generator
    xi* a b - xi a+ b+."""
    _check_site(n, site_a)
    _check_site(n, site_b)
    if site_a == site_b:
        raise ValueError("two-mode squeezing needs distinct sites")
    if r < 0:
        raise ValueError("squeeze magnitude must be non-negative")
    m = zero_moments(n)
    sh2 = np.sinh(r) ** 2
    m.n_mat[site_a, site_a] = sh2
    m.n_mat[site_b, site_b] = sh2
    cross = -np.exp(1j * theta) * np.sinh(r) * np.cosh(r)
    m.m_mat[site_a, site_b] = cross
    m.m_mat[site_b, site_a] = cross
    return m, wick_g2(m)


def make_initial_state(kind: str, n: int, **kw) -> InitialState:
    """Factory used by the experiment drivers."""
    if kind == "single_photon":
        mom, ten = init_single_photon(n, kw["site"])
        return InitialState("single_photon", mom, ten, gaussian=False)
    if kind == "coherent":
        mom, ten = init_coherent(n, kw["site"], kw.get("alpha", 1.0 + 0.0j))
        return InitialState("coherent", mom, ten, gaussian=True)
    if kind == "squeezed":
        mom, ten = init_sq_vacuum(n, kw["site"], kw.get("r", np.arcsinh(1.0)),
                                  kw.get("theta", 0.0))
        return InitialState("squeezed", mom, ten, gaussian=True)
    if kind == "two_mode_squeezed":
        mom, ten = init_two_mode_sq(n, kw["site_a"], kw["site_b"],
                                    kw.get("r", np.arcsinh(1.0)), kw.get("theta", 0.0))
        return InitialState("two_mode_squeezed", mom, ten, gaussian=True)
    if kind == "squeezed_pair":
        ma, ta = init_sq_vacuum(n, kw["site_a"], kw.get("r", np.arcsinh(1.0)),
                                kw.get("theta", 0.0))
        mb, _ = init_sq_vacuum(n, kw["site_b"], kw.get("r", np.arcsinh(1.0)),
                               kw.get("theta", 0.0))
        mom = GaussianMoments(alpha=ma.alpha + mb.alpha, n_mat=ma.n_mat + mb.n_mat,
                              m_mat=ma.m_mat + mb.m_mat)
        return InitialState("squeezed_pair", mom, wick_g2(mom), gaussian=True)
    raise ValueError(f"unknown state kind {kind!r}")


# ---------------------------------------------------------------------------
# physicality
# ---------------------------------------------------------------------------

def physicality_defect(m: GaussianMoments) -> float:
    """How far the quadrature covariance sits below the uncertainty bound.

    Assembles the symmetric-ordered covariance of (X_1..X_n, P_1..P_n) from
    centered moments and returns the most negative eigenvalue of
    sigma + (i/4) Omega (0 for a physical state, up to roundoff).
    """
    n = m.n_sites
    nb, mb = m.centered()
    eye = np.eye(n)
    sxx = 0.25 * (eye + 2 * np.real(nb) + 2 * np.real(mb))
    spp = 0.25 * (eye + 2 * np.real(nb) - 2 * np.real(mb))
    sxp = 0.5 * (np.imag(mb) + np.imag(nb))
    sigma = np.block([[sxx, sxp], [sxp.T, spp]])
    omega = np.block([[np.zeros((n, n)), eye], [-eye, np.zeros((n, n))]])
    w = np.linalg.eigvalsh(sigma + 0.25j * omega)
    return float(min(w.min(), 0.0))
