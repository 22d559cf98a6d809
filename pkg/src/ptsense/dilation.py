"""Scheme I: embedding the PT-symmetric qubit in a four-dimensional
Hermitian system via a metric operator, and post-selecting back.

The auxiliary two-level subsystem is slaved to the PT subsystem by the metric
eta (chi = eta psi), which makes the joint norm <psi|(1 + eta^2)|psi> a
constant of motion; the enlarged evolution is therefore genuinely unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBranch, MetricSingular
from .linalg import PAULI_X, PAULI_Y, su2_like_propagator
from .params import PtParams
from .pt_system import hamiltonian_pt, propagator_pt
from .states import DensityMatrix2, DensityMatrix4, PureState2, PureState4

__all__ = [
    "MetricOperator",
    "PostSelectionOutcome",
    "metric_operator",
    "pt_inner",
    "dilate_initial",
    "hamiltonian_4d",
    "propagator_4d",
    "evolve_enlarged_state",
    "evolve_enlarged",
    "postselect",
]

_EP_MARGIN = 1e-12


@dataclass(frozen=True)
class MetricOperator:
    """Metric eta = (omega I + gamma sigma_y)/kappa and the eigenvector
    arrangement normalization f = 1/sqrt(2 kappa / omega)."""

    eta: np.ndarray
    f: float

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.eta)


@dataclass(frozen=True)
class PostSelectionOutcome:
    """Success/failure rates, raw populations and the conditioned states.

    In the unbroken phase p_suc >= (omega - gamma)/(2 omega) > 0, so the
    success branch always exists; rho_a is None in the measure-zero case of
    a vanishing failure branch.
    """

    p_suc: float
    p_fail: float
    populations: np.ndarray
    rho_pt: DensityMatrix2
    rho_a: DensityMatrix2 | None


def metric_operator(p: PtParams) -> MetricOperator:
    """Hermitian positive metric linking the auxiliary to the PT subsystem.

    Singular at the exceptional point; gamma/omega >= 1 - 1e-12 is rejected.
    """
    if p.gamma / p.omega >= 1.0 - _EP_MARGIN:
        raise MetricSingular(
            f"metric operator singular: gamma/omega = {p.gamma / p.omega:.12g}"
        )
    eta = (p.omega * np.eye(2, dtype=complex) + p.gamma * PAULI_Y) / p.kappa
    return MetricOperator(eta=eta, f=1.0 / math.sqrt(2.0 * p.kappa / p.omega))


def _eta_inverse(p: PtParams) -> np.ndarray:
    return (p.omega * np.eye(2, dtype=complex) - p.gamma * PAULI_Y) / p.kappa


def pt_inner(u, v) -> complex:
    """Parity-time inner product (u, v) = (sigma_x conj(u)) . v.

    The PT norm of the Hamiltonian eigenvectors is +-2 kappa/omega in the raw
    arrangement, which is what the metric normalization f compensates.
    """
    uu = np.asarray(u, dtype=complex).reshape(-1)
    vv = np.asarray(v, dtype=complex).reshape(-1)
    return complex((PAULI_X @ uu.conj()) @ vv)


def dilate_initial(psi0, p: PtParams) -> PureState4:
    """Normalized enlarged initial state (psi0, eta psi0)^T."""
    amps = psi0.amplitudes if isinstance(psi0, PureState2) else np.asarray(psi0, dtype=complex)
    eta = metric_operator(p).eta
    raw = np.concatenate([amps, eta @ amps])
    norm = np.linalg.norm(raw)
    return PureState4(amplitudes=raw / norm, norm_factor=1.0 / norm)


def hamiltonian_4d(p: PtParams) -> np.ndarray:
    """Hermitian generator of the enlarged system.

    Built from the blocks X = H eta^{-1} + eta H (Hermitian) and
    Y = H - H^dag (anti-Hermitian) as (kappa/2 omega) [[X, Y], [-Y, X]].
    The prefactor kappa/(2 omega) is fixed by requiring the generator to act
    on the embedded subspace as (u, eta u) -> (H u, eta H u); its spectrum is
    then +-kappa/2, degenerate twice, matching the PT eigenvalues.
    """
    if p.gamma / p.omega >= 1.0 - _EP_MARGIN:
        raise MetricSingular("enlarged Hamiltonian needs a non-singular metric")
    h = hamiltonian_pt(p)
    eta = metric_operator(p).eta
    x = h @ _eta_inverse(p) + eta @ h
    y = h - h.conj().T
    f2 = p.kappa / (2.0 * p.omega)
    out = np.empty((4, 4), dtype=complex)
    out[:2, :2] = f2 * x
    out[:2, 2:] = f2 * y
    out[2:, :2] = -f2 * y
    out[2:, 2:] = f2 * x
    return 0.5 * (out + out.conj().T)  # scrub roundoff asymmetry


def propagator_4d(p: PtParams, t: float) -> np.ndarray:
    """Unitary propagator exp(-i H_4d t) of the enlarged system.

    H_4d squares to (kappa/2)^2 * I, so the same cos/sinc closed form as for
    the two-level propagator applies; unitarity holds to ~1e-11 even at
    gamma/omega = 1 - 1e-6.
    """
    h4 = hamiltonian_4d(p)
    return su2_like_propagator(h4, (0.5 * p.kappa) ** 2, t)


def evolve_enlarged_state(psi0, p: PtParams, t: float) -> PureState4:
    """Enlarged pure state (psi_t, eta psi_t)^T / C_n at time t.

    Computed from the synchronized construction (evolve the PT subsystem,
    apply the metric) rather than from propagator_4d; the two paths agree to
    machine precision and are cross-checked in the tests.
    """
    amps = psi0.amplitudes if isinstance(psi0, PureState2) else np.asarray(psi0, dtype=complex)
    eta = metric_operator(p).eta
    psi_raw = propagator_pt(p, t) @ amps
    psi_t = psi_raw / np.linalg.norm(psi_raw)
    chi_t = eta @ psi_t
    c_n = 1.0 / math.sqrt(1.0 + float(np.vdot(chi_t, chi_t).real))
    return PureState4(amplitudes=c_n * np.concatenate([psi_t, chi_t]), norm_factor=c_n)


def evolve_enlarged(psi0, p: PtParams, t: float) -> DensityMatrix4:
    """Rank-one density matrix of the enlarged system."""
    return evolve_enlarged_state(psi0, p, t).density()


def postselect(rho4: DensityMatrix4) -> PostSelectionOutcome:
    """Collapse the enlarged state onto the PT (success) or auxiliary
    (failure) subsystem.

    Both branch probabilities are computed from their own diagonal sums and
    checked to add to one, so a failure localizes to one branch.
    """
    m = rho4.matrix if isinstance(rho4, DensityMatrix4) else np.asarray(rho4, dtype=complex)
    pops = np.diagonal(m).real.copy()
    p_suc = float(pops[0] + pops[1])
    p_fail = float(pops[2] + pops[3])
    if abs(p_suc + p_fail - 1.0) > 1e-12:
        raise EmptyBranch(f"branch probabilities do not sum to 1: {p_suc + p_fail:.15g}")
    if p_suc < 1e-14:
        raise EmptyBranch("success branch has vanishing probability")
    rho_pt = DensityMatrix2(m[:2, :2] / p_suc)
    rho_a = DensityMatrix2(m[2:, 2:] / p_fail) if p_fail >= 1e-14 else None
    return PostSelectionOutcome(
        p_suc=p_suc, p_fail=p_fail, populations=pops, rho_pt=rho_pt, rho_a=rho_a
    )
