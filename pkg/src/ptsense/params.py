"""Physical parameters of the PT-symmetric two-level sensor."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = ["PtParams", "TimePoint"]


@dataclass(frozen=True)
class PtParams:
    """Coupling rate omega, gain-loss rate gamma and perturbation delta (rad/s).

    The unbroken phase gamma/omega <= 1 is enforced; the exceptional point
    gamma = omega is allowed (closed-form evaluators are regular there), the
    broken phase is rejected.  kappa = sqrt(omega^2 - gamma^2) is derived.
    """

    omega: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega) and math.isfinite(self.gamma) and math.isfinite(self.delta)):
            raise ValueError("parameters must be finite")
        if self.omega <= 0.0:
            raise ValueError("omega must be positive")
        if self.gamma < 0.0:
            raise ValueError("gamma must be non-negative")
        if self.gamma > self.omega:
            raise ValueError(
                f"broken phase rejected: gamma/omega = {self.gamma / self.omega:.6g} > 1"
            )

    @property
    def kappa(self) -> float:
        """sqrt(omega^2 - gamma^2); zero exactly at the exceptional point."""
        return math.sqrt(max((self.omega - self.gamma) * (self.omega + self.gamma), 0.0))

    @property
    def gamma_ratio(self) -> float:
        return self.gamma / self.omega

    def with_omega(self, omega: float) -> "PtParams":
        """Same gamma/delta at a shifted coupling (finite-difference helper)."""
        return replace(self, omega=omega)

    def perturbed(self) -> "PtParams":
        """Parameters with the perturbation folded in: Omega = omega + delta."""
        return PtParams(omega=self.omega + self.delta, gamma=self.gamma, delta=0.0)


@dataclass(frozen=True)
class TimePoint:
    """Physical time t (s) and the scaled time tau = kappa*t (dimensionless)."""

    t: float
    tau: float

    @staticmethod
    def from_t(p: PtParams, t: float) -> "TimePoint":
        return TimePoint(t=t, tau=p.kappa * t)

    @staticmethod
    def from_tau(p: PtParams, tau: float) -> "TimePoint":
        if tau == 0.0:
            return TimePoint(t=0.0, tau=0.0)
        if p.kappa == 0.0:
            raise ValueError("tau > 0 is unreachable at the exceptional point (kappa = 0)")
        return TimePoint(t=tau / p.kappa, tau=tau)
