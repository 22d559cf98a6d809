"""Fixed-step RK4 machinery for linear flows.

For a linear ODE y' = A y, one RK4 step of size h is exactly the matrix
P4(hA) = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24 applied to y, so n steps
are P4(hA)^n.  The helpers below evaluate that power either by binary
squaring (general A) or through the spectral scalars of an involutory-like
generator (H^2 = c^2 I), which stays accurate arbitrarily close to the
exceptional point where the generator is nearly defective.  Each requested
time is integrated single-shot from t = 0: chaining segment products
amplifies the involutory defect of H/c and loses accuracy near the EP.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidStep

__all__ = [
    "rk4_step",
    "rk4_onestep_matrix",
    "rk4_linear_power",
    "rk4_su2_power",
    "steps_for",
    "lindblad_superoperator",
    "nh_superoperator",
]


def steps_for(t: float, dt: float) -> tuple[int, float]:
    """Number of steps and the shrunken step covering [0, t] exactly."""
    if dt <= 0.0:
        raise InvalidStep("dt must be positive")
    if t <= 0.0:
        return 0, 0.0
    n = max(1, int(math.ceil(t / dt - 1e-12)))
    return n, t / n


def rk4_step(y, h: float, rhs):
    """One classical RK4 step for a generic (possibly nonlinear) RHS."""
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_onestep_matrix(a: np.ndarray, h: float) -> np.ndarray:
    """P4(h*A): the exact one-step operator of fixed-step RK4 on y' = A y."""
    dim = a.shape[0]
    out = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in range(1, 5):
        term = term @ (a * h) / k
        out = out + term
    return out


def rk4_linear_power(a: np.ndarray, y0: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Fixed-step RK4 solution of y' = A y at time t, as P4(hA)^n y0.

    Algebraically identical to stepping sequentially with the same h; the
    power is taken by binary squaring, which is stable whenever the one-step
    operator is non-expansive (Lindblad and Schrodinger generators here).
    """
    n, h = steps_for(t, dt)
    y = np.asarray(y0, dtype=complex).copy()
    if n == 0:
        return y
    p = rk4_onestep_matrix(a, h)
    while n:
        if n & 1:
            y = p @ y
        n >>= 1
        if n:
            p = p @ p
    return y


def rk4_su2_power(h_mat: np.ndarray, c: float, t: float, dt: float) -> np.ndarray:
    """P4(-i*h*H)^n for H with H^2 = c^2 I, via its spectral scalars.

    The one-step operator shares the spectral projectors of H, so its n-th
    power is (p^n + m^n)/2 * I + (p^n - m^n)/(2c) * H with p, m = P4(-+ihc).
    No matrix products are involved, which avoids the cancellation that
    squaring suffers when the state norm peaks mid-period near the EP.
    """
    n, h = steps_for(t, dt)
    dim = h_mat.shape[0]
    if n == 0:
        return np.eye(dim, dtype=complex)
    x = -1j * h * c
    p = 1.0 + x + x**2 / 2.0 + x**3 / 6.0 + x**4 / 24.0
    m = 1.0 - x + x**2 / 2.0 - x**3 / 6.0 + x**4 / 24.0
    pn, mn = p**n, m**n
    if c == 0.0:
        # degenerate projectors: P4 reduces to I - i*h*H (H^2 = 0), whose
        # n-th power telescopes to I - i*(n*h)*H
        return np.eye(dim, dtype=complex) - 1j * (n * h) * h_mat
    return 0.5 * (pn + mn) * np.eye(dim, dtype=complex) + 0.5 * (pn - mn) * h_mat / c


def lindblad_superoperator(h0: np.ndarray, jump: np.ndarray) -> np.ndarray:
    """Row-stacked superoperator of d(rho) = -i[H0,rho] + J rho J^+ - {J^+J, rho}/2.

    vec is row-major: vec(A rho B) = (A kron B^T) vec(rho).
    """
    dim = h0.shape[0]
    iden = np.eye(dim, dtype=complex)
    left = lambda op: np.kron(op, iden)
    right = lambda op: np.kron(iden, op.T)
    jdj = jump.conj().T @ jump
    return (
        -1j * (left(h0) - right(h0))
        + left(jump) @ right(jump.conj().T)
        - 0.5 * (left(jdj) + right(jdj))
    )


def nh_superoperator(h_nh: np.ndarray) -> np.ndarray:
    """Row-stacked superoperator of the linear flow d(sigma) = -i(H sigma - sigma H^+)."""
    dim = h_nh.shape[0]
    iden = np.eye(dim, dtype=complex)
    return -1j * (np.kron(h_nh, iden) - np.kron(iden, h_nh.conj()))
