"""Ready-made test problems for the fractional solver."""

from __future__ import annotations

import numpy as np

from .solver import FDEProblem

__all__ = ["mittag_leffler_problem", "van_der_pol_problem"]


def mittag_leffler_problem(alpha: float, lam: complex, T: float) -> FDEProblem:
    """Linear problem with unit initial value; exact solution E_alpha(lam t^alpha).

    A real lam gives a scalar problem.  A complex lam is embedded as a real
    2-dimensional system over (real, imaginary) parts.
    """
    lam = complex(lam)
    if lam.imag == 0.0:
        lr = lam.real
        return FDEProblem(
            alpha=alpha, dim=1, u0=np.array([1.0]), T=T,
            rhs=lambda t, u: lr * u,
            jacobian=lambda t, u: np.array([[lr]]),
        )
    mat = np.array([[lam.real, -lam.imag], [lam.imag, lam.real]])
    return FDEProblem(
        alpha=alpha, dim=2, u0=np.array([1.0, 0.0]), T=T,
        rhs=lambda t, u: mat @ u,
        jacobian=lambda t, u: mat,
    )


def van_der_pol_problem(alpha: float, mu: float, x0: float, y0: float,
                        T: float) -> FDEProblem:
    """Fractional Van der Pol oscillator as a first-order system.

    x' is driven by y and y by mu (1 - x^2) y - x, both through the fractional
    derivative of order alpha; mu >= 0 is the damping constant.
    """
    if mu < 0.0:
        raise ValueError(f"damping constant must be nonnegative, got {mu}")

    def rhs(t, u):
        x, y = u
        return np.array([y, mu * (1.0 - x * x) * y - x])

    def jacobian(t, u):
        x, y = u
        return np.array([[0.0, 1.0],
                         [-2.0 * mu * x * y - 1.0, mu * (1.0 - x * x)]])

    return FDEProblem(alpha=alpha, dim=2, u0=np.array([float(x0), float(y0)]),
                      T=T, rhs=rhs, jacobian=jacobian)
