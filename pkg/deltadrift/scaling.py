#
# Time-dependent scaling transform.
#
# A potential of the form U(x, t) = U(x / R(t)) / R(t)^2 with R(t) = r0 + v t
# becomes stationary in the rescaled coordinate x_bar = x / R(t) and the
# rescaled time tau = t / (r0 R(t)). Any stationary eigenstate psi_k of the
# rescaled problem maps back to an exact lab-frame solution
#
#   phi_k(x, t) = R^(-1/2) exp(i mu v x^2 / (2 hbar R)) exp(-i E_k tau / hbar) psi_k(x / R)
#
# Everything here works on scalars and numpy arrays alike.
#

import logging

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from scipy.integrate import trapezoid

from deltadrift.core import NonPositiveScale, PhysicalParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalingFrame:
    """Linear scale ``R(t) = r0 + v t`` and the maps it induces."""

    r0: float = 1.0
    v: float = 0.0

    @classmethod
    def from_params(cls, params: PhysicalParams):
        return cls(r0=params.r0, v=params.v)


@dataclass(frozen=True)
class RescaledEigenstate:
    """Stationary state of the rescaled problem.

    ``amplitude`` is sampled on demand, it takes rescaled coordinates and
    returns (possibly complex) values.
    """

    k_bar: float
    amplitude: Callable
    mu: float = 1.0
    hbar: float = 1.0

    @property
    def energy_bar(self):
        return self.hbar ** 2 * self.k_bar ** 2 / (2.0 * self.mu)


def _unwrap(value):
    value = np.asarray(value)
    return value if value.ndim else value.item()


def scale_factor(frame: ScalingFrame, t):
    """Return ``R(t) = r0 + v t``.

    :raises NonPositiveScale: if ``R(t) <= 0`` for any requested time
    """
    t = np.asarray(t, dtype=float)
    scale = frame.r0 + frame.v * t
    bad = scale <= 0
    if np.any(bad):
        t_bad = float(np.atleast_1d(t)[np.argmax(np.atleast_1d(bad))])
        raise NonPositiveScale(t_bad, frame.r0 + frame.v * t_bad)
    return _unwrap(scale)


def tau_of_t(frame: ScalingFrame, t):
    """Rescaled time ``tau = int_0^t ds / R(s)^2 = t / (r0 R(t))``."""
    scale = scale_factor(frame, t)
    return _unwrap(np.asarray(t, dtype=float) / (frame.r0 * scale))


def tau_limit(frame: ScalingFrame) -> float:
    """Value ``tau`` approaches as ``t`` grows; infinite unless ``v > 0``."""
    if frame.v > 0:
        return 1.0 / (frame.r0 * frame.v)
    return np.inf


def frame_map(frame: ScalingFrame, x, t):
    """Rescaled coordinate ``x / R(t)``."""
    return _unwrap(np.asarray(x, dtype=float) / scale_factor(frame, t))


def lab_coordinate(frame: ScalingFrame, x_bar, t):
    """Inverse of :func:`frame_map`."""
    return _unwrap(np.asarray(x_bar, dtype=float) * scale_factor(frame, t))


def lab_wavefunction(frame: ScalingFrame, state: RescaledEigenstate, x, t):
    """Lab-frame amplitude of a rescaled eigenstate at position ``x`` and
    time ``t``.

    The result is the product of the ``R^(-1/2)`` prefactor, the gauge phase
    ``exp(i mu v x^2 / (2 hbar R))``, the energy phase
    ``exp(-i E tau / hbar)`` and ``psi_k(x / R)``.

    :raises NonPositiveScale: if ``R(t) <= 0``
    """
    scale = scale_factor(frame, t)
    tau = t / (frame.r0 * scale)
    x = np.asarray(x, dtype=float)

    gauge = np.exp(1j * state.mu * frame.v * x ** 2 / (2.0 * state.hbar * scale))
    energy = np.exp(-1j * state.energy_bar * tau / state.hbar)

    value = state.amplitude(x / scale) * gauge * energy / np.sqrt(scale)
    return _unwrap(value)


def box_eigenstate(a_bar: float, n: int, mu: float = 1.0, hbar: float = 1.0) -> RescaledEigenstate:
    """Box state ``sqrt(2 / a_bar) sin(n pi x_bar / a_bar)`` on ``[0, a_bar]``."""
    k_bar = n * np.pi / a_bar
    norm = np.sqrt(2.0 / a_bar)

    def amplitude(x_bar):
        x_bar = np.asarray(x_bar, dtype=float)
        inside = (x_bar >= 0.0) & (x_bar <= a_bar)
        return np.where(inside, norm * np.sin(k_bar * x_bar), 0.0)

    return RescaledEigenstate(k_bar=k_bar, amplitude=amplitude, mu=mu, hbar=hbar)


def free_eigenstate(k_bar: float, mu: float = 1.0, hbar: float = 1.0) -> RescaledEigenstate:
    """Unnormalized free state ``sin(k_bar x_bar)``."""
    return RescaledEigenstate(k_bar=k_bar,
                              amplitude=lambda x_bar: np.sin(k_bar * np.asarray(x_bar, dtype=float)),
                              mu=mu, hbar=hbar)


def project(states: Sequence[RescaledEigenstate], initial: Callable, x_bar) -> np.ndarray:
    """Expansion coefficients ``c_k = <psi_k | initial>`` of ``initial`` in the
    rescaled basis ``states``, by trapezoidal quadrature on ``x_bar``."""
    x_bar = np.asarray(x_bar, dtype=float)
    values = np.asarray(initial(x_bar), dtype=complex)
    return np.array([trapezoid(np.conj(state.amplitude(x_bar)) * values, x_bar)
                     for state in states])


def superpose(frame: ScalingFrame, states: Sequence[RescaledEigenstate], coeffs, x, t):
    """Lab-frame state ``sum_k c_k phi_k(x, t)``."""
    if len(states) != len(coeffs):
        raise ValueError(f"got {len(states)} states but {len(coeffs)} coefficients")
    total = np.zeros(np.shape(x), dtype=complex)
    for state, c in zip(states, coeffs):
        total = total + c * lab_wavefunction(frame, state, x, t)
    return total
