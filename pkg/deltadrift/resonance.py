#
# Single-channel reduction of the delta-coupled two-state problem and the
# analytic decay law of the resonance trapped behind the delta.
#
# Eliminating the second channel through its Green's function leaves a
# delta of effective strength V0 = U0^2 G2(E) acting on channel 1. The
# scattering amplitude A^2(k) of that problem is expanded about the box
# energies E_n = hbar^2 k_n^2 / (2 mu), k_n = n pi / a, into
#
#   A^2 ~ D^2 (Delta + delta)^2 + H^2,
#
# and the survival probability of a state started in the box is
# P(t) ~ exp(-alpha_n(t)) with alpha_n = 2 |H/D| tau(t) / hbar. The 1 / hbar keeps
# alpha dimensionless; in natural units (hbar = 1) it drops out.
#
# The expansion evaluates |H/D| at E_n and so ignores the level shift delta.
# resonance_pole solves the matching condition for the outgoing-wave pole
# instead, which is what a numerical propagation actually decays with.
#

import logging
import math

from dataclasses import dataclass

import numpy as np

from scipy.optimize import newton

from deltadrift.core import (
    ConsistencyError,
    OpenChannel,
    ParameterError,
    PhysicalParams,
    validate,
)
from deltadrift.scaling import ScalingFrame, tau_limit, tau_of_t

logger = logging.getLogger(__name__)

# Floating-point overshoot tolerated before a probability is clamped.
PROBABILITY_SLACK = 1e-15


@dataclass(frozen=True)
class ResonanceParams:
    """Per-level quantities of the Lorentzian expansion.

    Besides the identities ``h_sq * (1 + g**2) == 1`` and
    ``d_sq * delta_shift**2 + h_sq == 1``, ``delta_shift`` carries the sign
    of ``v0_bar``.
    """

    n: int
    k_bar_n: float
    e_bar_n: float
    v0_bar: float
    d_sq: float
    h_sq: float
    delta_shift: float
    g: float
    hbar: float = 1.0

    @property
    def h_over_d(self) -> float:
        """``|H / D|``, the energy width that sets the escape rate."""
        return math.sqrt(self.h_sq / self.d_sq)

    @property
    def rate(self) -> float:
        """Decay rate of the survival probability in rescaled time."""
        return 2.0 * self.h_over_d / self.hbar


@dataclass(frozen=True)
class ResonancePole:
    """Outgoing-wave pole of level ``n``: complex wavenumber and energy."""

    n: int
    k_bar: complex
    energy_bar: complex
    hbar: float = 1.0

    @property
    def rate(self) -> float:
        """Decay rate ``-2 Im(E) / hbar`` of the trapped probability."""
        return -2.0 * self.energy_bar.imag / self.hbar


@dataclass(frozen=True)
class ScatteringState:
    """Channel-1 scattering state ``sin(k x)`` inside the delta and
    ``A cos(k x + theta)`` beyond it."""

    k_bar: float
    amplitude_A: float
    theta: float
    a_bar: float

    def evaluate(self, x_bar):
        x_bar = np.asarray(x_bar, dtype=float)
        return np.where(x_bar < self.a_bar,
                        np.sin(self.k_bar * x_bar),
                        self.amplitude_A * np.cos(self.k_bar * x_bar + self.theta))


def _check_level(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ParameterError(f"resonance index must be a positive integer, got {n!r}")
    return int(n)


def _clamp_probability(p):
    if p < -PROBABILITY_SLACK or p > 1.0 + PROBABILITY_SLACK:
        raise ConsistencyError(f"probability {p!r} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def _coupling_ratio(params: PhysicalParams, v0_bar, k_bar):
    return 2.0 * params.mu * v0_bar / (params.hbar ** 2 * k_bar)


def greens_second_channel(params: PhysicalParams, energy: float) -> float:
    """Diagonal Green's function of the flat second surface at the delta.

    For a closed channel (``energy < v2_offset``) this is
    ``-mu / (hbar^2 kappa)`` with ``kappa = sqrt(2 mu (V2 - E)) / hbar``.

    :raises OpenChannel: if ``energy >= v2_offset``
    """
    gap = params.v2_offset - energy
    if gap <= 0:
        raise OpenChannel(energy, params.v2_offset)
    kappa = math.sqrt(2.0 * params.mu * gap) / params.hbar
    return -params.mu / (params.hbar ** 2 * kappa)


def effective_strength(params: PhysicalParams, energy: float) -> float:
    """Effective single-channel delta strength at ``energy``.

    Returns ``v0_override`` when set, otherwise ``u0_bar**2 * G2(energy)``.
    Without bare coupling the second channel is irrelevant and the result is
    zero whatever the channel state.
    """
    if params.v0_override is not None:
        return params.v0_override
    if params.u0_bar == 0:
        return 0.0
    return params.u0_bar ** 2 * greens_second_channel(params, energy)


def amplitude_sq(params: PhysicalParams, v0_bar: float, k_bar):
    """Ratio ``A^2(k)`` of outside to inside probability density amplitude.

    ``A^2 = sin^2(k a) + (cos(k a) + g sin(k a))^2`` with
    ``g = 2 mu V0 / (hbar^2 k)``.
    """
    k_bar = np.asarray(k_bar, dtype=float)
    if np.any(k_bar <= 0):
        raise ParameterError("wavenumber must be positive")
    phase = k_bar * params.a_bar
    s = np.sin(phase)
    c = np.cos(phase)
    value = s ** 2 + (c + _coupling_ratio(params, v0_bar, k_bar) * s) ** 2
    return value if value.ndim else float(value)


def scattering_state(params: PhysicalParams, v0_bar: float, k_bar: float) -> ScatteringState:
    """Solve the matching conditions at the delta for ``A`` and ``theta``.

    Continuity gives ``A cos(k a + theta) = sin(k a)`` and the derivative
    jump ``2 mu V0 / hbar^2 * phi(a)`` gives
    ``A sin(k a + theta) = -(cos(k a) + g sin(k a))``.
    """
    if k_bar <= 0:
        raise ParameterError("wavenumber must be positive")
    phase = k_bar * params.a_bar
    s = math.sin(phase)
    along = -(math.cos(phase) + _coupling_ratio(params, v0_bar, k_bar) * s)
    return ScatteringState(k_bar=k_bar,
                           amplitude_A=math.hypot(s, along),
                           theta=math.atan2(along, s) - phase,
                           a_bar=params.a_bar)


def resonance_params(params: PhysicalParams, n: int) -> ResonanceParams:
    """Resonance parameters of level ``n``.

    :raises OpenChannel: if the effective strength needs the Green's
        function of an open second channel
    """
    n = _check_level(n)
    validate(params)

    k_bar_n = n * math.pi / params.a_bar
    e_bar_n = params.hbar ** 2 * k_bar_n ** 2 / (2.0 * params.mu)
    v0_bar = effective_strength(params, e_bar_n)
    g = _coupling_ratio(params, v0_bar, k_bar_n)
    bracket = 1.0 + g ** 2

    return ResonanceParams(
        n=n,
        k_bar_n=k_bar_n,
        e_bar_n=e_bar_n,
        v0_bar=v0_bar,
        d_sq=(params.mu * params.a_bar / (params.hbar ** 2 * k_bar_n)) ** 2 * bracket,
        h_sq=1.0 / bracket,
        delta_shift=2.0 * v0_bar / params.a_bar / bracket,
        g=g,
        hbar=params.hbar,
    )


def lorentzian_approx(res: ResonanceParams, delta_e):
    """``D^2 (Delta + delta)^2 + H^2`` at detuning ``Delta = E - E_n``."""
    value = res.d_sq * (np.asarray(delta_e, dtype=float) + res.delta_shift) ** 2 + res.h_sq
    return value if value.ndim else float(value)


def decay_rate(params: PhysicalParams, n: int) -> float:
    """Analytic rate ``2 |H/D| / hbar`` of ``-ln P`` against rescaled time.

    Written with the closed form ``|H/D| = (hbar^2 k_n / (mu a)) / (1 + g^2)``.
    """
    res = resonance_params(params, n)
    h_over_d = params.hbar ** 2 * res.k_bar_n / (params.mu * params.a_bar) / (1.0 + res.g ** 2)
    return 2.0 * h_over_d / params.hbar


def decay_exponent(params: PhysicalParams, n: int, t):
    """Exponent ``alpha_n(t) = 2 |H/D| tau(t) / hbar``.

    :raises NonPositiveScale: if ``R`` is not positive on ``[0, t]``
    """
    validate(params, float(np.max(t)))
    return decay_rate(params, n) * tau_of_t(ScalingFrame.from_params(params), t)


def survival_probability(params: PhysicalParams, n: int, t):
    """Probability ``exp(-alpha_n(t))`` of remaining inside the delta."""
    alpha = decay_exponent(params, n, t)
    if np.ndim(alpha):
        return np.array([_clamp_probability(p) for p in np.exp(-alpha)])
    return _clamp_probability(math.exp(-alpha))


def nonadiabatic_probability(params: PhysicalParams, n: int, t):
    """Transition probability ``1 - P(t)``."""
    survival = survival_probability(params, n, t)
    if np.ndim(survival):
        return np.array([_clamp_probability(1.0 - p) for p in survival])
    return _clamp_probability(1.0 - survival)


def saturation_probability(params: PhysicalParams, n: int) -> float:
    """Long-time limit of :func:`nonadiabatic_probability`.

    For an expanding scale the rescaled time saturates at ``1 / (r0 v)`` and
    so does the transition probability; otherwise the limit is one.
    """
    horizon = tau_limit(ScalingFrame.from_params(params))
    if math.isinf(horizon):
        return 1.0
    return _clamp_probability(-math.expm1(-decay_rate(params, n) * horizon))


def resonance_wavefunction(params: PhysicalParams, n: int, x_bar, tau):
    """Decaying rescaled wavefunction of level ``n``.

    The box profile ``sqrt(2 / a) sin(k_n x)`` carries the energy phase
    ``exp(-i E_n tau / hbar)`` and the envelope ``exp(-|H/D| tau / hbar)``,
    so its norm inside ``[0, a]`` equals the survival probability.
    """
    res = resonance_params(params, n)
    x_bar = np.asarray(x_bar, dtype=float)
    inside = (x_bar >= 0.0) & (x_bar <= params.a_bar)
    profile = np.where(inside, math.sqrt(2.0 / params.a_bar) * np.sin(res.k_bar_n * x_bar), 0.0)
    return profile * np.exp(-(1j * res.e_bar_n + res.h_over_d) * tau / params.hbar)


def matched_coupling(params: PhysicalParams, n: int, v0_bar: float) -> float:
    """Bare strength ``U0`` that reproduces ``|V0| = v0_bar`` at level ``n``.

    The closed second channel gives a negative ``G2``, so only the magnitude
    of ``v0_bar`` can be matched; the decay rate depends on ``V0^2`` alone.

    :raises OpenChannel: if ``v2_offset`` does not close the second channel
        at ``E_n``
    """
    n = _check_level(n)
    k_bar_n = n * math.pi / params.a_bar
    e_bar_n = params.hbar ** 2 * k_bar_n ** 2 / (2.0 * params.mu)
    green = greens_second_channel(params, e_bar_n)
    return math.sqrt(abs(v0_bar) / abs(green))


def resonance_pole(params: PhysicalParams, n: int) -> ResonancePole:
    """Solve the matching condition for the outgoing-wave resonance of level ``n``.

    Inside the delta the wave is ``sin(k x)``, beyond it ``C exp(i k x)``;
    matching at ``a_bar`` gives ``k exp(-i k a) + lambda sin(k a) = 0`` with
    ``lambda = 2 mu V0 / hbar^2``. Without ``v0_override`` the strength is
    ``u0_bar^2 G2(E)`` evaluated at the complex pole energy. Newton's method
    starts from the first-order root ``k a = n pi + 1 / (i - g)``.

    :raises ParameterError: without any coupling there is no resonance
    :raises ConsistencyError: if the root search fails
    """
    res = resonance_params(params, n)
    if res.g == 0:
        raise ParameterError("level has no resonance without coupling")

    a = params.a_bar
    mu, hbar = params.mu, params.hbar
    scale = 2.0 * mu / hbar ** 2

    if params.v0_override is not None:
        def strength(k):
            return scale * params.v0_override, 0.0
    else:
        def strength(k):
            kappa = np.sqrt(scale * params.v2_offset - k ** 2 + 0j)
            lam = -scale * mu * params.u0_bar ** 2 / (hbar ** 2 * kappa)
            return lam, lam * k / kappa ** 2

    def matching(k):
        lam, _ = strength(k)
        return k * np.exp(-1j * k * a) + lam * np.sin(k * a)

    def matching_prime(k):
        lam, lam_prime = strength(k)
        return ((1.0 - 1j * a * k) * np.exp(-1j * k * a)
                + lam_prime * np.sin(k * a) + lam * a * np.cos(k * a))

    k0 = (n * math.pi + 1.0 / (1j - res.g)) / a
    try:
        k = complex(newton(matching, k0, fprime=matching_prime, tol=1e-14, maxiter=200))
    except RuntimeError as e:
        raise ConsistencyError(f"resonance pole search for level {n} did not converge") from e
    if not k.imag < 0:
        raise ConsistencyError(f"pole search for level {n} ended on a non-decaying root {k!r}")

    return ResonancePole(n=res.n, k_bar=k, energy_bar=hbar ** 2 * k ** 2 / (2.0 * mu), hbar=hbar)
