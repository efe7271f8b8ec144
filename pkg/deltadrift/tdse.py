#
# Numerical two-channel propagator used as an independent check of the
# analytic decay law.
#
# Both channels live on a uniform lab-frame grid with Dirichlet endpoints.
# The delta coupling sits at a(t) = a_bar R(t) with strength u0_bar / R(t)
# and is regularized by a normalized Gaussian. One step is a Crank-Nicolson
# step of the full two-channel Hamiltonian, kinetic terms, channel-2 offset
# and coupling together, taken at the midpoint time. The amplitudes are
# interleaved so the implicit system is pentadiagonal. The Cayley form of a
# Hermitian matrix is unitary, so the discrete norm is conserved to
# round-off however stiff the coupling is.
#
# In scaling form the channel-2 offset is v2_offset / R(t)^2 and the
# Gaussian width grows as R(t) / r0, so the rescaled problem is static and
# its decay in tau is the decay of the resonance pole.
#

import dataclasses
import logging
import math

from dataclasses import dataclass
from functools import cached_property
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from scipy.integrate import trapezoid
from scipy.linalg import solve_banded
from scipy.special import erfcx
from scipy.stats import linregress

from deltadrift.core import (
    BoundaryLeak,
    ConsistencyError,
    DomainExceeded,
    InsufficientSamples,
    IntegrityError,
    OpenChannel,
    ParameterError,
    PhysicalParams,
    SolverDiverged,
    UnderResolved,
    scale_at,
    validate,
)
from deltadrift.resonance import (
    decay_rate,
    greens_second_channel,
    matched_coupling,
    resonance_params,
    resonance_pole,
    survival_probability,
)
from deltadrift.scaling import ScalingFrame, tau_of_t

logger = logging.getLogger(__name__)

POINTS_PER_WAVELENGTH = 16
STEP_DRIFT_LIMIT = 1e-6
RUN_DRIFT_LIMIT = 1e-8
ISOLATION_LIMIT = 1e-14
MIN_FIT_SAMPLES = 10
GAUSSIAN_CUTOFF = 6.0


@dataclass(frozen=True)
class SolverSettings:
    """Numerical knobs of an oracle run.

    The defaults put about a thousand points on the level-1 wavelength of the
    reference box and leave enough room that the fast tail shed by the box
    state does not reach the monitor region within a few level periods.

    :param n_points: grid points, endpoints included
    :param pad: box length in units of the largest delta position
    :param w_over_dx: regularization width in grid spacings
    :param dt_divisor: time step is the level period divided by this
    :param leak_fraction: start of the leak monitor region, in box lengths
    :param leak_limit: largest norm tolerated in the leak monitor region
    :param include_channel2: add channel 2 inside ``[0, a(t)]`` to the
        survival numerator
    :param fit_skip: fraction of the tau range dropped at the start of the fit
    :param fit_floor: the fit stops once the survival falls below this
    :param scaling_form: scale the channel-2 offset and the coupling width
        with ``R(t)``
    :param renormalize: correct the coupling amplitude for the finite width
    """

    n_points: int = 32768
    pad: float = 64.0
    w_over_dx: float = 4.0
    dt_divisor: float = 200.0
    leak_fraction: float = 0.9
    leak_limit: float = 1e-4
    include_channel2: bool = False
    fit_skip: float = 0.1
    fit_floor: float = 0.1
    scaling_form: bool = True
    renormalize: bool = True

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[x_min, x_max]``, both endpoints held at zero."""

    x_max: float
    n_points: int
    x_min: float = 0.0

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


@dataclass(frozen=True, eq=False)
class TwoChannelState:
    """Amplitudes of both channels on ``grid`` at time ``t``.

    ``reference_norm`` is the channel-1 probability inside ``[0, a(0)]`` of
    the state the run started from; it is the survival denominator.
    """

    grid: Grid
    phi1: np.ndarray
    phi2: np.ndarray
    t: float = 0.0
    reference_norm: float = 1.0

    def norm(self) -> float:
        density = np.abs(self.phi1) ** 2 + np.abs(self.phi2) ** 2
        return float(trapezoid(density, dx=self.grid.dx))

    def channel2_norm(self) -> float:
        return float(trapezoid(np.abs(self.phi2) ** 2, dx=self.grid.dx))


class DecaySample(NamedTuple):
    t: float
    tau: float
    p_numeric: float
    p_analytic: float


@dataclass
class DecayCurve:
    """Sampled survival of one oracle run and its fitted rate.

    ``analytic_rate`` is the first-order rate of the parameters as given;
    ``pole_rate`` is the exact resonance rate of the bare coupling that was
    actually propagated, ``u0_bar``.
    """

    samples: List[DecaySample]
    fitted_rate: float
    fit_window: Tuple[float, float]
    r_squared: float = float("nan")
    analytic_rate: float = float("nan")
    pole_rate: float = float("nan")
    u0_bar: float = 0.0
    max_norm_drift: float = 0.0
    max_leak: float = 0.0
    width: float = 0.0
    dt: float = 0.0

    @property
    def rel_err(self) -> float:
        return abs(self.fitted_rate - self.analytic_rate) / abs(self.analytic_rate)

    @property
    def pole_rel_err(self) -> float:
        return abs(self.fitted_rate - self.pole_rate) / abs(self.pole_rate)


class FitLine(NamedTuple):
    slope: float
    intercept: float
    r_squared: float
    count: int


def _integrate_to(grid: Grid, density: np.ndarray, upper: float) -> float:
    # Trapezoid over the nodes below `upper` plus the partial cell up to it.
    j = int(math.floor((upper - grid.x_min) / grid.dx))
    j = min(max(j, 0), grid.n_points - 1)
    total = trapezoid(density[:j + 1], dx=grid.dx) if j > 0 else 0.0
    if j < grid.n_points - 1:
        frac = upper - grid.x[j]
        d_upper = density[j] + (density[j + 1] - density[j]) * frac / grid.dx
        total += 0.5 * (density[j] + d_upper) * frac
    return float(total)


def _level_energy(params: PhysicalParams, n: int) -> float:
    k_bar_n = n * math.pi / params.a_bar
    return params.hbar ** 2 * k_bar_n ** 2 / (2.0 * params.mu)


def _level_period(params: PhysicalParams, n: int) -> float:
    return 2.0 * math.pi * params.hbar / _level_energy(params, n)


def build_grid(params: PhysicalParams, n: int, t_final: float, n_points: int, pad: float) -> Grid:
    """Grid long enough to hold the delta for the whole run.

    The box length is ``pad`` times the largest delta position, which is
    ``a_bar R(t_final)`` for a non-contracting scale.

    :raises UnderResolved: if the level-``n`` wavelength inside ``[0, a(0)]``
        gets fewer than 16 grid points
    """
    if not pad > 1:
        raise ParameterError(f"pad must exceed 1, got {pad!r}")
    if n_points < 3:
        raise UnderResolved(f"need at least 3 grid points, got {n_points}")
    validate(params, t_final)

    reach = params.a_bar * max(params.r0, scale_at(params, t_final))
    grid = Grid(x_max=pad * reach, n_points=int(n_points))

    wavelength = 2.0 * params.a_bar * params.r0 / n
    per_wavelength = wavelength / grid.dx
    if per_wavelength < POINTS_PER_WAVELENGTH:
        raise UnderResolved(
            f"{per_wavelength:.1f} grid points per wavelength, need {POINTS_PER_WAVELENGTH}; "
            f"raise n_points above {n_points}")
    return grid


def initial_state(grid: Grid, params: PhysicalParams, n: int) -> TwoChannelState:
    """Box state of level ``n`` in channel 1 inside ``[0, a(0)]``, channel 2
    empty, normalized on the grid."""
    a0 = params.a_bar * params.r0
    if a0 >= grid.x_max:
        raise DomainExceeded(f"delta position {a0!r} is outside the grid (x_max = {grid.x_max!r})")

    x = grid.x
    phi1 = np.where(x <= a0, math.sqrt(2.0 / a0) * np.sin(n * math.pi * x / a0), 0.0).astype(complex)
    phi1[0] = 0.0
    phi1 /= math.sqrt(trapezoid(np.abs(phi1) ** 2, dx=grid.dx))
    phi2 = np.zeros_like(phi1)

    reference = _integrate_to(grid, np.abs(phi1) ** 2, a0)
    return TwoChannelState(grid=grid, phi1=phi1, phi2=phi2, t=0.0, reference_norm=reference)


def coupling_profile(grid: Grid, params: PhysicalParams, t: float, w: float) -> np.ndarray:
    """Regularized coupling ``(u0_bar / R(t)) N_w(x - a(t))``.

    ``N_w`` is a Gaussian of width ``w`` cut at six widths and normalized on
    the grid, so the profile integrates to ``u0_bar / R(t)``.
    """
    if w < 2.0 * grid.dx * (1.0 - 1e-12):
        raise UnderResolved(f"regularization width {w!r} is below two grid spacings ({2.0 * grid.dx!r})")
    if params.u0_bar == 0:
        return np.zeros(grid.n_points)

    scale = scale_at(params, t)
    centre = params.a_bar * scale
    offset = grid.x - centre
    kernel = np.where(np.abs(offset) <= GAUSSIAN_CUTOFF * w, np.exp(-0.5 * (offset / w) ** 2), 0.0)
    weight = trapezoid(kernel, dx=grid.dx)
    if weight <= 0:
        raise DomainExceeded(f"delta position {centre!r} is outside the grid")
    return (params.u0_bar / scale) * kernel / weight


def regularization_factor(params: PhysicalParams, n: int, width: float) -> float:
    """Strength of a Gaussian coupling relative to a point delta at level ``n``.

    Eliminating the closed channel folds its kernel ``exp(-kappa |x - x'|)``
    with the Gaussian on both sides, which scales the effective strength by
    ``erfcx(kappa w)`` in the rescaled frame, ``w = width / r0``.

    :raises OpenChannel: if the second channel is open at ``E_n``
    """
    if not width >= 0:
        raise ParameterError(f"width must be non-negative, got {width!r}")
    green = greens_second_channel(params, _level_energy(params, n))
    kappa = -params.mu / (params.hbar ** 2 * green)
    return float(erfcx(kappa * width / params.r0))


class Propagator:
    """Owns the step operators for one grid, time step and coupling width.

    With ``scaling_form`` the channel-2 offset and the coupling width follow
    the scale; otherwise both stay at their ``t = 0`` values. Given a level
    ``n`` and ``renormalize``, the coupling amplitude is divided by the
    square root of :func:`regularization_factor`.
    """

    def __init__(self, grid: Grid, params: PhysicalParams, dt: float, width: float,
                 n: Optional[int] = None, scaling_form: bool = True, renormalize: bool = True):
        if not dt > 0:
            raise ParameterError(f"time step must be positive, got {dt!r}")
        if n is not None and dt > _level_period(params, n) / 50.0:
            raise ParameterError(
                f"time step {dt!r} exceeds a fiftieth of the level-{n} period")
        if width < 2.0 * grid.dx * (1.0 - 1e-12):
            raise UnderResolved(f"regularization width {width!r} is below two grid spacings")

        self.__grid = grid
        self.__params = params
        self.__dt = dt
        self.__width = width
        self.__scaling_form = scaling_form

        self.__r = 1j * dt / (2.0 * params.hbar)
        self.__beta = params.hbar ** 2 / (2.0 * params.mu * grid.dx ** 2)
        self.__amplitude = 1.0
        if renormalize and n is not None and params.u0_bar != 0:
            self.__amplitude = 1.0 / math.sqrt(regularization_factor(params, n, width))

    @property
    def dt(self) -> float:
        return self.__dt

    @property
    def width(self) -> float:
        return self.__width

    @property
    def amplitude(self) -> float:
        return self.__amplitude

    def offset_at(self, t: float) -> float:
        """Channel-2 offset at lab time ``t``."""
        if not self.__scaling_form:
            return self.__params.v2_offset
        return self.__params.v2_offset / scale_at(self.__params, t) ** 2

    def width_at(self, t: float) -> float:
        """Coupling width at lab time ``t``."""
        if not self.__scaling_form:
            return self.__width
        return self.__width * scale_at(self.__params, t) / self.__params.r0

    def __hamiltonian(self, phi1, phi2, offset, coupling):
        # H on interior nodes; the Dirichlet endpoints contribute nothing.
        beta = self.__beta
        h1 = 2.0 * beta * phi1 + coupling * phi2
        h2 = (2.0 * beta + offset) * phi2 + coupling * phi1
        for h, phi in ((h1, phi1), (h2, phi2)):
            h[1:] -= beta * phi[:-1]
            h[:-1] -= beta * phi[1:]
        return h1, h2

    def __tridiagonal(self, size, offset):
        r_beta = self.__r * self.__beta
        banded = np.zeros((3, size), dtype=complex)
        banded[0, 1:] = -r_beta
        banded[1, :] = 1.0 + self.__r * (2.0 * self.__beta + offset)
        banded[2, :-1] = -r_beta
        return banded

    def __pentadiagonal(self, size, offset, coupling):
        # Unknown 2m is channel 1 at node m, 2m + 1 is channel 2.
        r, r_beta = self.__r, self.__r * self.__beta
        banded = np.zeros((5, 2 * size), dtype=complex)
        banded[0, 2:] = -r_beta
        banded[4, :-2] = -r_beta
        banded[2, 0::2] = 1.0 + 2.0 * r_beta
        banded[2, 1::2] = 1.0 + r * (2.0 * self.__beta + offset)
        banded[1, 1::2] = r * coupling
        banded[3, 0::2] = r * coupling
        return banded

    def step(self, state: TwoChannelState) -> TwoChannelState:
        """Advance ``state`` by one time step.

        :raises SolverDiverged: if the norm moves by more than 1e-6
        """
        before = state.norm()
        t_mid = state.t + 0.5 * self.__dt
        offset = self.offset_at(t_mid)
        if self.__params.u0_bar == 0:
            coupling = np.zeros(self.__grid.n_points - 2)
        else:
            profile = coupling_profile(self.__grid, self.__params, t_mid, self.width_at(t_mid))
            coupling = self.__amplitude * profile[1:-1]

        inner1, inner2 = state.phi1[1:-1], state.phi2[1:-1]
        h1, h2 = self.__hamiltonian(inner1, inner2, offset, coupling)
        rhs1 = inner1 - self.__r * h1
        rhs2 = inner2 - self.__r * h2
        size = inner1.size

        if np.any(coupling):
            rhs = np.empty(2 * size, dtype=complex)
            rhs[0::2], rhs[1::2] = rhs1, rhs2
            solved = solve_banded((2, 2), self.__pentadiagonal(size, offset, coupling), rhs,
                                  check_finite=False)
            new1, new2 = solved[0::2], solved[1::2]
        else:
            # Uncoupled channels never mix.
            new1 = solve_banded((1, 1), self.__tridiagonal(size, 0.0), rhs1, check_finite=False)
            new2 = solve_banded((1, 1), self.__tridiagonal(size, offset), rhs2, check_finite=False)

        phi1 = np.zeros_like(state.phi1)
        phi2 = np.zeros_like(state.phi2)
        phi1[1:-1], phi2[1:-1] = new1, new2
        advanced = dataclasses.replace(state, phi1=phi1, phi2=phi2, t=state.t + self.__dt)
        drift = abs(advanced.norm() - before)
        if not drift <= STEP_DRIFT_LIMIT:
            raise SolverDiverged(f"norm drifted by {drift!r} in one step at t = {state.t!r}")
        return advanced


def step(state: TwoChannelState, params: PhysicalParams, dt: float, w: float,
         n: Optional[int] = None) -> TwoChannelState:
    """Advance ``state`` by ``dt`` with coupling width ``w``."""
    return Propagator(state.grid, params, dt, w, n=n).step(state)


def survival_numeric(state: TwoChannelState, params: PhysicalParams, t: Optional[float] = None,
                     include_channel2: bool = False) -> float:
    """Channel-1 probability inside ``[0, a(t)]`` relative to the initial one.

    ``t`` defaults to the state's own time.

    :raises DomainExceeded: if ``a(t)`` is not inside the grid
    """
    t = state.t if t is None else t
    upper = params.a_bar * scale_at(params, t)
    if upper >= state.grid.x_max:
        raise DomainExceeded(f"delta position {upper!r} reached the grid end {state.grid.x_max!r}")

    density = np.abs(state.phi1) ** 2
    if include_channel2:
        density = density + np.abs(state.phi2) ** 2
    return _integrate_to(state.grid, density, upper) / state.reference_norm


def boundary_leak(state: TwoChannelState, fraction: float = 0.9) -> float:
    """Total norm beyond ``fraction`` of the box length."""
    grid = state.grid
    mask = grid.x >= grid.x_min + fraction * grid.length
    density = np.abs(state.phi1[mask]) ** 2 + np.abs(state.phi2[mask]) ** 2
    return float(np.sum(density) * grid.dx)


def _in_window(samples: Sequence[DecaySample], window):
    lo, hi = window
    return [s for s in samples if lo <= s.tau <= hi]


def default_fit_window(samples: Sequence[DecaySample], skip: float = 0.1,
                       floor: float = 0.1) -> Tuple[float, float]:
    """Drop the first ``skip`` of the tau range, stop before ``P < floor``."""
    if not samples:
        raise InsufficientSamples("no samples to fit")
    tau0, tau_end = samples[0].tau, samples[-1].tau
    lo = tau0 + skip * (tau_end - tau0)
    hi = lo
    for sample in samples:
        if sample.p_numeric < floor:
            break
        hi = sample.tau
    return lo, hi


def fit_decay_line(samples: Sequence[DecaySample], window: Tuple[float, float]) -> FitLine:
    """Least-squares line of ``-ln P_numeric`` against tau over ``window``.

    :raises InsufficientSamples: with fewer than ten samples in the window
        or a non-positive probability among them
    """
    chosen = _in_window(samples, window)
    if len(chosen) < MIN_FIT_SAMPLES:
        raise InsufficientSamples(
            f"{len(chosen)} samples inside tau window {window}, need {MIN_FIT_SAMPLES}")
    p = np.array([s.p_numeric for s in chosen])
    if np.any(p <= 0):
        raise InsufficientSamples("survival probability reached zero inside the fit window")

    tau = np.array([s.tau for s in chosen])
    y = -np.log(p)
    if np.ptp(y) == 0:
        return FitLine(slope=0.0, intercept=float(y[0]), r_squared=1.0, count=len(chosen))
    line = linregress(tau, y)
    return FitLine(slope=float(line.slope), intercept=float(line.intercept),
                   r_squared=float(line.rvalue ** 2), count=len(chosen))


def fit_decay_rate(samples: Sequence[DecaySample], window: Tuple[float, float]) -> float:
    """Slope of ``-ln P_numeric`` against tau; estimates ``2 |H/D| / hbar``."""
    return fit_decay_line(samples, window).slope


def _propagated(params: PhysicalParams, n: int) -> PhysicalParams:
    # The propagator needs a bare coupling; an override alone is matched to one.
    if not params.v0_override or params.u0_bar != 0:
        return params
    driven = params.replace(u0_bar=matched_coupling(params, n, params.v0_override))
    logger.info(f"matched u0_bar={driven.u0_bar:.6g} to |v0_override|={abs(params.v0_override):.6g}")
    return driven


def _pole_rate(driven: PhysicalParams, n: int) -> float:
    if driven.u0_bar == 0:
        return float("nan")
    try:
        return resonance_pole(driven.replace(v0_override=None), n).rate
    except ConsistencyError as e:
        logger.warning(f"no resonance pole for the oracle fit: {e}")
        return float("nan")


def run_oracle(params: PhysicalParams, n: int, t_final: float, sample_count: int = 101,
               settings: SolverSettings = SolverSettings()) -> DecayCurve:
    """Propagate the level-``n`` box state to ``t_final`` and fit its decay.

    Samples are taken at ``sample_count`` equally spaced times. The step is
    shrunk so that samples fall on step boundaries. With ``v0_override`` set
    and no bare coupling, the propagated ``u0_bar`` is the
    :func:`~deltadrift.resonance.matched_coupling` of the override.

    :raises OpenChannel: for an open second channel, not covered by the oracle
    :raises SolverDiverged: if the norm drifts beyond 1e-8 over the run
    :raises BoundaryLeak: if more than ``leak_limit`` of the norm reaches the
        monitor region while the fit window is open
    """
    if sample_count < 2:
        raise InsufficientSamples(f"need at least two samples, got {sample_count}")
    if not t_final > 0:
        raise ParameterError(f"t_final must be positive, got {t_final!r}")
    validate(params, t_final)

    res = resonance_params(params, n)
    driven = _propagated(params, n)
    if driven.u0_bar != 0 and driven.v2_offset <= res.e_bar_n:
        raise OpenChannel(res.e_bar_n, driven.v2_offset)

    grid = build_grid(driven, n, t_final, settings.n_points, settings.pad)
    width = settings.w_over_dx * grid.dx

    interval = t_final / (sample_count - 1)
    dt_max = _level_period(driven, n) / settings.dt_divisor
    per_sample = max(1, math.ceil(interval / dt_max))
    dt = interval / per_sample

    propagator = Propagator(grid, driven, dt, width, n=n, scaling_form=settings.scaling_form,
                            renormalize=settings.renormalize)
    frame = ScalingFrame.from_params(driven)
    state = initial_state(grid, driven, n)
    norm0 = state.norm()

    logger.info(f"oracle run: n={n} u0_bar={driven.u0_bar:.6g} v2_offset={driven.v2_offset} "
                f"v={driven.v} points={grid.n_points} w={width:.4g} "
                f"amplitude={propagator.amplitude:.4g} dt={dt:.4g} "
                f"steps={per_sample * (sample_count - 1)}")

    times = np.linspace(0.0, t_final, sample_count)
    analytic = survival_probability(params, n, times)
    samples = []
    leaks = []
    max_drift = 0.0

    for i, t in enumerate(times):
        if i > 0:
            for _ in range(per_sample):
                state = propagator.step(state)
            # Pin the clock to the sample time against accumulated round-off.
            state = dataclasses.replace(state, t=float(t))

        drift = abs(state.norm() - norm0)
        max_drift = max(max_drift, drift)
        if drift > RUN_DRIFT_LIMIT:
            raise SolverDiverged(f"norm drifted by {drift!r} by t = {t!r}")
        if driven.u0_bar == 0 and state.channel2_norm() > ISOLATION_LIMIT:
            raise IntegrityError(f"uncoupled channel 2 picked up norm {state.channel2_norm()!r}")

        leaks.append(boundary_leak(state, settings.leak_fraction))
        p = survival_numeric(state, driven, include_channel2=settings.include_channel2)
        samples.append(DecaySample(t=float(t), tau=float(tau_of_t(frame, t)),
                                   p_numeric=p, p_analytic=float(analytic[i])))
        logger.debug(f"t={t:.6g} P={p:.6g} leak={leaks[-1]:.3g}")

    window = default_fit_window(samples, settings.fit_skip, settings.fit_floor)
    window_leak = max((leak for leak, s in zip(leaks, samples) if s.tau <= window[1]), default=0.0)
    if window_leak > settings.leak_limit:
        raise BoundaryLeak(
            f"{window_leak:.3g} of the norm reached the last {1 - settings.leak_fraction:.0%} "
            "of the box inside the fit window; increase pad")

    line = fit_decay_line(samples, window)
    curve = DecayCurve(samples=samples, fitted_rate=line.slope, fit_window=window,
                       r_squared=line.r_squared, analytic_rate=decay_rate(params, n),
                       pole_rate=_pole_rate(driven, n), u0_bar=driven.u0_bar,
                       max_norm_drift=max_drift, max_leak=max(leaks), width=width, dt=dt)

    logger.info(f"oracle fit: rate={curve.fitted_rate:.6g} analytic={curve.analytic_rate:.6g} "
                f"pole={curve.pole_rate:.6g} R^2={curve.r_squared:.4f} "
                f"window=({window[0]:.4g}, {window[1]:.4g})")
    return curve


def width_convergence(params: PhysicalParams, n: int, t_final: float, sample_count: int = 101,
                      settings: SolverSettings = SolverSettings(),
                      factors: Sequence[float] = (8.0, 4.0, 2.0)):
    """Refit the decay rate while halving the regularization width.

    Returns the ``(w_over_dx, rate)`` pairs and the relative change of the
    rate between consecutive widths.
    """
    rates = []
    for factor in factors:
        curve = run_oracle(params, n, t_final, sample_count, settings.replace(w_over_dx=factor))
        rates.append((factor, curve.fitted_rate))
    changes = [abs(b[1] - a[1]) / abs(a[1]) for a, b in zip(rates, rates[1:])]
    return rates, changes
