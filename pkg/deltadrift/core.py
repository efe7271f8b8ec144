#
# Physical parameters, units and the error hierarchy shared by every other
# module of the package.
#
# All quantities default to natural units (hbar = mu = 1). Every field stays
# explicit, so SI-like values flow through the same formulas unchanged.
#

import dataclasses
import logging
import math

from dataclasses import dataclass
from typing import Optional

logger = logging.getLogger(__name__)


class DeltaDriftError(Exception):
    """Base class of every error raised by ``deltadrift``.

    :attr:`exit_code` is the process exit code the command line front end
    reports when the error escapes a run.
    """

    exit_code = 1


class ParameterError(DeltaDriftError):
    """Invalid input: a parameter, a grid or a configuration was rejected."""

    exit_code = 2


class IntegrityError(DeltaDriftError):
    """A numerical run violated one of its integrity checks."""

    exit_code = 3


class NonPositiveParameter(ParameterError):
    def __init__(self, name, value):
        super().__init__(f"{name} must be positive and finite, got {value!r}")
        self.name = name
        self.value = value


class NonPositiveScale(ParameterError):
    def __init__(self, t, scale):
        super().__init__(f"scale factor R(t) = {scale!r} is not positive at t = {t!r}")
        self.t = t
        self.scale = scale


class OpenChannel(ParameterError):
    def __init__(self, energy, v2_offset):
        super().__init__(
            f"second channel is open at energy {energy!r} (v2_offset = {v2_offset!r}); "
            "the Green's function is complex there, set v0_override instead")
        self.energy = energy
        self.v2_offset = v2_offset


class UnderResolved(ParameterError):
    pass


class DomainExceeded(ParameterError):
    pass


class InsufficientSamples(ParameterError):
    pass


class ConfigError(ParameterError):
    """Configuration problem, located by key path and source line."""

    def __init__(self, message, key_path=None, line=None):
        where = []
        if key_path:
            where.append(f"key '{key_path}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.key_path = key_path
        self.line = line


class ParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    pass


class SolverDiverged(IntegrityError):
    pass


class BoundaryLeak(IntegrityError):
    pass


class ConsistencyError(IntegrityError):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    """Parameters of the two-channel model with a moving delta coupling.

    :param mu: particle mass
    :param hbar: reduced Planck constant
    :param u0_bar: bare coupling strength of the delta in the rescaled frame
    :param v2_offset: constant energy offset of the second diabatic surface
    :param a_bar: rescaled position of the delta, the lab position is
        ``a_bar * R(t)``
    :param r0: scale factor at ``t = 0``
    :param v: scaling velocity in ``R(t) = r0 + v * t``
    :param v0_override: effective single-channel strength; when set it
        replaces the Green's function reduction of the second channel
    """

    mu: float = 1.0
    hbar: float = 1.0
    u0_bar: float = 0.0
    v2_offset: float = 0.0
    a_bar: float = math.pi
    r0: float = 1.0
    v: float = 0.0
    v0_override: Optional[float] = None

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def scale_at(params: PhysicalParams, t: float) -> float:
    return params.r0 + params.v * t


def validate(params: PhysicalParams, horizon: float = 0.0) -> PhysicalParams:
    """Check ``params`` and return them unchanged.

    ``R(t)`` is linear, so checking both ends of ``[0, horizon]`` covers the
    whole interval.

    :raises NonPositiveParameter: if ``mu``, ``hbar``, ``a_bar`` or ``r0``
        is not a positive finite number
    :raises NonPositiveScale: if ``R(t) <= 0`` somewhere in ``[0, horizon]``
    """
    for name in ("mu", "hbar", "a_bar", "r0"):
        value = getattr(params, name)
        if not (math.isfinite(value) and value > 0):
            raise NonPositiveParameter(name, value)

    for name in ("u0_bar", "v2_offset", "v"):
        value = getattr(params, name)
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")

    if params.v0_override is not None and not math.isfinite(params.v0_override):
        raise ParameterError(f"v0_override must be finite, got {params.v0_override!r}")

    if horizon < 0:
        raise ParameterError(f"horizon must not be negative, got {horizon!r}")

    if params.v < 0:
        if scale_at(params, horizon) <= 0:
            # Report the first time the scale reaches zero.
            raise NonPositiveScale(-params.r0 / params.v, 0.0)

    return params
