import math

import pytest

from deltadrift import (
    NonPositiveParameter,
    NonPositiveScale,
    ParameterError,
    PhysicalParams,
    validate,
)
from deltadrift.core import ConfigError, IntegrityError, OpenChannel, SolverDiverged


def test_constant_scale_is_valid():
    params = PhysicalParams(r0=1.0, v=0.0)
    assert validate(params, 10.0) is params


def test_contracting_scale_hits_zero():
    with pytest.raises(NonPositiveScale) as info:
        validate(PhysicalParams(r0=1.0, v=-0.2), 10.0)
    assert info.value.t == pytest.approx(5.0)
    assert info.value.exit_code == 2


def test_contracting_scale_inside_horizon():
    params = PhysicalParams(r0=1.0, v=-0.05)
    assert validate(params, 10.0) is params


@pytest.mark.parametrize("name", ["mu", "hbar", "a_bar", "r0"])
@pytest.mark.parametrize("value", [0.0, -1.0, math.nan])
def test_non_positive_parameters(name, value):
    with pytest.raises(NonPositiveParameter) as info:
        validate(PhysicalParams(**{name: value}))
    assert info.value.name == name


def test_validate_is_idempotent():
    params = PhysicalParams(u0_bar=0.3, v2_offset=2.0, v=0.5)
    assert validate(validate(params, 100.0), 100.0) == params


@pytest.mark.parametrize("v", [0.0, 0.1, 3.0])
def test_expanding_scale_never_fails(v):
    validate(PhysicalParams(v=v), 1e9)


def test_negative_horizon_rejected():
    with pytest.raises(ParameterError):
        validate(PhysicalParams(), -1.0)


def test_params_are_immutable():
    params = PhysicalParams()
    with pytest.raises(AttributeError):
        params.mu = 2.0
    assert params.replace(mu=2.0).mu == 2.0


def test_exit_codes():
    assert OpenChannel(1.0, 0.5).exit_code == 2
    assert ConfigError("bad").exit_code == 2
    assert SolverDiverged("drift").exit_code == 3
    assert issubclass(SolverDiverged, IntegrityError)


def test_config_error_location():
    error = ConfigError("unknown key", key_path="solver.foo", line=4)
    assert "solver.foo" in str(error)
    assert "line 4" in str(error)
