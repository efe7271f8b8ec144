import math

import numpy as np
import pytest

from scipy.integrate import trapezoid

from deltadrift import (
    NonPositiveScale,
    OpenChannel,
    ParameterError,
    PhysicalParams,
    amplitude_sq,
    decay_exponent,
    decay_rate,
    effective_strength,
    greens_second_channel,
    lorentzian_approx,
    matched_coupling,
    nonadiabatic_probability,
    resonance_params,
    resonance_pole,
    resonance_wavefunction,
    saturation_probability,
    scattering_state,
    survival_probability,
)


def test_greens_function_closed_channel():
    params = PhysicalParams(v2_offset=1.0)
    assert greens_second_channel(params, 0.5) == pytest.approx(-1.0)


def test_greens_function_scaling_with_gap():
    params = PhysicalParams(v2_offset=0.5)
    near = greens_second_channel(params, 0.0)
    far = greens_second_channel(params.replace(v2_offset=2.0), 0.0)
    assert far == pytest.approx(near / 2.0)
    assert abs(greens_second_channel(params.replace(v2_offset=1e12), 0.0)) < 1e-5


@pytest.mark.parametrize("energy", [1.0, 1.5])
def test_greens_function_open_channel(energy):
    with pytest.raises(OpenChannel):
        greens_second_channel(PhysicalParams(v2_offset=1.0), energy)


def test_effective_strength():
    assert effective_strength(PhysicalParams(u0_bar=0.0), 0.5) == 0.0
    assert effective_strength(PhysicalParams(u0_bar=1.0, v2_offset=1.0), 0.5) == pytest.approx(-1.0)
    assert effective_strength(PhysicalParams(u0_bar=3.0, v0_override=0.5), 0.5) == 0.5


def test_effective_strength_propagates_open_channel():
    with pytest.raises(OpenChannel):
        effective_strength(PhysicalParams(u0_bar=1.0, v2_offset=0.1), 0.5)


def test_amplitude_sq_examples():
    params = PhysicalParams(a_bar=math.pi)
    assert amplitude_sq(params, 0.0, 0.77) == pytest.approx(1.0)
    assert amplitude_sq(params, 3.0, 2.0) == pytest.approx(1.0, abs=1e-12)
    assert amplitude_sq(params, 1.0, 0.5) == pytest.approx(17.0, rel=1e-12)


def test_amplitude_sq_rejects_non_positive_wavenumber():
    with pytest.raises(ParameterError):
        amplitude_sq(PhysicalParams(), 1.0, 0.0)


def test_resonance_params_reference(reference_params):
    res = resonance_params(reference_params, 1)
    assert res.k_bar_n == pytest.approx(1.0)
    assert res.e_bar_n == pytest.approx(0.5)
    assert res.g == pytest.approx(1.0)
    assert res.d_sq == pytest.approx(2.0 * math.pi ** 2)
    assert res.h_sq == pytest.approx(0.5)
    assert res.delta_shift == pytest.approx(1.0 / (2.0 * math.pi))
    assert res.h_over_d == pytest.approx(1.0 / (2.0 * math.pi))


def test_resonance_params_without_coupling():
    params = PhysicalParams(a_bar=2.0, v0_override=0.0)
    res = resonance_params(params, 3)
    assert res.h_sq == 1.0
    assert res.delta_shift == 0.0
    assert res.d_sq == pytest.approx((2.0 / res.k_bar_n) ** 2)


def test_resonance_params_rejects_bad_index(reference_params):
    for n in (0, -1, 1.5):
        with pytest.raises(ParameterError):
            resonance_params(reference_params, n)


def test_resonance_identities(random_sets):
    for params, n in random_sets:
        res = resonance_params(params, n)
        assert res.d_sq * res.delta_shift ** 2 + res.h_sq == pytest.approx(1.0, rel=1e-12)
        assert res.h_sq * (1.0 + res.g ** 2) == pytest.approx(1.0, rel=1e-12)
        assert math.copysign(1.0, res.delta_shift) == math.copysign(1.0, res.v0_bar)


def test_lorentzian_matches_amplitude_at_resonance(random_sets):
    for params, n in random_sets:
        res = resonance_params(params, n)
        assert lorentzian_approx(res, 0.0) == pytest.approx(1.0, abs=1e-12)
        # sin(k_n a) carries the rounding of k_n a, amplified by g.
        tolerance = 1e-12 * max(1.0, abs(res.g))
        assert amplitude_sq(params, res.v0_bar, res.k_bar_n) == pytest.approx(1.0, abs=tolerance)


def test_lorentzian_examples(reference_params):
    res = resonance_params(reference_params, 1)
    assert lorentzian_approx(res, -res.delta_shift) == pytest.approx(res.h_sq)
    assert lorentzian_approx(res, res.delta_shift) == pytest.approx(2.5)


def test_lorentzian_is_a_local_approximation(reference_params):
    res = resonance_params(reference_params, 1)
    errors = []
    for fraction in (1e-1, 1e-2, 1e-3):
        detuning = fraction * res.e_bar_n
        k_bar = math.sqrt(2.0 * (res.e_bar_n + detuning))
        exact = amplitude_sq(reference_params, res.v0_bar, k_bar)
        errors.append(abs(exact - lorentzian_approx(res, detuning)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-4


def test_stronger_coupling_slows_escape(reference_params):
    widths = [resonance_params(reference_params.replace(v0_override=v0), 1).h_over_d
              for v0 in np.linspace(0.0, 5.0, 26)]
    assert np.all(np.diff(widths) < 0)
    negative = [resonance_params(reference_params.replace(v0_override=-v0), 1).h_over_d
                for v0 in np.linspace(0.0, 5.0, 26)]
    np.testing.assert_allclose(negative, widths)


def test_scattering_state_matching(reference_params):
    for v0_bar, k_bar in [(0.5, 0.8), (-1.2, 1.7), (3.0, 0.3)]:
        state = scattering_state(reference_params, v0_bar, k_bar)
        phase = k_bar * reference_params.a_bar
        assert math.sin(phase) == pytest.approx(state.amplitude_A * math.cos(phase + state.theta), abs=1e-12)

        jump = -k_bar * state.amplitude_A * math.sin(phase + state.theta) - k_bar * math.cos(phase)
        assert jump == pytest.approx(2.0 * v0_bar * math.sin(phase), abs=1e-12)
        assert state.amplitude_A ** 2 == pytest.approx(amplitude_sq(reference_params, v0_bar, k_bar))


def test_scattering_state_is_continuous(reference_params):
    state = scattering_state(reference_params, 0.7, 1.1)
    a_bar = reference_params.a_bar
    left, right = state.evaluate([a_bar - 1e-9, a_bar + 1e-9])
    assert left == pytest.approx(right, abs=1e-8)


def test_decay_exponent_reference(reference_params):
    assert decay_exponent(reference_params, 1, 0.0) == 0.0
    assert decay_exponent(reference_params, 1, math.pi) == pytest.approx(1.0)
    assert decay_rate(reference_params, 1) == pytest.approx(1.0 / math.pi)


def test_decay_rate_carries_one_over_hbar(reference_params):
    # hbar = 2 gives g = 1/4 and |H/D| = 4 / (pi (1 + 1/16)); alpha = 2 |H/D| tau / hbar.
    params = reference_params.replace(hbar=2.0)
    res = resonance_params(params, 1)
    assert res.g == pytest.approx(0.25)
    assert res.h_over_d == pytest.approx(4.0 / (math.pi * 1.0625))

    expected = 4.0 / (math.pi * 1.0625)
    assert decay_rate(params, 1) == pytest.approx(expected)
    assert decay_rate(params, 1) == pytest.approx(2.0 * res.h_over_d / params.hbar)
    assert decay_exponent(params, 1, 1.0) == pytest.approx(expected)
    assert survival_probability(params, 1, 1.0) == pytest.approx(math.exp(-expected))


def test_decay_exponent_saturates(reference_params):
    params = reference_params.replace(v=0.5)
    limit = 2.0 * resonance_params(params, 1).h_over_d / (params.r0 * params.v)
    assert decay_exponent(params, 1, 1e7) == pytest.approx(limit, rel=1e-6)


def test_decay_exponent_rejects_collapsing_scale(reference_params):
    with pytest.raises(NonPositiveScale):
        decay_exponent(reference_params.replace(v=-0.5), 1, 3.0)


def test_survival_probability(reference_params):
    assert survival_probability(reference_params, 1, 0.0) == 1.0
    assert survival_probability(reference_params, 1, math.pi) == pytest.approx(math.exp(-1.0))

    times = np.linspace(0.0, 50.0, 201)
    for v in (0.0, 0.3):
        p = survival_probability(reference_params.replace(v=v), 1, times)
        assert np.all(np.diff(p) <= 0)


def test_nonadiabatic_probability(reference_params):
    assert nonadiabatic_probability(reference_params, 1, 0.0) == 0.0
    assert nonadiabatic_probability(reference_params, 1, 1e3) == pytest.approx(1.0)

    params = reference_params.replace(v=0.5)
    asymptote = 1.0 - math.exp(-2.0 * resonance_params(params, 1).h_over_d / (params.r0 * params.v))
    assert nonadiabatic_probability(params, 1, 1e6) == pytest.approx(asymptote, abs=1e-3)
    assert saturation_probability(params, 1) == pytest.approx(asymptote, rel=1e-12)
    assert saturation_probability(reference_params, 1) == 1.0


def test_probabilities_are_complementary(random_sets):
    for params, n in random_sets[:20]:
        for t in (0.0, 0.01, 0.1, 1.0):
            p = survival_probability(params, n, t)
            q = nonadiabatic_probability(params, n, t)
            assert 0.0 < p <= 1.0
            assert 0.0 <= q <= 1.0
            assert p + q == pytest.approx(1.0, abs=1e-15)


def test_resonance_wavefunction_norm_follows_survival(reference_params):
    x_bar = np.linspace(0.0, reference_params.a_bar, 20001)
    for tau in (0.0, 1.0, 4.0):
        psi = resonance_wavefunction(reference_params, 1, x_bar, tau)
        norm = trapezoid(np.abs(psi) ** 2, x_bar)
        assert norm == pytest.approx(survival_probability(reference_params, 1, tau), rel=1e-6)


def test_matched_coupling_reproduces_strength(reference_params):
    params = reference_params.replace(v2_offset=2.0, v0_override=None)
    u0_bar = matched_coupling(params, 1, 0.5)
    res = resonance_params(params.replace(u0_bar=u0_bar), 1)
    assert res.v0_bar == pytest.approx(-0.5)
    assert res.g ** 2 == pytest.approx(1.0)


def test_matched_coupling_needs_closed_channel(reference_params):
    with pytest.raises(OpenChannel):
        matched_coupling(reference_params.replace(v2_offset=0.2), 1, 0.5)


def _matching_residual(params, k):
    a_bar = params.a_bar
    scale = 2.0 * params.mu / params.hbar ** 2
    if params.v0_override is not None:
        lam = scale * params.v0_override
    else:
        kappa = np.sqrt(scale * params.v2_offset - k ** 2 + 0j)
        lam = -scale * params.mu * params.u0_bar ** 2 / (params.hbar ** 2 * kappa)
    return k * np.exp(-1j * k * a_bar) + lam * np.sin(k * a_bar)


@pytest.mark.parametrize("params", [
    PhysicalParams(v0_override=1.0),
    PhysicalParams(v0_override=-0.5),
    PhysicalParams(u0_bar=1.6, v2_offset=4.0),
    PhysicalParams(a_bar=2.0, u0_bar=3.0, v2_offset=5.0, mu=0.5),
])
def test_resonance_pole_solves_matching(params):
    pole = resonance_pole(params, 1)
    assert abs(_matching_residual(params, pole.k_bar)) < 1e-10
    assert pole.k_bar.imag < 0
    assert pole.energy_bar == pytest.approx(params.hbar ** 2 * pole.k_bar ** 2 / (2.0 * params.mu))
    assert pole.rate == pytest.approx(-2.0 * pole.energy_bar.imag / params.hbar)
    assert pole.rate > 0


def test_resonance_pole_approaches_first_order_for_strong_coupling(reference_params):
    params = reference_params.replace(v0_override=50.0)
    res = resonance_params(params, 1)
    pole = resonance_pole(params, 1)

    assert res.g == pytest.approx(100.0)
    assert pole.rate == pytest.approx(decay_rate(params, 1), rel=0.03)
    assert res.e_bar_n - pole.energy_bar.real == pytest.approx(res.delta_shift, rel=0.02)


@pytest.mark.parametrize("v0_bar", [0.5, 1.0])
def test_resonance_pole_departs_from_first_order_for_weak_coupling(reference_params, v0_bar):
    params = reference_params.replace(v0_override=v0_bar)
    first_order = decay_rate(params, 1)
    assert abs(resonance_pole(params, 1).rate - first_order) / first_order > 0.1


def test_attractive_pole_decays_faster_than_first_order(reference_params):
    # The closed channel makes V0 negative and lifts the level.
    params = reference_params.replace(v2_offset=4.0, v0_override=None)
    params = params.replace(u0_bar=matched_coupling(params, 1, 1.0))
    pole = resonance_pole(params, 1)
    assert pole.energy_bar.real > resonance_params(params, 1).e_bar_n
    assert pole.rate > 1.1 * decay_rate(params, 1)


def test_resonance_pole_needs_coupling(reference_params):
    with pytest.raises(ParameterError):
        resonance_pole(reference_params.replace(v0_override=0.0), 1)
    with pytest.raises(OpenChannel):
        resonance_pole(PhysicalParams(u0_bar=1.0, v2_offset=0.1), 1)
