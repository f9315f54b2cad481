import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from salpeter.core import Event, PlaneWaveMode, SuperpositionState, UnitSystem, dispersion_energy
from salpeter.lorentz import (DEGENERACY_GAP, Boost, DegenerateBoostError, alpha_coefficient,
                              beta_coefficient, boost_event, boost_momentum, born_transform_residual,
                              consistency_ratio, dirac_fourvector_residual, identity_sweep,
                              momentum_from_velocity, random_events, random_two_mode_state,
                              ratio_surface, spinor, spinor_boost_matrix)
from salpeter.rng import SplitMix64

HALF = Boost(0.5)
GAMMA_HALF = 2 / math.sqrt(3)


class TestBoost:
    def test_gamma_and_rapidity(self):
        assert HALF.gamma == pytest.approx(GAMMA_HALF, rel=1e-15)
        assert Boost.from_rapidity(HALF.rapidity).v == pytest.approx(0.5, rel=1e-15)

    def test_superluminal_rejected(self):
        with pytest.raises(ValueError):
            Boost(1.0)
        with pytest.raises(ValueError):
            Boost(-3.0, c=2.0)

    def test_compose_adds_rapidities(self):
        a, b = Boost(0.5), Boost(-0.3)
        assert a.compose(b).rapidity == pytest.approx(a.rapidity + b.rapidity, abs=1e-15)
        assert a.compose(b).v == pytest.approx(0.2 / 0.85, rel=1e-15)

    def test_momentum_at_rest(self):
        q, e = boost_momentum(0.0, HALF)
        assert q == pytest.approx(-0.5773502691896258, rel=1e-15)
        assert e == pytest.approx(1.1547005383792517, rel=1e-15)

    def test_event(self):
        ev = boost_event(Event(1.0, 2.0), Boost(0.6))
        assert (ev.x, ev.t) == pytest.approx((-0.25, 1.75), abs=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-50, 50), st.floats(-0.99, 0.99))
    def test_mass_shell(self, p, v):
        q, e = boost_momentum(p, Boost(v))
        assert abs(e * e - q * q - 1.0) <= 1e-13 * e * e

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-20, 20), st.floats(-20, 20), st.floats(-0.99, 0.99))
    def test_interval(self, x, t, v):
        ev = boost_event(Event(x, t), Boost(v))
        scale = max(x * x + t * t, 1.0) / (1 - abs(v))
        assert abs((ev.t**2 - ev.x**2) - (t * t - x * x)) <= 1e-13 * scale


class TestCoefficients:
    def test_alpha_canonical(self):
        assert alpha_coefficient(0.75, 0.75, HALF) == pytest.approx(0.7 * GAMMA_HALF, rel=1e-15)
        assert alpha_coefficient(-0.75, -0.75, HALF) == pytest.approx(1.3 * GAMMA_HALF, rel=1e-15)
        assert alpha_coefficient(0.75, -0.75, HALF) == pytest.approx(GAMMA_HALF, rel=1e-15)

    def test_beta_equals_alpha(self):
        for p1, p2, v in [(0.75, -0.75, 0.5), (2.0, 0.1, -0.7), (-1.3, 0.4, 0.2)]:
            b = Boost(v)
            assert beta_coefficient(p1, p2, b) == pytest.approx(alpha_coefficient(p1, p2, b), rel=1e-13)

    def test_degenerate(self):
        with pytest.raises(DegenerateBoostError):
            beta_coefficient(0.75, 0.75, Boost(0.6))

    def test_velocity_inverse(self):
        assert momentum_from_velocity(0.6) == pytest.approx(0.75, rel=1e-15)
        assert momentum_from_velocity(np.array([-0.6, 0.0])) == pytest.approx([-0.75, 0.0], abs=1e-15)
        with pytest.raises(ValueError):
            momentum_from_velocity(1.0)


class TestRatio:
    def test_canonical(self):
        assert abs(consistency_ratio(0.75, -0.75, HALF) - 0.91) <= 1e-12

    def test_diagonal(self):
        for p in (-2.0, 0.0, 0.3, 5.0):
            assert abs(consistency_ratio(p, p, Boost(0.7)) - 1.0) <= 1e-12

    def test_close_velocities(self):
        p1, p2 = momentum_from_velocity(0.8), momentum_from_velocity(0.81)
        assert abs(consistency_ratio(p1, p2, HALF) - 1.0) <= 1e-3

    def test_second_order_in_velocity_gap(self):
        devs = []
        for gap in (0.01, 0.005, 0.0025):
            p1, p2 = momentum_from_velocity(0.3), momentum_from_velocity(0.3 + gap)
            devs.append(abs(consistency_ratio(p1, p2, HALF) - 1.0))
        for big, small in zip(devs, devs[1:]):
            assert big / small == pytest.approx(4.0, rel=0.2)

    def test_surface(self):
        surf = ratio_surface(-0.6, 0.6, 3, HALF)
        assert surf.ratio.shape == (3, 3)
        assert np.all(np.diag(surf.ratio) == 1.0)
        assert surf.ratio[2, 0] == pytest.approx(0.91, abs=1e-12)
        assert np.allclose(surf.ratio, surf.ratio.T, rtol=1e-14)
        rows = list(surf.rows())
        assert len(rows) == 9 and rows[2] == pytest.approx((-0.6, 0.6, 0.91))

    def test_surface_deviates_somewhere(self):
        surf = ratio_surface(-0.9, 0.9, 37, HALF)
        assert np.max(np.abs(surf.ratio - 1.0)) > 0.01

    def test_surface_bounds(self):
        with pytest.raises(ValueError):
            ratio_surface(-1.0, 0.5, 5, HALF)
        with pytest.raises(ValueError):
            ratio_surface(-0.5, 0.5, 1, HALF)


class TestBornResidual:
    def test_canonical(self):
        state = SuperpositionState.from_arrays([1.0, 1.0], [0.75, -0.75])
        rep = born_transform_residual(state, HALF)
        assert abs(rep.r - (math.sqrt(0.91) - 1)) <= 1e-10
        assert rep.inconsistent
        assert rep.beta_12 == pytest.approx(rep.alpha_12, rel=1e-13)
        assert rep.a1_boosted_sq == pytest.approx(0.7 * GAMMA_HALF)

    def test_amplitudes_do_not_matter(self):
        state = SuperpositionState.from_arrays([0.2j, -3.0], [0.75, -0.75])
        assert born_transform_residual(state, HALF).r == pytest.approx(math.sqrt(0.91) - 1, abs=1e-12)

    def test_vanishes_without_boost(self):
        state = SuperpositionState.from_arrays([1.0, 0.5], [2.0, -0.3])
        rep = born_transform_residual(state, Boost(0.0))
        assert abs(rep.r) <= 1e-12 and not rep.inconsistent

    def test_vanishes_for_equal_momenta(self):
        modes = (PlaneWaveMode(1.0, 0.75), PlaneWaveMode(0.5j, 0.75))
        rep = born_transform_residual(modes, Boost(0.6))
        assert abs(rep.r) <= 1e-12
        assert rep.beta_12 is None

    def test_needs_two_modes(self):
        with pytest.raises(ValueError):
            born_transform_residual(SuperpositionState.from_arrays([1.0], [0.0]), HALF)

    def test_as_dict(self):
        d = born_transform_residual(SuperpositionState.from_arrays([1, 1], [0.75, -0.75]), HALF).as_dict()
        assert d["inconsistent"] is True and set(d) >= {"alpha_11", "beta_12", "r"}


class TestSpinor:
    def test_matrix_example(self):
        S = spinor_boost_matrix(Boost(0.6))
        # rapidity atanh(0.6) = ln 2, half rapidity gives cosh = 1.0606601717798212
        assert S[0, 0] == pytest.approx(3 / (2 * math.sqrt(2)), rel=1e-15)
        assert S[0, 1] == pytest.approx(-1 / (2 * math.sqrt(2)), rel=1e-15)
        assert np.linalg.det(S) == pytest.approx(1.0, abs=1e-15)

    def test_rest_spinor(self):
        assert spinor(0.0) == pytest.approx([math.sqrt(2), 0.0])
        assert spinor(0.75) == pytest.approx([1.5, 0.5])

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-10, 10), st.floats(-0.95, 0.95))
    def test_boost_maps_spinors(self, p, v):
        b = Boost(v)
        q, _ = boost_momentum(p, b)
        target = spinor(q)
        assert np.max(np.abs(spinor_boost_matrix(b) @ spinor(p) - target)) <= 1e-12 * np.max(np.abs(target))

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-0.95, 0.95), st.floats(-0.95, 0.95))
    def test_composition(self, v1, v2):
        a, b = Boost(v1), Boost(v2)
        diff = spinor_boost_matrix(a) @ spinor_boost_matrix(b) - spinor_boost_matrix(a.compose(b))
        assert np.max(np.abs(diff)) <= 1e-12 * np.max(np.abs(spinor_boost_matrix(a.compose(b))))

    def test_dimensionful_spinor_boost(self):
        u = UnitSystem(m=2.0, c=3.0, hbar=0.5)
        b = Boost(1.2, c=3.0)
        q, _ = boost_momentum(1.7, b, u)
        assert np.allclose(spinor_boost_matrix(b) @ spinor(1.7, u), spinor(q, u), rtol=1e-13)


class TestDiracFourVector:
    def test_single_mode(self):
        state = SuperpositionState.from_arrays([0.7], [1.1])
        assert dirac_fourvector_residual(state, HALF, Event(np.linspace(-3, 3, 7), 0.4)) <= 1e-13

    def test_identity_boost(self):
        state = SuperpositionState.from_arrays([1.0, 0.5j], [0.75, -0.75])
        assert dirac_fourvector_residual(state, Boost(0.0), Event(np.linspace(-3, 3, 7), 0.0)) <= 1e-14

    def test_canonical_counterexample_passes(self):
        state = SuperpositionState.from_arrays([1.0, 1.0], [0.75, -0.75])
        assert dirac_fourvector_residual(state, HALF, Event(np.linspace(-5, 5, 64), 1.0)) <= 1e-12

    def test_random_states(self):
        rng = SplitMix64(7)
        for _ in range(20):
            state = random_two_mode_state(rng, 2.0)
            boost = Boost(rng.uniform(-0.9, 0.9))
            assert dirac_fourvector_residual(state, boost, random_events(rng, 64)) <= 1e-10

    def test_dimensionful(self):
        u = UnitSystem(m=2.0, c=3.0, hbar=0.5)
        state = random_two_mode_state(SplitMix64(3), 2.0, u)
        events = random_events(SplitMix64(4), 16, units=u)
        assert dirac_fourvector_residual(state, Boost(2.1, c=3.0), events) <= 1e-10

    def test_c_mismatch(self):
        with pytest.raises(ValueError):
            dirac_fourvector_residual(SuperpositionState.from_arrays([1.0], [0.0]), Boost(0.5, c=2.0),
                                      Event(0.0, 0.0))


def test_energy_boost_is_consistent():
    q, e = boost_momentum(np.array([0.3, -2.0]), Boost(-0.4))
    assert np.allclose(e, dispersion_energy(q), rtol=1e-14)


class TestIdentitySweep:
    def test_all_identities_hold(self):
        results = identity_sweep(42, 500)
        names = {r.name for r in results}
        assert names == {"beta_equals_alpha", "mass_shell", "pair_velocity_addition", "interval",
                         "phase_invariance", "spinor_boost", "spinor_composition", "ratio_symmetry"}
        for r in results:
            assert r.passed, (r.name, r.max_residual)

    def test_reproducible(self):
        a = [(r.name, r.max_residual, r.rejected) for r in identity_sweep(9, 100)]
        b = [(r.name, r.max_residual, r.rejected) for r in identity_sweep(9, 100)]
        assert a == b

    def test_gap_is_documented_constant(self):
        assert DEGENERACY_GAP == 1e-3


def test_splitmix_reference():
    # first outputs for seed 0, a widely published test vector
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4
