"""Control extraction, length functionals, and the lower-bound chain."""

import math

import numpy as np
import pytest

import oracles
from curvradii import frames, lifts, reconstruct, srmetric
from curvradii import geometry as geo
from curvradii.errors import ConfigError, NotAdmissible
from curvradii.lifts import RadiusPoint


def flow_states(model, field, q0, t=1.0, step=1e-3):
    times, states, _ = frames.flow_trajectory(model, field, q0, t, step)
    return times, [frames.unpack_state(model, z) for z in states]


@pytest.fixture
def flat_unit_state():
    return RadiusPoint(x=np.zeros(2), V=np.array([0.0, 1.0]),
                       R=np.array([1.0, 0.0]))


class TestControls:
    def test_circling_integral_curve(self, euclid2, flat_unit_state):
        times, states = flow_states(euclid2, "f1", flat_unit_state)
        traj = srmetric.controls_from_path(euclid2, states, times=times)
        assert np.allclose(traj.controls[:, 0], 1.0, atol=1e-5)
        assert np.allclose(traj.controls[:, 1], 0.0, atol=1e-5)

    def test_dilation_integral_curve(self, euclid3, rng):
        q = frames.random_radius_point(euclid3, rng)
        times, states = flow_states(euclid3, "f2", q)
        traj = srmetric.controls_from_path(euclid3, states, times=times)
        assert np.allclose(traj.controls[:, 0], 0.0, atol=1e-5)
        assert np.allclose(traj.controls[:, 1], 1.0, atol=1e-5)
        assert np.allclose(traj.controls[:, 2], 0.0, atol=1e-5)

    def test_arc_length_circle_controls(self, euclid2):
        r = 2.0
        t = np.linspace(-math.pi, math.pi, 1001) * r  # arc length
        pts = np.stack([r * np.cos(t / r), r * np.sin(t / r)], axis=1)
        lifted = lifts.lift(euclid2, geo.SampledCurve(t, pts), +1)
        traj = srmetric.controls_from_path(euclid2, lifted)
        # unit speed: u1 = 1/r; |R| constant: u2 = 0
        assert np.allclose(traj.controls[:, 0], 1.0 / r, atol=1e-6)
        assert np.allclose(traj.controls[:, 1], 0.0, atol=1e-6)

    def test_non_admissible_path_rejected(self, euclid2):
        t = np.linspace(0, 1, 80)
        states = [RadiusPoint(x=np.array([tt, 0.0]), V=np.array([1.0, 0.0]),
                              R=np.array([0.0, 1.0])) for tt in t]
        with pytest.raises(NotAdmissible):
            srmetric.controls_from_path(euclid2, states, times=t)


class TestLength:
    def test_circling_curve_constant_profile(self, euclid2, flat_unit_state):
        T = 1.3
        times, states = flow_states(euclid2, "f1", flat_unit_state, t=T)
        traj = srmetric.controls_from_path(euclid2, states, times=times)
        for a, b in ((0.0, 1.0), (1.0, 1.0), (0.7, 2.0)):
            L = srmetric.length(euclid2, srmetric.constant_profile(a, b), traj)
            assert abs(L - T * math.hypot(a, b)) < 1e-6

    def test_circling_curve_radial_profile(self, euclid2, flat_unit_state):
        T = 1.3
        times, states = flow_states(euclid2, "f1", flat_unit_state, t=T)
        traj = srmetric.controls_from_path(euclid2, states, times=times)
        prof = srmetric.radial_profile(lambda r: 0.0, lambda r: 1.0)
        assert abs(srmetric.length(euclid2, prof, traj) - T) < 1e-6

    def test_zero_duration(self, euclid2, flat_unit_state):
        traj = srmetric.ControlTrajectory(
            times=np.array([0.0]), states=[flat_unit_state],
            controls=np.zeros((1, 2)))
        assert srmetric.length(euclid2, srmetric.constant_profile(0, 1), traj) == 0.0

    def test_constant_equals_radial_reciprocal(self, sphere, rng):
        # the two length code paths agree for matching coefficient profiles
        q = frames.random_radius_point(sphere, rng, rmin=0.5, rmax=0.8)
        times, states = flow_states(sphere, "f1", q, t=0.8)
        traj = srmetric.controls_from_path(sphere, states, times=times)
        for a, b in ((0.0, 1.0), (1.2, 0.5)):
            const = srmetric.length(sphere, srmetric.constant_profile(a, b), traj)
            rad = srmetric.length(
                sphere,
                srmetric.radial_profile(lambda r: a / r, lambda r: b / r),
                traj)
            assert abs(const - rad) <= 1e-10 * max(1.0, const)

    def test_similarity_invariance_constant_profile(self, euclid2, rng):
        q = frames.random_radius_point(euclid2, rng)
        times, states = flow_states(euclid2, "f1", q, t=1.1)
        traj = srmetric.controls_from_path(euclid2, states, times=times)
        prof = srmetric.constant_profile(0.8, 1.1)
        base = srmetric.length(euclid2, prof, traj)
        ang, scale = 0.9, 2.7
        A = scale * np.array([[math.cos(ang), -math.sin(ang)],
                              [math.sin(ang), math.cos(ang)]])
        y = np.array([3.0, -2.0])
        moved = [RadiusPoint(x=A @ s.x + y, V=A @ s.V, R=A @ s.R)
                 for s in states]
        traj2 = srmetric.controls_from_path(euclid2, moved, times=times)
        assert abs(srmetric.length(euclid2, prof, traj2) - base) <= 1e-6 * base


class TestLowerBound:
    def test_circling_curve_achieves_equality(self, euclid2, flat_unit_state):
        times, states = flow_states(euclid2, "f1", flat_unit_state, t=0.9)
        traj = srmetric.controls_from_path(euclid2, states, times=times)
        prof = srmetric.radial_profile(lambda r: 0.0, lambda r: 1.0)
        report = srmetric.lower_bound_check(euclid2, prof, traj)
        assert abs(report.length - report.speed_bound) < 1e-9
        assert report.slack >= -1e-9

    def test_slack_nonnegative_generic(self, sphere, rng):
        q = frames.random_radius_point(sphere, rng, rmin=0.5, rmax=0.8)
        times, states = flow_states(sphere, "f1", q, t=0.7)
        traj = srmetric.controls_from_path(sphere, states, times=times)
        prof = srmetric.radial_profile(lambda r: 0.4, lambda r: 1.0)
        assert srmetric.lower_bound_check(sphere, prof, traj).slack >= -1e-9

    def test_rate_dominates_speed(self, euclid3, sphere, rng):
        # |D_t R| >= |xdot| along admissible paths, any frame direction
        for model in (euclid3, sphere):
            q = frames.random_radius_point(model, rng, rmin=0.5, rmax=0.8)
            for field in ("f1", "f2"):
                times, states = flow_states(model, field, q, t=0.6)
                traj = srmetric.controls_from_path(model, states, times=times)
                speed, drate, _ = srmetric._speed_samples(model, traj)
                assert np.min(drate - speed) >= -1e-9

    def test_arc_lift_bounded_by_chord(self, euclid2):
        # chord-arc oracle: arc of curvature 0.1 over chord 1
        prob = reconstruct.ShootingProblem(model=euclid2, x0=np.zeros(2),
                                           x1=np.array([1.0, 0.0]), kappa=0.1)
        conn = reconstruct.constant_curvature_connect(prob)
        lifted = reconstruct.connector_lift(euclid2, conn)
        traj = srmetric.controls_from_path(euclid2, lifted)
        prof = srmetric.radial_profile(lambda r: 0.0, lambda r: 1.0)
        report = srmetric.lower_bound_check(euclid2, prof, traj)
        assert report.length >= 1.0 - 1e-9
        assert abs(report.length - oracles.chord_arc_length(0.1, 1.0)) < 1e-6

    def test_profile_hypothesis_enforced(self, euclid2, flat_unit_state):
        times, states = flow_states(euclid2, "f1", flat_unit_state, t=0.5)
        traj = srmetric.controls_from_path(euclid2, states, times=times)
        weak = srmetric.radial_profile(lambda r: 0.0, lambda r: 0.5)
        with pytest.raises(ValueError):
            srmetric.lower_bound_check(euclid2, weak, traj)


class TestProfileParsing:
    def test_constant_profile(self):
        prof = srmetric.parse_profile("const:a=0.5,b=2")
        assert prof.kind == "constant" and prof.a == 0.5 and prof.b == 2.0

    def test_radial_expressions(self):
        prof = srmetric.parse_profile("radial:a=1/r,b=2/r")
        a, b = prof.coefficients(4.0)
        assert a == 0.25 and b == 0.5

    def test_bad_specs(self):
        for bad in ("const:a=0", "poly:a=1,b=1", "const:a=x,b=1",
                    "radial:a=__import__,b=1"):
            with pytest.raises(ConfigError):
                srmetric.parse_profile(bad)

    def test_constant_requires_positive_b(self):
        with pytest.raises(ValueError):
            srmetric.constant_profile(1.0, 0.0)
