"""Metric, connection, curvature, and geodesic tests against symbolic and
closed-form references (see oracles.py)."""

import math

import numpy as np
import pytest

import oracles
from curvradii import geometry as geo
from curvradii.errors import (
    ConfigError,
    DegeneratePlane,
    DomainError,
    InsufficientSamples,
    LeftChart,
    SingularMetric,
)


class TestChristoffel:
    def test_euclidean_symbols_vanish(self, euclid2, rng):
        for _ in range(5):
            x = rng.normal(size=2)
            assert np.allclose(geo.christoffel(euclid2, x), 0.0)

    def test_hyperbolic_at_base_point(self, hyperbolic):
        # frozen from the symbolic Levi-Civita oracle at (0, 1)
        gam = geo.christoffel(hyperbolic, np.array([0.0, 1.0]))
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 1] = expected[0, 1, 0] = -1.0
        expected[1, 0, 0] = 1.0
        expected[1, 1, 1] = -1.0
        assert np.allclose(gam, expected, atol=1e-12)
        g, coords = oracles.hyperbolic_metric()
        assert np.allclose(oracles.christoffel_at(g, coords, (0.0, 1.0)),
                           expected, atol=1e-12)

    def test_sphere_at_equator(self, sphere):
        gam = geo.christoffel(sphere, np.array([math.pi / 2, 0.3]))
        assert abs(gam[0, 1, 1]) < 1e-12   # -sin cos at the equator
        assert abs(gam[1, 0, 1]) < 1e-12   # cot at the equator

    def test_fd_matches_analytic(self, rng):
        for make in (geo.sphere2, geo.hyperbolic2):
            model = make()
            fd_model = geo.MetricModel(
                dim=2, metric_fn=model.metric_fn, christoffel_fn=None,
                fd_step=model.fd_step, domain_check=model.domain_check,
                name="fd", sample_lo=model.sample_lo, sample_hi=model.sample_hi)
            for _ in range(10):
                x = model.sample_point(rng)
                err = np.max(np.abs(geo.christoffel(fd_model, x)
                                    - geo.christoffel(model, x)))
                assert err <= 10 * model.fd_step ** 2

    def test_fd_symbols_symmetric(self, rng):
        model = geo.parse_model("diag:1+x1*x1,1+x2*x2")
        for _ in range(5):
            x = rng.uniform(-0.8, 0.8, size=2)
            gam = geo.christoffel(model, x)
            assert np.allclose(gam, np.swapaxes(gam, 1, 2), atol=1e-14)

    def test_domain_error(self, sphere):
        with pytest.raises(DomainError):
            geo.christoffel(sphere, np.array([0.0, 0.0]))

    def test_singular_metric(self):
        model = geo.MetricModel(
            dim=2, metric_fn=lambda x: np.diag([1.0, x[0] ** 2]),
            domain_check=lambda x: True, name="degenerate")
        with pytest.raises(SingularMetric):
            geo.christoffel(model, np.array([0.0, 1.0]))


class TestChristoffelContract:
    def test_euclidean_zero(self, euclid2, rng):
        out = geo.christoffel_contract(euclid2, rng.normal(size=2),
                                       rng.normal(size=2), rng.normal(size=2))
        assert np.allclose(out, 0.0)

    def test_symmetric_in_arguments(self, hyperbolic, rng):
        for _ in range(10):
            x = hyperbolic.sample_point(rng)
            X = rng.normal(size=2)
            Y = rng.normal(size=2)
            assert np.allclose(geo.christoffel_contract(hyperbolic, x, X, Y),
                               geo.christoffel_contract(hyperbolic, x, Y, X))

    def test_hyperbolic_value(self, hyperbolic):
        out = geo.christoffel_contract(hyperbolic, np.array([0.0, 1.0]),
                                       np.array([1.0, 0.0]), np.array([1.0, 0.0]))
        assert np.allclose(out, [0.0, 1.0], atol=1e-12)


class TestCovariantDerivative:
    def test_constant_field_flat(self, euclid2):
        t = np.linspace(0, 1, 50)
        curve = geo.SampledCurve(t, np.stack([np.sin(t), t ** 2], axis=1))
        W = np.tile([1.0, -2.0], (50, 1))
        assert np.allclose(geo.covariant_derivative(euclid2, curve, W), 0.0,
                           atol=1e-10)

    def test_linear_field_flat(self, euclid2):
        t = np.linspace(0, 1, 50)
        curve = geo.SampledCurve(t, np.stack([t, np.cos(t)], axis=1))
        W = np.stack([t, np.zeros_like(t)], axis=1)
        out = geo.covariant_derivative(euclid2, curve, W)
        assert np.allclose(out, np.tile([1.0, 0.0], (50, 1)), atol=1e-9)

    def test_great_circle_velocity_is_parallel(self, sphere):
        # tilted great circle; the geodesic ODE residual is the oracle
        t = np.linspace(-1.0, 1.0, 401)
        alpha = 0.4
        z = np.sin(t) * math.sin(alpha)
        theta = np.arccos(np.clip(z, -1, 1))
        phi = np.arctan2(np.sin(t) * math.cos(alpha), np.cos(t))
        curve = geo.SampledCurve(t, np.stack([theta, phi], axis=1))
        vel, _ = curve.derivatives()
        out = geo.covariant_derivative(sphere, curve, vel)
        assert np.max(np.abs(out[3:-3])) < 1e-6

    def test_too_few_samples(self, euclid2):
        curve = geo.SampledCurve(np.array([0.0, 1.0, 2.0]),
                                 np.zeros((3, 2)) + [[0, 0], [1, 0], [2, 0]])
        with pytest.raises(InsufficientSamples):
            geo.covariant_derivative(euclid2, geo.SampledCurve(
                np.array([0.0, 1.0]), np.array([[0.0, 0.0], [1.0, 0.0]])),
                np.zeros((2, 2)))
        geo.covariant_derivative(euclid2, curve, np.zeros((3, 2)))

    def test_metric_compatibility(self, hyperbolic):
        # d/dt <W,W> = 2 <D_t W, W> up to stencil error
        t = np.linspace(0, 1, 201)
        curve = geo.SampledCurve(
            t, np.stack([0.3 * np.sin(t), 1.2 + 0.2 * np.cos(t)], axis=1))
        W = np.stack([np.cos(2 * t), np.sin(t) + 0.5], axis=1)
        DtW = geo.covariant_derivative(hyperbolic, curve, W)
        norms = np.array([hyperbolic.inner(curve.points[k], W[k], W[k])
                          for k in range(len(t))])
        dnorm, _ = geo.curve_derivatives(t, norms)
        inner = np.array([hyperbolic.inner(curve.points[k], DtW[k], W[k])
                          for k in range(len(t))])
        h = t[1] - t[0]
        assert np.max(np.abs(dnorm - 2 * inner)[3:-3]) < 100 * h ** 2


class TestRiemann:
    def test_flat_zero(self, euclid3, rng):
        out = geo.riemann(euclid3, rng.normal(size=3), rng.normal(size=3),
                          rng.normal(size=3), rng.normal(size=3))
        assert np.allclose(out, 0.0, atol=1e-12)

    def test_antisymmetry(self, sphere, hyperbolic, rng):
        for model in (sphere, hyperbolic):
            for _ in range(5):
                x = model.sample_point(rng)
                X = rng.normal(size=2)
                Y = rng.normal(size=2)
                Z = rng.normal(size=2)
                assert np.allclose(geo.riemann(model, x, X, Y, Z),
                                   -geo.riemann(model, x, Y, X, Z), atol=1e-8)
                assert np.max(np.abs(geo.riemann(model, x, X, X, Z))) < 1e-8

    def test_sphere_sectional_form(self, sphere):
        # frozen from the symbolic Gauss-curvature oracle: K = 1
        x = np.array([1.1, 0.4])
        g = sphere.metric(x)
        X = np.array([1.0, 0.0])
        Y = np.array([0.0, 1.0]) / math.sqrt(g[1, 1])
        val = sphere.inner(x, geo.riemann(sphere, x, X, Y, Y), X)
        assert abs(val - 1.0) < 1e-6


class TestSectionalCurvature:
    def test_flat(self, euclid3, rng):
        assert abs(geo.sectional_curvature(
            euclid3, rng.normal(size=3), [1, 0, 0], [0, 1, 0])) < 1e-12

    def test_sphere_and_hyperbolic(self, sphere, hyperbolic, rng):
        # oracle values: K = +1 and K = -1 everywhere
        for model, expect in ((sphere, 1.0), (hyperbolic, -1.0)):
            for _ in range(5):
                x = model.sample_point(rng)
                X = rng.normal(size=2)
                Y = rng.normal(size=2)
                assert abs(geo.sectional_curvature(model, x, X, Y) - expect) < 1e-6

    def test_degenerate_plane(self, sphere):
        x = np.array([1.0, 0.0])
        with pytest.raises(DegeneratePlane):
            geo.sectional_curvature(sphere, x, [1.0, 2.0], [2.0, 4.0])


class TestExpMap:
    def test_flat_straight_line(self, euclid2):
        out = geo.exp_map(euclid2, geo.TangentPoint(np.zeros(2),
                                                    np.array([1.0, 0.0])), 2.0)
        assert np.allclose(out, [2.0, 0.0], atol=1e-12)

    def test_zero_time_identity(self, sphere):
        x = np.array([1.0, 0.5])
        out = geo.exp_map(sphere, geo.TangentPoint(x, np.array([0.3, -0.2])), 0.0)
        assert np.allclose(out, x)

    def test_sphere_meridian_great_circle(self, sphere):
        # great-circle closed form: colatitude decreases at unit rate
        x = np.array([math.pi / 2, 0.7])
        out = geo.exp_map(sphere, geo.TangentPoint(x, np.array([-1.0, 0.0])), 1.0)
        assert np.allclose(out, [math.pi / 2 - 1.0, 0.7], atol=1e-9)

    def test_leaves_chart_at_pole(self, sphere):
        x = np.array([math.pi / 2, 0.7])
        with pytest.raises(LeftChart):
            geo.exp_map(sphere, geo.TangentPoint(x, np.array([-1.0, 0.0])),
                        math.pi)

    def test_energy_conservation(self, sphere, hyperbolic, rng):
        step = 1e-3
        for model in (sphere, hyperbolic):
            x = model.sample_point(rng)
            v = rng.normal(size=2)
            v *= 0.3 / model.norm(x, v)
            _, xs, vs = geo.geodesic_trajectory(model, geo.TangentPoint(x, v),
                                                1.0, step)
            speeds = np.array([model.norm(xs[k], vs[k]) for k in range(len(xs))])
            assert np.max(np.abs(speeds - speeds[0])) <= 10 * step ** 4


class TestGeodesicBetween:
    def test_sphere_matches_closed_form(self, sphere):
        p0 = np.array([1.2, 0.2])
        p1 = np.array([1.5, 0.9])
        _, d = geo.geodesic_between(sphere, p0, p1)
        assert abs(d - oracles.sphere_distance(p0, p1)) < 1e-8

    def test_hyperbolic_matches_closed_form(self, hyperbolic):
        p0 = np.array([0.0, 1.0])
        p1 = np.array([0.5, 1.2])
        _, d = geo.geodesic_between(hyperbolic, p0, p1)
        assert abs(d - oracles.hyperbolic_distance(p0, p1)) < 1e-8


class TestModelSpecs:
    def test_builtin_names(self):
        assert geo.parse_model("euclidean:4").dim == 4
        assert geo.parse_model("sphere2").name == "sphere2"
        assert geo.parse_model("hyperbolic2").name == "hyperbolic2"

    def test_matrix_spec_matches_builtin(self, hyperbolic, rng):
        custom = geo.parse_model("diag:1/(x2*x2),1/(x2*x2)")
        for _ in range(5):
            x = hyperbolic.sample_point(rng)
            assert np.allclose(custom.metric(x), hyperbolic.metric(x))
            err = np.max(np.abs(geo.christoffel(custom, x)
                                - geo.christoffel(hyperbolic, x)))
            assert err < 1e-8

    def test_matrix_form(self):
        model = geo.parse_model("matrix:1,0;0,1+x1*x1")
        assert model.metric(np.array([2.0, 0.0]))[1, 1] == 5.0

    def test_bad_specs(self):
        with pytest.raises(ConfigError):
            geo.parse_model("nope")
        with pytest.raises(ConfigError):
            geo.parse_model("euclidean:1")
        with pytest.raises(ConfigError):
            geo.parse_model("diag:import os")

    def test_sphere_domain_excludes_poles(self, sphere):
        assert not sphere.domain_check(np.array([1e-4, 0.0]))
        assert sphere.domain_check(np.array([0.5, 0.0]))

    def test_builtin_metrics_positive_definite(self, euclid3, sphere,
                                               hyperbolic, rng):
        for model in (euclid3, sphere, hyperbolic):
            for _ in range(10):
                g = model.metric(model.sample_point(rng))
                assert np.allclose(g, g.T)
                assert np.linalg.eigvalsh(g)[0] > 0


class TestSampledCurve:
    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            geo.SampledCurve(np.array([0.0, 0.0, 1.0]), np.zeros((3, 2)))

    def test_derivatives_fourth_order_interior(self):
        t = np.linspace(0, 1, 101)
        d1, d2 = geo.curve_derivatives(t, np.sin(3 * t))
        assert np.max(np.abs(d1 - 3 * np.cos(3 * t))) < 1e-7
        assert np.max(np.abs(d2 + 9 * np.sin(3 * t))) < 1e-5

    def test_nonuniform_grid(self):
        t = np.sort(np.random.default_rng(1).uniform(0, 1, 80))
        d1, _ = geo.curve_derivatives(t, t ** 3)
        assert np.max(np.abs(d1 - 3 * t ** 2)) < 1e-9
