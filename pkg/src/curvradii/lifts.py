"""Geodesic curvature, curvature radius, and lifts of curves.

A regular curve with never-vanishing geodesic curvature lifts to a path of
states (x, V, R): the point, a velocity-direction vector rescaled to the
radius length, and the curvature radius vector itself.  R is orthogonal to
V and both have length equal to the reciprocal of the geodesic curvature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpeed, KappaVanishes
from .geometry import MetricModel, SampledCurve, christoffel_contract

KAPPA_MIN = 1e-8
SPEED_TOLERANCE = 1e-10
CONSTRAINT_TOL = 1e-6


@dataclass
class RadiusPoint:
    """A state (x, V, R): chart point plus two orthogonal equal-length vectors."""

    x: np.ndarray
    V: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.V = np.asarray(self.V, dtype=float)
        self.R = np.asarray(self.R, dtype=float)

    def constraint_errors(self, model: MetricModel) -> tuple[float, float]:
        """(|<R,V>|, ||R|-|V||) measured with the model metric."""
        ip = abs(model.inner(self.x, self.R, self.V))
        dn = abs(model.norm(self.x, self.R) - model.norm(self.x, self.V))
        return ip, dn

    def is_valid(self, model: MetricModel, tol: float = CONSTRAINT_TOL) -> bool:
        ip, dn = self.constraint_errors(model)
        return ip <= tol and dn <= tol and model.norm(self.x, self.R) > 0


@dataclass
class LiftedCurve:
    """Lift of a sampled curve: one RadiusPoint per sample plus the lift sign."""

    times: np.ndarray
    states: list[RadiusPoint]
    sign: int = +1

    def __len__(self) -> int:
        return len(self.states)


def _acceleration_split(model: MetricModel, curve: SampledCurve, k: int,
                        speed_tolerance: float):
    """Velocity, its covariant acceleration, and the normal part at node k."""
    xdot, xddot = curve.derivatives()
    x = curve.points[k]
    v = xdot[k]
    speed2 = model.inner(x, v, v)
    if speed2 <= speed_tolerance ** 2:
        raise DegenerateSpeed(f"curve speed below tolerance at sample {k}")
    acc = xddot[k] + christoffel_contract(model, x, v, v)
    normal = acc - (model.inner(x, acc, v) / speed2) * v
    return x, v, speed2, normal


def geodesic_curvature(model: MetricModel, curve: SampledCurve, k: int,
                       speed_tolerance: float = SPEED_TOLERANCE) -> float:
    """Geodesic curvature at sample k: |normal acceleration| / speed^2."""
    x, _, speed2, normal = _acceleration_split(model, curve, k, speed_tolerance)
    return model.norm(x, normal) / speed2


def curvature_radius(model: MetricModel, curve: SampledCurve, k: int,
                     kappa_min: float = KAPPA_MIN,
                     speed_tolerance: float = SPEED_TOLERANCE) -> np.ndarray:
    """Curvature radius vector at sample k: length 1/kappa along the normal."""
    x, _, speed2, normal = _acceleration_split(model, curve, k, speed_tolerance)
    nnorm = model.norm(x, normal)
    kappa = nnorm / speed2
    if kappa <= kappa_min:
        raise KappaVanishes(
            f"geodesic curvature {kappa:.3e} below {kappa_min:.1e} at sample {k}",
            sample_index=k,
        )
    return normal / (kappa * nnorm)


def lift(model: MetricModel, curve: SampledCurve, sign: int = +1,
         kappa_min: float = KAPPA_MIN,
         speed_tolerance: float = SPEED_TOLERANCE) -> LiftedCurve:
    """Lift a curve to radius-point states (x, +-|R| vhat, R) at every sample."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    curve.validate_domain(model)
    xdot, xddot = curve.derivatives()
    states = []
    for k in range(len(curve)):
        x = curve.points[k]
        v = xdot[k]
        speed2 = model.inner(x, v, v)
        if speed2 <= speed_tolerance ** 2:
            raise DegenerateSpeed(f"curve speed below tolerance at sample {k}")
        acc = xddot[k] + christoffel_contract(model, x, v, v)
        normal = acc - (model.inner(x, acc, v) / speed2) * v
        nnorm = model.norm(x, normal)
        kappa = nnorm / speed2
        if kappa <= kappa_min:
            raise KappaVanishes(
                f"geodesic curvature {kappa:.3e} below {kappa_min:.1e} at sample {k}",
                sample_index=k,
            )
        R = normal / (kappa * nnorm)
        V = sign * (model.norm(x, R) / math.sqrt(speed2)) * v
        states.append(RadiusPoint(x, V, R))
    return LiftedCurve(times=curve.times.copy(), states=states, sign=sign)


def homothety_invariance_check(model: MetricModel, curve: SampledCurve,
                               lam: float, sign: int = +1) -> float:
    """Sup-norm difference of curvature radii under scaling the metric by lam.

    The scaled model recomputes its connection by finite differences, so the
    two sides follow independent code paths; the radii agree analytically.
    """
    from .geometry import scale_metric

    base = lift(model, curve, sign)
    scaled = lift(scale_metric(model, lam), curve, sign)
    worst = 0.0
    for a, b in zip(base.states, scaled.states):
        worst = max(worst, float(np.max(np.abs(a.R - b.R))))
    return worst
