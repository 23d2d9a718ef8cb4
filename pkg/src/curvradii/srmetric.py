"""Admissibility, control extraction, and sub-Riemannian length functionals.

Two families of fiber metrics are supported: constant-coefficient ones,
whose squared speed is a^2 |xdot|^2/|R|^2 + b^2 |D_t R|^2/|R|^2 (invariant
under similarity transformations), and radial-profile ones with squared
speed a(|R|)^2 |xdot|^2 + b(|R|)^2 |D_t R|^2.  A constant pair (a, b)
coincides with the radial profile (a/r, b/r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigError, NotAdmissible
from .frames import _complement_vectors
from .geometry import MetricModel, christoffel_contract, curve_derivatives, geodesic_between
from .lifts import LiftedCurve, RadiusPoint

ADMISSIBILITY_TOL = 1e-4


@dataclass(frozen=True)
class MetricProfile:
    """Fiber metric coefficients: constant reals or functions of |R|."""

    kind: str  # "constant" or "radial"
    a: float = 0.0
    b: float = 1.0
    a_fn: Optional[Callable[[float], float]] = None
    b_fn: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.kind not in ("constant", "radial"):
            raise ValueError("profile kind must be 'constant' or 'radial'")
        if self.kind == "constant" and not self.b > 0:
            raise ValueError("constant profile requires b > 0")
        if self.kind == "radial" and (self.a_fn is None or self.b_fn is None):
            raise ValueError("radial profile requires a_fn and b_fn")

    def coefficients(self, r: float) -> tuple[float, float]:
        """Radial-form coefficients (multiplying |xdot| and |D_t R|) at |R| = r."""
        if self.kind == "constant":
            return self.a / r, self.b / r
        a = float(self.a_fn(r))
        b = float(self.b_fn(r))
        if not b > 0:
            raise ValueError(f"radial profile has b({r:g}) = {b:g} <= 0")
        return a, b


def constant_profile(a: float, b: float) -> MetricProfile:
    return MetricProfile(kind="constant", a=a, b=b)


def radial_profile(a_fn: Callable[[float], float],
                   b_fn: Callable[[float], float]) -> MetricProfile:
    return MetricProfile(kind="radial", a_fn=a_fn, b_fn=b_fn)


_PROFILE_NAMES = {"exp": math.exp, "log": math.log, "sqrt": math.sqrt,
                  "sin": math.sin, "cos": math.cos, "tanh": math.tanh,
                  "pi": math.pi, "abs": abs}


def _compile_profile_expr(expr: str) -> Callable[[float], float]:
    code = compile(expr, "<profile entry>", "eval")
    for name in code.co_names:
        if name != "r" and name not in _PROFILE_NAMES:
            raise ConfigError(f"unknown name {name!r} in profile entry {expr!r}")

    def fn(r: float) -> float:
        scope = {"r": r}
        scope.update(_PROFILE_NAMES)
        return float(eval(code, {"__builtins__": {}}, scope))

    return fn


def parse_profile(spec: str) -> MetricProfile:
    """Parse "const:a=0,b=1" or "radial:a=<expr>,b=<expr>" (expressions in r)."""
    spec = spec.strip()
    try:
        kind, rest = spec.split(":", 1)
        entries = dict(item.split("=", 1) for item in rest.split(","))
        a_src = entries.pop("a")
        b_src = entries.pop("b")
        if entries:
            raise ValueError(f"unexpected keys {sorted(entries)}")
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad profile spec {spec!r}: {exc}") from exc
    kind = kind.strip().lower()
    if kind in ("const", "constant"):
        try:
            return constant_profile(float(a_src), float(b_src))
        except ValueError as exc:
            raise ConfigError(f"bad profile spec {spec!r}: {exc}") from exc
    if kind == "radial":
        return radial_profile(_compile_profile_expr(a_src), _compile_profile_expr(b_src))
    raise ConfigError(f"unknown profile kind {kind!r}")


@dataclass
class ControlTrajectory:
    """States along an admissible path plus their frame-control coordinates."""

    times: np.ndarray
    states: list[RadiusPoint]
    controls: np.ndarray       # shape (K, n)
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return len(self.states)


def _stacked_states(states: Sequence[RadiusPoint]):
    xs = np.stack([s.x for s in states])
    Rs = np.stack([s.R for s in states])
    Vs = np.stack([s.V for s in states])
    return xs, Rs, Vs


def _covariant_rates(model: MetricModel, times: np.ndarray,
                     states: Sequence[RadiusPoint]):
    """xdot, D_t R, D_t V along the state samples (stencil derivatives)."""
    xs, Rs, Vs = _stacked_states(states)
    xdot, _ = curve_derivatives(times, xs)
    Rdot, _ = curve_derivatives(times, Rs)
    Vdot, _ = curve_derivatives(times, Vs)
    DtR = np.empty_like(Rdot)
    DtV = np.empty_like(Vdot)
    for k in range(len(times)):
        DtR[k] = Rdot[k] + christoffel_contract(model, xs[k], xdot[k], Rs[k])
        DtV[k] = Vdot[k] + christoffel_contract(model, xs[k], xdot[k], Vs[k])
    return xdot, DtR, DtV


def controls_from_path(model: MetricModel, path,
                       times: Optional[np.ndarray] = None,
                       tol: float = ADMISSIBILITY_TOL) -> ControlTrajectory:
    """Solve the frame control system along a lifted path, per sample.

    The velocity triple (xdot, D_t R, D_t V) is matched in least squares
    against the frame columns; the relative residual is the admissibility
    defect.  Raises NotAdmissible when any sample exceeds ``tol``.
    """
    if isinstance(path, LiftedCurve):
        states = path.states
        times = path.times
    else:
        states = list(path)
        if times is None:
            raise ValueError("times required when passing raw state samples")
        times = np.asarray(times, dtype=float)
    n = model.dim
    K = len(states)
    xdot, DtR, DtV = _covariant_rates(model, times, states)
    controls = np.empty((K, n))
    residuals = np.empty(K)
    chart = None
    for k in range(K):
        s = states[k]
        cols = np.zeros((3 * n, n))
        cols[:n, 0] = s.V
        cols[n:2 * n, 0] = -s.V
        cols[2 * n:, 0] = s.R
        cols[n:2 * n, 1] = s.R
        cols[2 * n:, 1] = s.V
        if n >= 3:
            vecs, chart = _complement_vectors(model, s.x, s.R, s.V, prev_chart=chart)
            for j in range(n - 2):
                cols[n:2 * n, 2 + j] = vecs[j]
        rhs = np.concatenate([xdot[k], DtR[k], DtV[k]])
        u, *_ = np.linalg.lstsq(cols, rhs, rcond=None)
        defect = np.linalg.norm(cols @ u - rhs)
        scale = max(float(np.linalg.norm(rhs)), model.norm(s.x, s.R), 1e-30)
        controls[k] = u
        residuals[k] = defect / scale
    if np.max(residuals) > tol:
        k = int(np.argmax(residuals))
        raise NotAdmissible(
            f"admissibility defect {residuals[k]:.3e} > {tol:.1e} at sample {k}")
    return ControlTrajectory(times=times, states=states, controls=controls,
                             residuals=residuals)


def _speed_samples(model: MetricModel, traj: ControlTrajectory):
    """(|xdot|, |D_t R|, |R|) at every sample of a trajectory."""
    xdot, DtR, _ = _covariant_rates(model, traj.times, traj.states)
    K = len(traj)
    speed = np.empty(K)
    drate = np.empty(K)
    radii = np.empty(K)
    for k in range(K):
        s = traj.states[k]
        speed[k] = model.norm(s.x, xdot[k])
        drate[k] = model.norm(s.x, DtR[k])
        radii[k] = model.norm(s.x, s.R)
    return speed, drate, radii


def length(model: MetricModel, profile: MetricProfile,
           traj: ControlTrajectory) -> float:
    """Sub-Riemannian length of an admissible trajectory (trapezoid rule)."""
    if len(traj) < 2:
        return 0.0
    speed, drate, radii = _speed_samples(model, traj)
    if profile.kind == "constant":
        integrand = np.sqrt(profile.a ** 2 * speed ** 2 / radii ** 2
                            + profile.b ** 2 * drate ** 2 / radii ** 2)
    else:
        avals = np.array([profile.a_fn(r) for r in radii])
        bvals = np.array([profile.b_fn(r) for r in radii])
        if np.any(bvals <= 0):
            raise ValueError("radial profile must have b > 0 on the sampled range")
        integrand = np.sqrt(avals ** 2 * speed ** 2 + bvals ** 2 * drate ** 2)
    return float(np.trapezoid(integrand, traj.times))


class LowerBoundReport(NamedTuple):
    length: float
    speed_bound: float   # integral of |xdot| sqrt(a^2 + b^2), radial form
    chord: float         # Riemannian distance between the endpoints
    slack: float         # smallest gap in length >= speed_bound >= chord


def lower_bound_check(model: MetricModel, profile: MetricProfile,
                      traj: ControlTrajectory,
                      chord: Optional[float] = None) -> LowerBoundReport:
    """Verify the chain length >= speed integral >= endpoint distance.

    Requires the radial-form coefficients to satisfy a^2 + b^2 >= 1 on the
    sampled radius range (the reconstruction hypothesis).  ``chord`` may be
    passed to skip the geodesic shooting solve.
    """
    speed, _, radii = _speed_samples(model, traj)
    coeffs = np.array([profile.coefficients(r) for r in radii])
    gain = coeffs[:, 0] ** 2 + coeffs[:, 1] ** 2
    if np.any(gain < 1.0 - 1e-9):
        raise ValueError(
            f"profile violates a^2 + b^2 >= 1 on |R| range "
            f"[{radii.min():.3g}, {radii.max():.3g}]")
    L = length(model, profile, traj)
    speed_bound = float(np.trapezoid(speed * np.sqrt(gain), traj.times))
    if chord is None:
        _, chord = geodesic_between(model, traj.states[0].x, traj.states[-1].x)
    slack = min(L - speed_bound, speed_bound - chord)
    return LowerBoundReport(length=L, speed_bound=speed_bound, chord=chord,
                            slack=slack)
