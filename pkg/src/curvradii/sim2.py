"""The similarity group of the plane: circle coordinates, left-invariant
frame, sub-Riemannian Hamiltonian flow, first integrals, and the projected
curvature law.

A state (theta, r, x1, x2) encodes an oriented circle: center (x1, x2),
radius r, contact direction theta.  Embedding these states as 3x3
rotation-scaling-translation matrices identifies the radius-point space of
the flat plane with the group, and the two base frame fields push forward
to left-invariant matrix fields.  The Hamiltonian flow of the frame's
quadratic Hamiltonian (in log-radius coordinates rho = log r) conserves the
translation momenta, whose magnitude and angle control the Euclidean
curvature of the (theta, rho) projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpeed, NonFinite, UndefinedAngle, ZeroRadius
from .geometry import curve_derivatives

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba ships with the package
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


@dataclass(frozen=True)
class CircleCoords:
    """Circle data: contact angle, radius (> 0), and center."""

    theta: float
    r: float
    x1: float
    x2: float

    @property
    def rho(self) -> float:
        return math.log(self.r)


def to_circle_coords(y, R) -> CircleCoords:
    """Circle through the point y with radius vector R (center y + R)."""
    y = np.asarray(y, dtype=float)
    R = np.asarray(R, dtype=float)
    r = float(np.hypot(R[0], R[1]))
    if r <= 0.0:
        raise ZeroRadius("radius vector must be nonzero")
    theta = math.atan2(-R[1], -R[0])
    return CircleCoords(theta=theta, r=r, x1=float(y[0] + R[0]), x2=float(y[1] + R[1]))


def from_circle_coords(c: CircleCoords) -> tuple[np.ndarray, np.ndarray]:
    """Invert to_circle_coords: the point on the circle and its radius vector."""
    R = np.array([-c.r * math.cos(c.theta), -c.r * math.sin(c.theta)])
    y = np.array([c.x1, c.x2]) - R
    return y, R


@dataclass(frozen=True)
class GroupElement:
    """A 3x3 rotation-scaling block with translation column."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.shape != (3, 3):
            raise ValueError("group element must be a 3x3 matrix")

    def multiply(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix)

    def scale(self) -> float:
        block = self.matrix[:2, :2]
        return math.sqrt(max(np.linalg.det(block), 0.0))

    def form_defect(self) -> float:
        """How far the matrix is from the displayed form (0 for members)."""
        m = self.matrix
        r = self.scale()
        th = math.atan2(m[1, 0], m[0, 0])
        rebuilt = np.array([
            [r * math.cos(th), -r * math.sin(th), m[0, 2]],
            [r * math.sin(th), r * math.cos(th), m[1, 2]],
            [0.0, 0.0, 1.0],
        ])
        return float(np.max(np.abs(m - rebuilt)))

    def to_circle_coords(self) -> CircleCoords:
        m = self.matrix
        r = self.scale()
        if r <= 0:
            raise ZeroRadius("degenerate rotation-scaling block")
        return CircleCoords(theta=math.atan2(m[1, 0], m[0, 0]), r=r,
                            x1=float(m[0, 2]), x2=float(m[1, 2]))


def embed_group(c: CircleCoords) -> GroupElement:
    """The matrix of the rotation by theta scaled by r, translating by the center."""
    if c.r <= 0:
        raise ZeroRadius("radius must be positive")
    ct, st = math.cos(c.theta), math.sin(c.theta)
    return GroupElement(np.array([
        [c.r * ct, -c.r * st, c.x1],
        [c.r * st, c.r * ct, c.x2],
        [0.0, 0.0, 1.0],
    ]))


# constant generators of the two left-invariant frame directions
FRAME_GENERATOR_1 = np.array([[0.0, -1.0, 0.0],
                              [1.0, 0.0, 0.0],
                              [0.0, 0.0, 0.0]])
FRAME_GENERATOR_2 = np.array([[1.0, 0.0, -1.0],
                              [0.0, 1.0, 0.0],
                              [0.0, 0.0, 0.0]])


def left_invariant_frame(Q: GroupElement) -> tuple[np.ndarray, np.ndarray]:
    """Matrix values of the pushed-forward frame at Q: (-Q G1, Q G2)."""
    return (-Q.matrix @ FRAME_GENERATOR_1, Q.matrix @ FRAME_GENERATOR_2)


# ---------------------------------------------------------------------------
# Hamiltonian flow in (theta, rho, x1, x2, p_theta, p_rho, p_x1, p_x2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CovectorState:
    theta: float
    rho: float
    x1: float
    x2: float
    p_theta: float
    p_rho: float
    p_x1: float
    p_x2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta, self.rho, self.x1, self.x2,
                         self.p_theta, self.p_rho, self.p_x1, self.p_x2])

    @staticmethod
    def from_array(y) -> "CovectorState":
        y = np.asarray(y, dtype=float)
        return CovectorState(*[float(v) for v in y])


def hamiltonian(s: CovectorState) -> float:
    """H = (p_theta^2 + (p_rho - e^rho cos(theta) p_x1 - e^rho sin(theta) p_x2)^2) / 2."""
    w = s.p_rho - math.exp(s.rho) * (math.cos(s.theta) * s.p_x1
                                     + math.sin(s.theta) * s.p_x2)
    return 0.5 * (s.p_theta ** 2 + w ** 2)


def hamiltonian_rhs(y: np.ndarray) -> np.ndarray:
    """Analytic Hamilton equations (validated against gradients of H in tests)."""
    dy = np.empty(8)
    _rhs_into(np.asarray(y, dtype=float), dy)
    return dy


@njit(cache=True)
def _rhs_into(y, dy):
    th = y[0]
    rho = y[1]
    pth = y[4]
    prho = y[5]
    p1 = y[6]
    p2 = y[7]
    er = math.exp(rho)
    ct = math.cos(th)
    st = math.sin(th)
    A = ct * p1 + st * p2
    B = ct * p2 - st * p1
    w = prho - er * A
    dy[0] = pth
    dy[1] = w
    dy[2] = -w * er * ct
    dy[3] = -w * er * st
    dy[4] = w * er * B
    dy[5] = w * er * A
    dy[6] = 0.0
    dy[7] = 0.0


@njit(cache=True)
def _flow_loop(y0, n_steps, h):
    out = np.empty((n_steps + 1, 8))
    y = y0.copy()
    k1 = np.empty(8)
    k2 = np.empty(8)
    k3 = np.empty(8)
    k4 = np.empty(8)
    tmp = np.empty(8)
    out[0] = y
    for i in range(n_steps):
        _rhs_into(y, k1)
        for j in range(8):
            tmp[j] = y[j] + 0.5 * h * k1[j]
        _rhs_into(tmp, k2)
        for j in range(8):
            tmp[j] = y[j] + 0.5 * h * k2[j]
        _rhs_into(tmp, k3)
        for j in range(8):
            tmp[j] = y[j] + h * k3[j]
        _rhs_into(tmp, k4)
        for j in range(8):
            y[j] = y[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        out[i + 1] = y
    return out


@dataclass
class SimTrajectory:
    """A Hamiltonian trajectory: times and (K+1, 8) state rows."""

    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> CovectorState:
        return CovectorState.from_array(self.states[k])

    def hamiltonians(self) -> np.ndarray:
        th = self.states[:, 0]
        rho = self.states[:, 1]
        w = self.states[:, 5] - np.exp(rho) * (np.cos(th) * self.states[:, 6]
                                               + np.sin(th) * self.states[:, 7])
        return 0.5 * (self.states[:, 4] ** 2 + w ** 2)


def hamiltonian_flow(s0: CovectorState, T: float, step: float = 1e-4) -> SimTrajectory:
    """Integrate Hamilton's equations with fixed-step RK4 over [0, T]."""
    if step <= 0:
        raise ValueError("step must be positive")
    n_steps = max(1, int(math.ceil(abs(T) / step - 1e-12))) if T != 0 else 0
    h = T / n_steps if n_steps else 0.0
    try:
        states = _flow_loop(s0.as_array(), n_steps, h)
    except OverflowError as exc:  # pure-python fallback path
        raise NonFinite("Hamiltonian flow overflowed (e^rho too large?)") from exc
    if not np.all(np.isfinite(states)):
        raise NonFinite("Hamiltonian flow overflowed (e^rho too large?)")
    times = np.linspace(0.0, T, n_steps + 1)
    return SimTrajectory(times=times, states=states)


def first_integrals(s: CovectorState) -> tuple[float, float]:
    """Translation-momentum magnitude and angle (both conserved by the flow)."""
    eps = math.hypot(s.p_x1, s.p_x2)
    if eps == 0.0:
        raise UndefinedAngle("momentum angle undefined at zero magnitude",
                             epsilon=0.0)
    return eps, math.atan2(s.p_x2, s.p_x1)


def projection_curvatures(traj: SimTrajectory,
                          speed_tolerance: float = 1e-10):
    """Per-sample curvature of the (theta, rho) projection and the law value.

    The signed Euclidean curvature of t -> (theta, rho) comes from finite
    differences; the law value is eps e^rho sin(theta - alpha) normalized
    by the projection speed sqrt(2H), which reduces to the plain law on the
    H = 1/2 level set where extremals are arc-length parametrized.
    """
    if len(traj) < 7:
        raise DegenerateSpeed("trajectory too short for curvature stencils")
    s0 = traj.state(0)
    H = hamiltonian(s0)
    speed_ref = math.sqrt(2.0 * H)
    if speed_ref <= speed_tolerance:
        raise DegenerateSpeed("projection speed below tolerance")
    eps, alpha = first_integrals(s0)
    th = traj.states[:, 0]
    rho = traj.states[:, 1]
    d1t, d2t = curve_derivatives(traj.times, th)
    d1r, d2r = curve_derivatives(traj.times, rho)
    speed2 = d1t ** 2 + d1r ** 2
    if np.min(speed2) <= speed_tolerance ** 2:
        raise DegenerateSpeed("projection speed below tolerance")
    kappa_fd = (d1t * d2r - d1r * d2t) / speed2 ** 1.5
    law = eps * np.exp(rho) * np.sin(th - alpha) / speed_ref
    return kappa_fd, law


def projected_curvature_residual(traj: SimTrajectory,
                                 speed_tolerance: float = 1e-10) -> float:
    """Sup defect of the curvature law over interior samples (the endpoint
    stencils are one-sided and excluded)."""
    kappa_fd, law = projection_curvatures(traj, speed_tolerance)
    inner = slice(3, -3)
    return float(np.max(np.abs(kappa_fd[inner] - law[inner])))


def se2_submersion_residual(c: CircleCoords, fd_step: float = 1e-6) -> float:
    """Defect of the projection relations onto the rigid-motion group.

    Forgetting the radius maps (theta, r, x1, x2) to (theta, x1, x2); its
    finite-difference differential must send the first frame field to minus
    the steering field and the 1/r-scaled second field to minus the drive
    field.
    """
    q = np.array([c.theta, c.r, c.x1, c.x2])

    def P(v: np.ndarray) -> np.ndarray:
        return np.array([v[0], v[2], v[3]])

    J = np.empty((3, 4))
    for j in range(4):
        h = fd_step * max(1.0, abs(q[j]))
        dq = np.zeros(4)
        dq[j] = h
        J[:, j] = (P(q + dq) - P(q - dq)) / (2 * h)
    f1 = np.array([-1.0, 0.0, 0.0, 0.0])
    f2_scaled = np.array([0.0, 1.0, -math.cos(c.theta), -math.sin(c.theta)])
    drive = np.array([0.0, math.cos(c.theta), math.sin(c.theta)])
    steer = np.array([1.0, 0.0, 0.0])
    res1 = np.max(np.abs(J @ f1 - (-steer)))
    res2 = np.max(np.abs(J @ f2_scaled - (-drive)))
    return float(max(res1, res2))
