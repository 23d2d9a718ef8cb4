"""Frame fields on the space of radius points, their flows and Lie brackets.

States live in flattened coordinates z = (x, R, V).  The distinguished
fields are: the circling field (index 1), which moves the base point along
V while rotating (R, V) covariantly; the fiber dilation (index 2); and, for
dim >= 3, fiber rotations (index j >= 3) along a complement basis of
{R, V}^perp.  Iterated brackets of these fields are evaluated numerically
and compared against analytic targets throughout the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateFrame,
    DomainError,
    IllConditionedBasis,
    LeftChart,
    NonFinite,
)
from .geometry import (
    DEFAULT_RK_STEP,
    MetricModel,
    TangentPoint,
    christoffel,
    geodesic_trajectory,
    riemann,
)
from .lifts import RadiusPoint

# step (relative to state magnitude) for a single second-order bracket
BRACKET_STEP = 1e-5
# displacement scales per nesting level for fourth-order point evaluations
NESTED_STEPS_O4 = (1e-3, 1e-3, 2e-3, 4e-3)
# displacement scales per nesting level for second-order flowed fields
NESTED_STEPS_O2 = (1e-5, 2e-4, 3e-3, 1e-2)

OMEGA_TOL = 1e-12
CHART_HYSTERESIS = 0.5
BASIS_COND_LIMIT = 1e8


@dataclass(frozen=True)
class FrameVector:
    """Components (dx, dR, dV) of an ambient tangent vector at a state."""

    dx: np.ndarray
    dR: np.ndarray
    dV: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.dx, self.dR, self.dV])

    @staticmethod
    def from_array(arr: np.ndarray) -> "FrameVector":
        n = len(arr) // 3
        return FrameVector(arr[:n].copy(), arr[n:2 * n].copy(), arr[2 * n:].copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class ComplementBasis:
    """Orthogonal norm-|R| basis of {R, V}^perp plus the chart pair used."""

    vectors: np.ndarray  # shape (n - 2, n)
    chart_choice: tuple[int, int]


def pack_state(q: RadiusPoint) -> np.ndarray:
    return np.concatenate([q.x, q.R, q.V])


def unpack_state(model: MetricModel, z: np.ndarray) -> RadiusPoint:
    n = model.dim
    return RadiusPoint(x=z[:n].copy(), V=z[2 * n:].copy(), R=z[n:2 * n].copy())


# ---------------------------------------------------------------------------
# complement basis
# ---------------------------------------------------------------------------

def _orthonormal_chart_frame(model: MetricModel, x: np.ndarray) -> np.ndarray:
    """Rows: a g-orthonormal frame obtained from the coordinate basis."""
    n = model.dim
    g = model.metric(x)
    frame = np.eye(n)
    for i in range(n):
        v = frame[i]
        for j in range(i):
            v = v - (frame[j] @ g @ v) * frame[j]
        nv = math.sqrt(max(v @ g @ v, 0.0))
        if nv < 1e-14:
            raise DegenerateFrame("chart frame collapsed (singular metric?)")
        frame[i] = v / nv
    return frame


def _select_chart(coordsR: np.ndarray, coordsV: np.ndarray,
                  prev: Optional[tuple[int, int]]) -> tuple[int, int]:
    n = len(coordsR)
    omega = np.outer(coordsR, coordsV) - np.outer(coordsV, coordsR)
    tri = np.abs(np.triu(omega, 1))
    best = np.unravel_index(np.argmax(tri), tri.shape)
    best_val = tri[best]
    if best_val < OMEGA_TOL:
        raise DegenerateFrame("R and V are collinear in every chart pair")
    if prev is not None and prev[0] < n and prev[1] < n:
        if tri[prev] >= CHART_HYSTERESIS * best_val:
            return prev
    return (int(best[0]), int(best[1]))


def complement_basis(model: MetricModel, q: RadiusPoint,
                     prev_chart: Optional[tuple[int, int]] = None) -> ComplementBasis:
    """Gram-Schmidt complement of {R, V} rescaled to norm |R|.

    The chart pair (i, j) marks the two frame directions dropped before
    orthogonalization; it maximizes the area form of (R, V) unless a
    previous pair is still within the hysteresis factor of the maximum.
    """
    if model.dim < 3:
        return ComplementBasis(vectors=np.zeros((0, model.dim)), chart_choice=(0, 1))
    vecs, chart = _complement_vectors(model, q.x, q.R, q.V, prev_chart)
    return ComplementBasis(vectors=vecs, chart_choice=chart)


def _complement_vectors(model: MetricModel, x: np.ndarray, R: np.ndarray,
                        V: np.ndarray, prev_chart=None,
                        chart: Optional[tuple[int, int]] = None):
    n = model.dim
    g = model.metric(x)
    E = _orthonormal_chart_frame(model, x)
    if chart is None:
        coordsR = E @ g @ R
        coordsV = E @ g @ V
        chart = _select_chart(coordsR, coordsV, prev_chart)
    i, j = chart
    nR = math.sqrt(max(R @ g @ R, 0.0))
    # sequential Gram-Schmidt over [R, V, remaining frame vectors]
    basis = []
    for u in (R, V):
        w = u.astype(float)
        for b in basis:
            w = w - (b @ g @ w) * b
        nw = math.sqrt(max(w @ g @ w, 0.0))
        if nw < 1e-14:
            raise DegenerateFrame("R and V do not span a 2-plane")
        basis.append(w / nw)
    out = []
    for k in range(n):
        if k == i or k == j:
            continue
        w = E[k].copy()
        for b in basis:
            w = w - (b @ g @ w) * b
        nw = math.sqrt(max(w @ g @ w, 0.0))
        if nw < 1e-10:
            raise DegenerateFrame(f"chart direction {k} degenerate after projection")
        w = w / nw
        basis.append(w)
        out.append(nR * w)
    return np.array(out), chart


# ---------------------------------------------------------------------------
# frame fields
# ---------------------------------------------------------------------------

def _christoffel_provider(model: MetricModel) -> Callable[[np.ndarray], np.ndarray]:
    if model.christoffel_fn is not None:
        fn = model.christoffel_fn

        def provider(x: np.ndarray) -> np.ndarray:
            gam = np.asarray(fn(x), dtype=float)
            return 0.5 * (gam + np.swapaxes(gam, 1, 2))

        return provider
    return lambda x: christoffel(model, x)


def frame_field(model: MetricModel, index: int,
                chart: Optional[tuple[int, int]] = None) -> Callable[[np.ndarray], np.ndarray]:
    """The i-th frame field as a callable on flattened states z = (x, R, V).

    For index >= 3 the complement direction is recomputed at each state;
    passing ``chart`` freezes the chart pair (used inside brackets and
    flows so that displaced evaluations stay on one smooth branch).
    """
    n = model.dim
    if not 1 <= index <= n:
        raise ValueError(f"frame index {index} out of range 1..{n}")
    gamma = _christoffel_provider(model)

    if index == 1:
        def f1(z: np.ndarray) -> np.ndarray:
            x, R, V = z[:n], z[n:2 * n], z[2 * n:]
            gam = gamma(x)
            A = gam @ R  # A[m, a] = Gamma^m_{a b} R^b
            B = gam @ V
            out = np.empty(3 * n)
            out[:n] = V
            out[n:2 * n] = -V - A @ V
            out[2 * n:] = R - B @ V
            return out

        return f1

    if index == 2:
        def f2(z: np.ndarray) -> np.ndarray:
            out = np.empty(3 * n)
            out[:n] = 0.0
            out[n:] = z[n:]
            return out

        return f2

    def fj(z: np.ndarray) -> np.ndarray:
        x, R, V = z[:n], z[n:2 * n], z[2 * n:]
        vecs, _ = _complement_vectors(model, x, R, V, chart=chart)
        out = np.zeros(3 * n)
        out[n:2 * n] = vecs[index - 3]
        return out

    return fj


def frame_eval(model: MetricModel, q: RadiusPoint, index: int) -> FrameVector:
    """Evaluate the i-th frame field at a state."""
    z = pack_state(q)
    return FrameVector.from_array(frame_field(model, index)(z))


# ---------------------------------------------------------------------------
# numerical Lie brackets
# ---------------------------------------------------------------------------

def _directional(F: Callable, z: np.ndarray, w: np.ndarray, disp: float,
                 order: int) -> np.ndarray:
    """Derivative of F at z along w by central differences of total
    displacement ``disp`` in the sup norm."""
    wmax = float(np.max(np.abs(w)))
    if wmax < 1e-300:
        return np.zeros_like(z)
    eps = disp / wmax
    if order == 4:
        return (-F(z + 2 * eps * w) + 8 * F(z + eps * w)
                - 8 * F(z - eps * w) + F(z - 2 * eps * w)) / (12 * eps)
    return (F(z + eps * w) - F(z - eps * w)) / (2 * eps)


def numeric_bracket(F: Callable, G: Callable, z: np.ndarray,
                    step: float = BRACKET_STEP, order: int = 2) -> np.ndarray:
    """[F, G](z) = DG(z) F(z) - DF(z) G(z) by finite differences."""
    scale = max(1.0, float(np.max(np.abs(z))))
    disp = step * scale
    w = F(z)
    v = G(z)
    return _directional(G, z, w, disp, order) - _directional(F, z, v, disp, order)


def bracket_field(F: Callable, G: Callable, step: float, order: int) -> Callable:
    def field(z: np.ndarray) -> np.ndarray:
        return numeric_bracket(F, G, z, step=step, order=order)

    return field


def parse_field_indices(spec) -> list[int]:
    """Turn a field spec like "f121" (or 1, or [1, 2, 1]) into indices."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(i) for i in spec]
    s = str(spec).strip().lower()
    if s.startswith("f"):
        s = s[1:]
    if not s.isdigit() or not s:
        raise ValueError(f"bad field spec {spec!r}")
    return [int(c) for c in s]


def composite_field(model: MetricModel, spec, order: int = 4,
                    chart: Optional[tuple[int, int]] = None,
                    steps: Optional[Sequence[float]] = None) -> Callable:
    """Nested-bracket field f_{i1 i2 ... ik} = [f_i1, [f_i2, [...]]].

    Deeper bracket levels use progressively larger displacement steps: a
    level-L bracket differentiates a field whose own evaluation noise grows
    with L, so the optimal step grows too.  Defaults are tuned for the
    fourth-order point-evaluation stencils (``order=4``) and the cheaper
    second-order stencils used inside flows (``order=2``).
    """
    indices = parse_field_indices(spec)
    if steps is None:
        steps = NESTED_STEPS_O4 if order == 4 else NESTED_STEPS_O2

    def build(idx: list[int]) -> tuple[Callable, int]:
        if len(idx) == 1:
            return frame_field(model, idx[0], chart=chart), 0
        inner, depth = build(idx[1:])
        level = depth + 1
        step = steps[min(level, len(steps)) - 1]
        outer = frame_field(model, idx[0], chart=chart)
        return bracket_field(outer, inner, step=step, order=order), level

    field, _ = build(indices)
    return field


def lie_bracket(model: MetricModel, F, G, q: RadiusPoint,
                step: float = BRACKET_STEP, order: int = 2) -> FrameVector:
    """Numerical Lie bracket of two fields at a state.

    F and G may be callables on flattened states or frame specs ("f1", 2).
    """
    if not callable(F):
        F = composite_field(model, F, order=order)
    if not callable(G):
        G = composite_field(model, G, order=order)
    z = pack_state(q)
    return FrameVector.from_array(numeric_bracket(F, G, z, step=step, order=order))


# ---------------------------------------------------------------------------
# flows
# ---------------------------------------------------------------------------

@dataclass
class FlowDiagnostics:
    """Worst constraint drift seen before projection and the largest
    projection adjustment applied."""

    max_pre_projection_drift: float = 0.0
    max_projection_distance: float = 0.0


def _project_constraints(model: MetricModel, z: np.ndarray) -> tuple[np.ndarray, float]:
    n = model.dim
    x, R, V = z[:n], z[n:2 * n], z[2 * n:]
    g = model.metric(x)
    ip = float(R @ g @ V)
    nR2 = float(R @ g @ R)
    nV2 = float(V @ g @ V)
    R1 = R - (ip / (2 * nV2)) * V
    V1 = V - (ip / (2 * nR2)) * R
    nR1 = math.sqrt(max(R1 @ g @ R1, 0.0))
    nV1 = math.sqrt(max(V1 @ g @ V1, 0.0))
    s = math.sqrt(nR1 * nV1)
    R2 = R1 * (s / nR1)
    V2 = V1 * (s / nV1)
    dist = max(float(np.max(np.abs(R2 - R))), float(np.max(np.abs(V2 - V))))
    out = z.copy()
    out[n:2 * n] = R2
    out[2 * n:] = V2
    return out, dist


def _constraint_drift(model: MetricModel, z: np.ndarray) -> float:
    n = model.dim
    x, R, V = z[:n], z[n:2 * n], z[2 * n:]
    g = model.metric(x)
    ip = abs(float(R @ g @ V))
    dn = abs(math.sqrt(max(R @ g @ R, 0.0)) - math.sqrt(max(V @ g @ V, 0.0)))
    return max(ip, dn)


def flow_trajectory(model: MetricModel, field, q0: RadiusPoint, t: float,
                    step: float = DEFAULT_RK_STEP, project: bool = True,
                    order: int = 2):
    """Integrate a frame (or composite, or callable) field from a state.

    Returns (times, states, diagnostics).  After every RK4 step the chart
    domain is checked; when ``project`` is set, (R, V) are pulled back onto
    the constraint set and the adjustment size is recorded.  Frame fields
    with index >= 3 re-select their chart pair once per step with
    hysteresis.
    """
    n = model.dim
    z = pack_state(q0)
    charted_index = None
    static_field: Optional[Callable] = None
    if callable(field):
        static_field = field
    else:
        indices = parse_field_indices(field)
        if len(indices) == 1 and indices[0] >= 3:
            charted_index = indices[0]
        elif len(indices) == 1:
            static_field = frame_field(model, indices[0])
        else:
            chart = None
            if model.dim >= 3 and any(i >= 3 for i in indices):
                chart = complement_basis(model, q0).chart_choice
            static_field = composite_field(model, indices, order=order, chart=chart)

    n_steps = max(1, int(math.ceil(abs(t) / step - 1e-12))) if t != 0 else 0
    h = t / n_steps if n_steps else 0.0
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 3 * n))
    times[0] = 0.0
    states[0] = z
    diag = FlowDiagnostics()
    chart = None
    for i in range(n_steps):
        if charted_index is not None:
            q = unpack_state(model, z)
            basis = complement_basis(model, q, prev_chart=chart)
            chart = basis.chart_choice
            rhs = frame_field(model, charted_index, chart=chart)
        else:
            rhs = static_field
        try:
            k1 = rhs(z)
            k2 = rhs(z + 0.5 * h * k1)
            k3 = rhs(z + 0.5 * h * k2)
            k4 = rhs(z + h * k3)
        except DomainError as exc:
            raise LeftChart(str(exc)) from exc
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)):
            raise NonFinite("state became non-finite during frame flow")
        if not model.domain_check(z[:n]):
            raise LeftChart(f"frame flow left the chart of '{model.name}'")
        diag.max_pre_projection_drift = max(diag.max_pre_projection_drift,
                                            _constraint_drift(model, z))
        if project:
            z, dist = _project_constraints(model, z)
            diag.max_projection_distance = max(diag.max_projection_distance, dist)
        times[i + 1] = (i + 1) * h
        states[i + 1] = z
    return times, states, diag


def flow(model: MetricModel, field, q0: RadiusPoint, t: float,
         step: float = DEFAULT_RK_STEP, project: bool = True) -> RadiusPoint:
    """Endpoint of the flow of a frame field after time t."""
    _, states, _ = flow_trajectory(model, field, q0, t, step, project=project)
    return unpack_state(model, states[-1])


# ---------------------------------------------------------------------------
# bracket-structure diagnostics
# ---------------------------------------------------------------------------

def _bracket_columns(model: MetricModel, q: RadiusPoint):
    """Columns f_i, f_{1k}, f_{1k1} evaluated at q, grouped by layer."""
    n = model.dim
    z = pack_state(q)
    chart = complement_basis(model, q).chart_choice if n >= 3 else None
    layer1 = [frame_field(model, i, chart=chart)(z) for i in range(1, n + 1)]
    layer2 = []
    layer3 = []
    for k in range(2, n + 1):
        f1k = composite_field(model, [1, k], chart=chart)
        layer2.append(f1k(z))
        f1k1 = composite_field(model, [1, k, 1], chart=chart)
        layer3.append(f1k1(z))
    return layer1, layer2, layer3


def _rank(columns: Sequence[np.ndarray], rank_tol: float) -> int:
    A = np.column_stack(columns)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rank_tol * sv[0]))


def growth_vector(model: MetricModel, q: RadiusPoint,
                  rank_tol: float = 1e-8) -> tuple[int, int, int]:
    """Numerical ranks of the three bracket layers at a state."""
    layer1, layer2, layer3 = _bracket_columns(model, q)
    r1 = _rank(layer1, rank_tol)
    r2 = _rank(layer1 + layer2, rank_tol)
    r3 = _rank(layer1 + layer2 + layer3, rank_tol)
    return (r1, r2, r3)


def geodesic_factorization_residual(model: MetricModel, q: RadiusPoint, t: float,
                                    step: float = DEFAULT_RK_STEP) -> float:
    """How far flows of the first two iterated brackets are from geodesics.

    The base-point projection of the [f2, f1] flow must follow the geodesic
    shot along V, and that of the [f1, [f2, f1]] flow the geodesic along R.
    Both sides are integrated with the same fixed RK4 step and compared on
    the shared time grid.
    """
    n = model.dim
    worst = 0.0
    for spec, vec in (("21", q.V), ("121", q.R)):
        times, states, _ = flow_trajectory(model, spec, q, t, step, project=False)
        _, xs, _ = geodesic_trajectory(model, TangentPoint(q.x, vec), t, step)
        m = min(len(xs), len(states))
        diff = np.linalg.norm(states[:m, :n] - xs[:m], axis=1)
        worst = max(worst, float(np.max(diff)))
    return worst


def riemann_bracket_residual(model: MetricModel, q: RadiusPoint) -> float:
    """Dual-path check of the depth-four bracket against the curvature tensor.

    The nested numerical bracket [f1,[f1,[f2,f1]]] is compared with the
    analytic expression whose covariant form moves the base point along -V
    and rotates (R, V) by the curvature operator of (V, R); the covariant
    parts are expanded into coordinate components before comparing.
    """
    n = model.dim
    z = pack_state(q)
    chart = complement_basis(model, q).chart_choice if n >= 3 else None
    numeric = composite_field(model, [1, 1, 2, 1], chart=chart)(z)
    x, R, V = q.x, q.R, q.V
    gam = christoffel(model, x)
    rm_R = riemann(model, x, V, R, R)
    rm_V = riemann(model, x, V, R, V)
    analytic = np.concatenate([
        -V,
        (gam @ R) @ V - rm_R,
        (gam @ V) @ V - rm_V,
    ])
    return float(np.max(np.abs(numeric - analytic)))


def sectional_coefficient(model: MetricModel, q: RadiusPoint) -> float:
    """Coefficient of the first frame field in the depth-four bracket.

    Expands [f1,[f1,[f2,f1]]] in the basis {f_i, f_{1k}, f_{1k1}} by least
    squares on column-normalized vectors; the leading coefficient recovers
    |R|^2 times the sectional curvature of the (R, V) plane.
    """
    layer1, layer2, layer3 = _bracket_columns(model, q)
    cols = layer1 + layer2 + layer3
    z = pack_state(q)
    chart = complement_basis(model, q).chart_choice if model.dim >= 3 else None
    target = composite_field(model, [1, 1, 2, 1], chart=chart)(z)
    B = np.column_stack(cols)
    norms = np.linalg.norm(B, axis=0)
    if np.any(norms == 0.0):
        raise IllConditionedBasis("zero column in bracket basis")
    Bn = B / norms
    sv = np.linalg.svd(Bn, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] / sv[-1] > BASIS_COND_LIMIT:
        raise IllConditionedBasis(
            f"bracket basis condition number {sv[0] / max(sv[-1], 1e-300):.2e}")
    coef, *_ = np.linalg.lstsq(Bn, target, rcond=None)
    return float(coef[0] / norms[0])


# ---------------------------------------------------------------------------
# surface specialization and homothety generators
# ---------------------------------------------------------------------------

def perp_vector(model: MetricModel, x: np.ndarray, R: np.ndarray) -> np.ndarray:
    """The positively oriented g-orthogonal vector of the same g-norm as R."""
    if model.dim != 2:
        raise ValueError("perp_vector requires a 2-dimensional model")
    g = model.metric(x)
    w = np.array([-R[1], R[0]])
    w = w - (float(R @ g @ w) / float(R @ g @ R)) * R
    nw = math.sqrt(max(w @ g @ w, 0.0))
    if nw < 1e-14:
        raise DegenerateFrame("cannot build a perpendicular to a null vector")
    w = w * (math.sqrt(max(R @ g @ R, 0.0)) / nw)
    if R[0] * w[1] - R[1] * w[0] < 0:
        w = -w
    return w


def surface_circling_field(model: MetricModel) -> Callable[[np.ndarray], np.ndarray]:
    """The constant-curvature motion field on (x, R) states of a surface.

    Its integral curves trace curves of constant geodesic curvature while
    R stays their curvature radius: dx = R_perp, covariant dR = -R_perp.
    """
    if model.dim != 2:
        raise ValueError("surface field requires dim 2")
    gamma = _christoffel_provider(model)

    def field(z: np.ndarray) -> np.ndarray:
        x, R = z[:2], z[2:]
        rp = perp_vector(model, x, R)
        gam = gamma(x)
        return np.concatenate([rp, -rp - (gam @ R) @ rp])

    return field


def complete_lift(X: Callable[[np.ndarray], np.ndarray],
                  jac: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                  fd_step: float = 1e-6) -> Callable[[np.ndarray], np.ndarray]:
    """Lift a base vector field to (x, R) states: (X(x), DX(x) R).

    The Jacobian is computed by central differences unless supplied.
    """

    def field(z: np.ndarray) -> np.ndarray:
        n = len(z) // 2
        x, R = z[:n], z[n:]
        if jac is not None:
            J = np.asarray(jac(x), dtype=float)
        else:
            J = np.empty((n, n))
            for c in range(n):
                h = fd_step * max(1.0, abs(x[c]))
                xp = x.copy()
                xm = x.copy()
                xp[c] += h
                xm[c] -= h
                J[:, c] = (np.asarray(X(xp), dtype=float)
                           - np.asarray(X(xm), dtype=float)) / (2 * h)
        return np.concatenate([np.asarray(X(x), dtype=float), J @ R])

    return field


def homothety_generator_residual(model: MetricModel,
                                 X: Callable[[np.ndarray], np.ndarray],
                                 x: np.ndarray, R: np.ndarray,
                                 step: float = BRACKET_STEP) -> float:
    """Norm of the bracket of a complete lift with the circling field.

    Vanishes exactly when X generates a one-parameter homothety group of
    the surface; stays bounded away from zero otherwise.
    """
    z = np.concatenate([np.asarray(x, dtype=float), np.asarray(R, dtype=float)])
    lifted = complete_lift(X)
    f1 = surface_circling_field(model)
    return float(np.linalg.norm(numeric_bracket(lifted, f1, z, step=step, order=4)))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def random_radius_point(model: MetricModel, rng: np.random.Generator,
                        rmin: float = 0.7, rmax: float = 2.0) -> RadiusPoint:
    """Draw a random valid state: random chart point, |R| = |V| in [rmin, rmax]."""
    n = model.dim
    x = model.sample_point(rng)
    g = model.metric(x)
    r = float(rng.uniform(rmin, rmax))
    for _ in range(100):
        R = rng.standard_normal(n)
        V = rng.standard_normal(n)
        nR = math.sqrt(max(R @ g @ R, 0.0))
        if nR < 1e-8:
            continue
        R = R * (r / nR)
        V = V - (float(R @ g @ V) / float(R @ g @ R)) * R
        nV = math.sqrt(max(V @ g @ V, 0.0))
        if nV < 1e-8:
            continue
        V = V * (r / nV)
        return RadiusPoint(x=x, V=V, R=R)
    raise DegenerateFrame("failed to sample a valid radius point")
