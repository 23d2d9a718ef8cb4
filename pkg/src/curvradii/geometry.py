"""Chart-based Riemannian models: metric, connection, curvature, geodesics.

A model is a single chart with a metric matrix function.  Christoffel
symbols come from an analytic callback when the model ships one, otherwise
from central finite differences of the metric.  Everything downstream
(covariant derivatives, curvature tensors, the exponential map) is built
from these two ingredients.  There is no atlas: leaving the chart during an
integration is a hard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegeneratePlane,
    DomainError,
    InsufficientSamples,
    LeftChart,
    NoConvergence,
    SingularMetric,
)

DEFAULT_FD_STEP = 1e-5
DEFAULT_RK_STEP = 1e-3

# condition-number ceiling before a metric matrix counts as singular
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class MetricModel:
    """A Riemannian metric on a single chart of dimension ``dim``.

    ``metric_fn`` maps a chart point to the symmetric matrix g.  When
    ``christoffel_fn`` is None, Christoffel symbols are produced by central
    finite differences of ``metric_fn`` with per-coordinate step
    ``fd_step * max(1, |x_i|)``.  ``domain_check`` guards every evaluation.
    ``sample_lo``/``sample_hi`` bound a box used when drawing random chart
    points for property checks.
    """

    dim: int
    metric_fn: Callable[[np.ndarray], np.ndarray]
    christoffel_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: float = DEFAULT_FD_STEP
    domain_check: Callable[[np.ndarray], bool] = field(default=lambda x: True)
    name: str = "custom"
    sample_lo: Optional[np.ndarray] = None
    sample_hi: Optional[np.ndarray] = None
    is_flat: bool = False

    def require_in_domain(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"point has shape {x.shape}, expected ({self.dim},)")
        if not (np.all(np.isfinite(x)) and self.domain_check(x)):
            raise DomainError(f"point {x} outside chart of model '{self.name}'")
        return x

    def metric(self, x: np.ndarray) -> np.ndarray:
        x = self.require_in_domain(x)
        g = np.asarray(self.metric_fn(x), dtype=float)
        return 0.5 * (g + g.T)

    def inverse_metric(self, x: np.ndarray) -> np.ndarray:
        g = self.metric(x)
        if not np.all(np.isfinite(g)) or np.linalg.cond(g) > _COND_LIMIT:
            raise SingularMetric(f"metric at {x} is singular to working precision")
        return np.linalg.inv(g)

    def inner(self, x: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
        return float(np.asarray(X) @ self.metric(x) @ np.asarray(Y))

    def norm(self, x: np.ndarray, X: np.ndarray) -> float:
        return math.sqrt(max(self.inner(x, X, X), 0.0))

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a random chart point from the model's sample box."""
        lo = self.sample_lo if self.sample_lo is not None else -np.ones(self.dim)
        hi = self.sample_hi if self.sample_hi is not None else np.ones(self.dim)
        for _ in range(200):
            x = rng.uniform(lo, hi)
            if self.domain_check(x):
                return x
        raise DomainError(f"could not sample a chart point for '{self.name}'")


@dataclass(frozen=True)
class TangentPoint:
    """A chart point with a tangent vector attached."""

    x: np.ndarray
    v: np.ndarray


@dataclass
class SampledCurve:
    """A curve given by samples at strictly increasing times.

    ``derivative_order`` is the interior stencil order for the first and
    second time derivatives (4 means five-point central stencils; endpoints
    always fall back to one-sided second-order stencils).
    """

    times: np.ndarray
    points: np.ndarray
    derivative_order: int = 4

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or len(self.times) != len(self.points):
            raise ValueError("points must be a (K, n) array matching times")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    def validate_domain(self, model: MetricModel) -> None:
        for p in self.points:
            model.require_in_domain(p)

    def derivatives(self) -> tuple[np.ndarray, np.ndarray]:
        return curve_derivatives(self.times, self.points)


# ---------------------------------------------------------------------------
# finite-difference stencils along sampled curves
# ---------------------------------------------------------------------------

def curve_derivatives(times: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second time derivatives of sampled values.

    Interior nodes use five-point fourth-order central stencils on uniform
    grids; the first/last two nodes use second-order one-sided/short
    stencils.  Non-uniform grids fall back to local polynomial fits of the
    same orders.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        d1, d2 = curve_derivatives(times, values[:, None])
        return d1[:, 0], d2[:, 0]
    K = len(times)
    if K < 3:
        raise InsufficientSamples("need at least 3 samples for derivative stencils")

    dt = np.diff(times)
    h = dt[0]
    if np.max(np.abs(dt - h)) <= 1e-9 * max(h, 1.0):
        return _uniform_derivatives(values, h)
    return _polyfit_derivatives(times, values)


def _stencil_weights(offsets: tuple[int, ...], m: int) -> np.ndarray:
    """Weights of the m-th derivative stencil on integer node offsets
    (exact on polynomials up to the window degree; divide by h^m)."""
    key = (offsets, m)
    cached = _STENCIL_CACHE.get(key)
    if cached is not None:
        return cached
    pts = np.asarray(offsets, dtype=float)
    V = np.vander(pts, increasing=True).T
    rhs = np.zeros(len(pts))
    rhs[m] = math.factorial(m)
    w = np.linalg.solve(V, rhs)
    _STENCIL_CACHE[key] = w
    return w


_STENCIL_CACHE: dict = {}


def _uniform_derivatives(f: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    K = len(f)
    d1 = np.empty_like(f)
    d2 = np.empty_like(f)
    if K >= 5:
        d1[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
        d2[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
        boundary = (0, 1, K - 2, K - 1)
    else:
        boundary = tuple(range(K))
    # boundary nodes: one-sided windows of up to 6 points (fourth order on
    # long grids; a normal vector of size kappa feeding a radius of size
    # 1/kappa squares the stencil error, so low-order ends are not enough)
    width = min(K, 6)
    for k in boundary:
        lo = min(max(0, k - width // 2), K - width)
        offsets = tuple(range(lo - k, lo - k + width))
        d1[k] = (_stencil_weights(offsets, 1) @ f[lo:lo + width]) / h
        d2[k] = (_stencil_weights(offsets, 2) @ f[lo:lo + width]) / (h * h)
    return d1, d2


def _polyfit_derivatives(times: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    K = len(times)
    d1 = np.empty_like(f)
    d2 = np.empty_like(f)
    for k in range(K):
        if 2 <= k <= K - 3:
            lo, hi = k - 2, k + 3
        else:  # boundary: widen the window like the uniform-grid stencils
            lo = min(max(0, k - 2), max(0, K - 6))
            hi = min(K, lo + 6)
        deg = min(5 if (k < 2 or k > K - 3) else 4, hi - lo - 1)
        t = times[lo:hi] - times[k]
        coeffs = np.polynomial.polynomial.polyfit(t, f[lo:hi], deg)
        d1[k] = coeffs[1]
        d2[k] = 2 * coeffs[2] if deg >= 2 else 0.0
    return d1, d2


# ---------------------------------------------------------------------------
# connection and curvature
# ---------------------------------------------------------------------------

def christoffel(model: MetricModel, x: np.ndarray) -> np.ndarray:
    """Christoffel symbols Gamma[mu, alpha, beta] at a chart point.

    Uses the model's analytic symbols when present, otherwise the
    Levi-Civita formula with central finite differences of the metric.
    The result is symmetrized in the lower index pair.
    """
    x = model.require_in_domain(x)
    if model.christoffel_fn is not None:
        gam = np.asarray(model.christoffel_fn(x), dtype=float)
    else:
        gam = _fd_christoffel(model, x)
    return 0.5 * (gam + np.swapaxes(gam, 1, 2))


def _fd_christoffel(model: MetricModel, x: np.ndarray) -> np.ndarray:
    n = model.dim
    ginv = model.inverse_metric(x)
    dg = np.empty((n, n, n))  # dg[c, a, b] = d g_ab / d x_c
    for c in range(n):
        h = model.fd_step * max(1.0, abs(x[c]))
        xp = x.copy()
        xm = x.copy()
        xp[c] += h
        xm[c] -= h
        if not (model.domain_check(xp) and model.domain_check(xm)):
            raise DomainError(f"finite-difference stencil at {x} leaves the chart")
        gp = np.asarray(model.metric_fn(xp), dtype=float)
        gm = np.asarray(model.metric_fn(xm), dtype=float)
        dg[c] = (gp - gm) / (2 * h)
    # Gamma^m_ab = 1/2 g^mn (d_a g_nb + d_b g_na - d_n g_ab)
    bracket = np.einsum("anb->nab", dg) + np.einsum("bna->nab", dg) - dg
    return 0.5 * np.einsum("mn,nab->mab", ginv, bracket)


def christoffel_contract(model: MetricModel, x: np.ndarray, X, Y) -> np.ndarray:
    """The vector with components Gamma^mu_{ab} X^a Y^b (bilinear, symmetric)."""
    gam = christoffel(model, x)
    return (gam @ np.asarray(Y, dtype=float)) @ np.asarray(X, dtype=float)


def covariant_derivative(model: MetricModel, curve: SampledCurve, W: np.ndarray) -> np.ndarray:
    """Covariant derivative of a vector field sampled along a curve.

    Returns dW/dt + Gamma(velocity, W) at every sample; interior nodes
    use central stencils, endpoints one-sided ones.
    """
    W = np.asarray(W, dtype=float)
    if W.shape != curve.points.shape:
        raise ValueError("field must supply one vector per curve sample")
    if len(curve) < 3:
        raise InsufficientSamples("need at least 3 samples")
    xdot, _ = curve.derivatives()
    Wdot, _ = curve_derivatives(curve.times, W)
    out = np.empty_like(W)
    for k in range(len(curve)):
        out[k] = Wdot[k] + christoffel_contract(model, curve.points[k], xdot[k], W[k])
    return out


def riemann(model: MetricModel, x: np.ndarray, X, Y, Z) -> np.ndarray:
    """The curvature operator applied to three vectors at a chart point.

    Coordinate formula with finite-difference derivatives of the
    Christoffel symbols; antisymmetric in (X, Y).  Sign convention makes
    the unit sphere's sectional curvature +1.
    """
    x = model.require_in_domain(x)
    n = model.dim
    gam = christoffel(model, x)
    dgam = np.empty((n, n, n, n))  # dgam[c, m, a, b] = d Gamma^m_ab / d x_c
    for c in range(n):
        h = model.fd_step * max(1.0, abs(x[c]))
        xp = x.copy()
        xm = x.copy()
        xp[c] += h
        xm[c] -= h
        dgam[c] = (christoffel(model, xp) - christoffel(model, xm)) / (2 * h)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    # R(X,Y)Z^r = (d_m Gamma^r_ns - d_n Gamma^r_ms) X^m Y^n Z^s + quadratic terms
    term1 = np.einsum("mrns,m,n,s->r", dgam, X, Y, Z)
    term2 = np.einsum("nrms,m,n,s->r", dgam, X, Y, Z)
    term3 = np.einsum("rml,lns,m,n,s->r", gam, gam, X, Y, Z)
    term4 = np.einsum("rnl,lms,m,n,s->r", gam, gam, X, Y, Z)
    return term1 - term2 + term3 - term4


def sectional_curvature(model: MetricModel, x: np.ndarray, X, Y) -> float:
    """Sectional curvature of the plane spanned by X and Y."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    num = model.inner(x, riemann(model, x, X, Y, Y), X)
    den = model.inner(x, X, X) * model.inner(x, Y, Y) - model.inner(x, X, Y) ** 2
    scale = max(model.inner(x, X, X), model.inner(x, Y, Y), 1e-30)
    if den <= 1e-12 * scale * scale:
        raise DegeneratePlane("vectors do not span a 2-plane")
    return num / den


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------

def rk4_fixed(rhs: Callable[[np.ndarray], np.ndarray], y0: np.ndarray, t: float,
              step: float, record: bool = False,
              guard: Optional[Callable[[np.ndarray], None]] = None):
    """Fixed-step RK4 over duration ``t`` (may be negative).

    ``guard`` is called on the state after every step and may raise.  When
    ``record`` is true, returns (times, states) including the initial state.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    n_steps = max(1, int(math.ceil(abs(t) / step - 1e-12))) if t != 0 else 0
    h = t / n_steps if n_steps else 0.0
    y = np.array(y0, dtype=float)
    if record:
        times = np.empty(n_steps + 1)
        states = np.empty((n_steps + 1, len(y)))
        times[0] = 0.0
        states[0] = y
    for i in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if guard is not None:
            guard(y)
        if record:
            times[i + 1] = (i + 1) * h
            states[i + 1] = y
    if record:
        return times, states
    return y


def _geodesic_rhs(model: MetricModel):
    n = model.dim

    def rhs(y: np.ndarray) -> np.ndarray:
        x, v = y[:n], y[n:]
        acc = -christoffel_contract(model, x, v, v)
        return np.concatenate([v, acc])

    return rhs


def _chart_guard(model: MetricModel):
    n = model.dim

    def guard(y: np.ndarray) -> None:
        x = y[:n]
        if not (np.all(np.isfinite(x)) and model.domain_check(x)):
            raise LeftChart(f"geodesic left the chart of '{model.name}' at {x}")

    return guard


def exp_map(model: MetricModel, p: TangentPoint, t: float,
            step: float = DEFAULT_RK_STEP) -> np.ndarray:
    """Endpoint of the geodesic from p.x with initial velocity p.v after time t."""
    x = model.require_in_domain(p.x)
    y0 = np.concatenate([x, np.asarray(p.v, dtype=float)])
    if t == 0:
        return x.copy()
    try:
        y = rk4_fixed(_geodesic_rhs(model), y0, t, step, guard=_chart_guard(model))
    except DomainError as exc:  # a stage evaluation already left the chart
        raise LeftChart(str(exc)) from exc
    return y[: model.dim]


def geodesic_trajectory(model: MetricModel, p: TangentPoint, t: float,
                        step: float = DEFAULT_RK_STEP) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Times, positions and velocities along the geodesic through p."""
    x = model.require_in_domain(p.x)
    y0 = np.concatenate([x, np.asarray(p.v, dtype=float)])
    try:
        times, states = rk4_fixed(_geodesic_rhs(model), y0, t, step, record=True,
                                  guard=_chart_guard(model))
    except DomainError as exc:
        raise LeftChart(str(exc)) from exc
    return times, states[:, : model.dim], states[:, model.dim:]


def geodesic_between(model: MetricModel, x0: np.ndarray, x1: np.ndarray,
                     step: float = DEFAULT_RK_STEP, tol: float = 1e-10,
                     max_iter: int = 50) -> tuple[np.ndarray, float]:
    """Initial velocity v with exp(x0, v) = x1 at time 1, and the distance.

    Newton shooting on the time-one endpoint map with a finite-difference
    Jacobian; the chart difference seeds the iteration, so endpoints must
    be well inside one chart and injectivity range.
    """
    x0 = model.require_in_domain(x0)
    x1 = model.require_in_domain(x1)
    v = x1 - x0
    if np.linalg.norm(v) == 0.0:
        return np.zeros(model.dim), 0.0

    def endpoint(vv: np.ndarray) -> np.ndarray:
        return exp_map(model, TangentPoint(x0, vv), 1.0, step)

    n = model.dim
    for _ in range(max_iter):
        res = endpoint(v) - x1
        err = np.linalg.norm(res)
        if err < tol:
            return v, model.norm(x0, v)
        J = np.empty((n, n))
        hj = 1e-6 * max(1.0, float(np.linalg.norm(v)))
        for j in range(n):
            dv = np.zeros(n)
            dv[j] = hj
            J[:, j] = (endpoint(v + dv) - endpoint(v - dv)) / (2 * hj)
        try:
            delta = np.linalg.solve(J, res)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular shooting Jacobian near v={v}") from exc
        # halve the update while it does not reduce the endpoint error
        lam = 1.0
        for _ in range(20):
            cand = v - lam * delta
            if np.linalg.norm(endpoint(cand) - x1) < err:
                v = cand
                break
            lam *= 0.5
        else:
            raise NoConvergence("geodesic shooting stalled")
    raise NoConvergence(f"geodesic shooting did not reach tolerance {tol}")


# ---------------------------------------------------------------------------
# built-in models and the model-spec parser
# ---------------------------------------------------------------------------

def euclidean(n: int, fd_step: float = DEFAULT_FD_STEP) -> MetricModel:
    """Flat metric on R^n."""
    eye = np.eye(n)
    zero = np.zeros((n, n, n))
    return MetricModel(
        dim=n,
        metric_fn=lambda x: eye,
        christoffel_fn=lambda x: zero,
        fd_step=fd_step,
        domain_check=lambda x: bool(np.all(np.isfinite(x))),
        name=f"euclidean:{n}",
        sample_lo=-2.0 * np.ones(n),
        sample_hi=2.0 * np.ones(n),
        is_flat=True,
    )


_POLE_MARGIN = 1e-3


def sphere2(fd_step: float = DEFAULT_FD_STEP) -> MetricModel:
    """Unit sphere in the colatitude/longitude chart, poles excluded."""

    def g(x):
        s = math.sin(x[0])
        return np.array([[1.0, 0.0], [0.0, s * s]])

    def gam(x):
        th = x[0]
        out = np.zeros((2, 2, 2))
        out[0, 1, 1] = -math.sin(th) * math.cos(th)
        cot = math.cos(th) / math.sin(th)
        out[1, 0, 1] = cot
        out[1, 1, 0] = cot
        return out

    return MetricModel(
        dim=2,
        metric_fn=g,
        christoffel_fn=gam,
        fd_step=fd_step,
        domain_check=lambda x: bool(np.all(np.isfinite(x))
                                    and _POLE_MARGIN < x[0] < math.pi - _POLE_MARGIN),
        name="sphere2",
        sample_lo=np.array([0.6, -2.0]),
        sample_hi=np.array([math.pi - 0.6, 2.0]),
    )


def hyperbolic2(fd_step: float = DEFAULT_FD_STEP) -> MetricModel:
    """Hyperbolic half-plane y > 0 with metric (dx^2 + dy^2) / y^2."""

    def g(x):
        w = 1.0 / (x[1] * x[1])
        return np.array([[w, 0.0], [0.0, w]])

    def gam(x):
        inv_y = 1.0 / x[1]
        out = np.zeros((2, 2, 2))
        out[0, 0, 1] = -inv_y
        out[0, 1, 0] = -inv_y
        out[1, 0, 0] = inv_y
        out[1, 1, 1] = -inv_y
        return out

    return MetricModel(
        dim=2,
        metric_fn=g,
        christoffel_fn=gam,
        fd_step=fd_step,
        domain_check=lambda x: bool(np.all(np.isfinite(x)) and x[1] > 1e-9),
        name="hyperbolic2",
        sample_lo=np.array([-1.5, 0.7]),
        sample_hi=np.array([1.5, 2.5]),
    )


def scale_metric(model: MetricModel, lam: float, keep_christoffel: bool = False) -> MetricModel:
    """The model with metric multiplied by a positive constant.

    Drops the analytic Christoffel callback by default so the scaled model
    recomputes its connection from the scaled metric (an independent path;
    analytically the connection is unchanged by constant scaling).
    """
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    base = model.metric_fn
    return MetricModel(
        dim=model.dim,
        metric_fn=lambda x: lam * np.asarray(base(x), dtype=float),
        christoffel_fn=model.christoffel_fn if keep_christoffel else None,
        fd_step=model.fd_step,
        domain_check=model.domain_check,
        name=f"{model.name}*{lam:g}",
        sample_lo=model.sample_lo,
        sample_hi=model.sample_hi,
        is_flat=model.is_flat,
    )


_EXPR_NAMES = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "log": math.log, "sqrt": math.sqrt, "cosh": math.cosh, "sinh": math.sinh,
    "tanh": math.tanh, "pi": math.pi, "abs": abs,
}


def _compile_entry(expr: str, n: int) -> Callable:
    code = compile(expr, "<metric entry>", "eval")
    for name in code.co_names:
        if name not in _EXPR_NAMES and not (name.startswith("x") and name[1:].isdigit()):
            raise ValueError(f"unknown name {name!r} in metric entry {expr!r}")

    def entry(x: np.ndarray) -> float:
        scope = {f"x{i + 1}": float(x[i]) for i in range(n)}
        scope.update(_EXPR_NAMES)
        return float(eval(code, {"__builtins__": {}}, scope))

    return entry


def _matrix_model(rows: Sequence[Sequence[str]], fd_step: float, name: str) -> MetricModel:
    n = len(rows)
    entries = [[_compile_entry(e, n) for e in row] for row in rows]
    if any(len(row) != n for row in entries):
        raise ValueError("metric matrix must be square")

    def g(x):
        return np.array([[entries[i][j](x) for j in range(n)] for i in range(n)])

    def domain(x) -> bool:
        if not np.all(np.isfinite(x)):
            return False
        try:
            gx = g(x)
        except (ArithmeticError, ValueError):
            return False
        if not np.all(np.isfinite(gx)):
            return False
        sym = 0.5 * (gx + gx.T)
        return bool(np.linalg.eigvalsh(sym)[0] > 1e-12)

    return MetricModel(dim=n, metric_fn=g, christoffel_fn=None, fd_step=fd_step,
                       domain_check=domain, name=name)


def parse_model(spec: str, fd_step: float = DEFAULT_FD_STEP) -> MetricModel:
    """Build a model from a spec string.

    Accepted forms: ``euclidean:n``, ``sphere2``, ``hyperbolic2``,
    ``diag:<e1>,...,<en>`` and ``matrix:<e11>,..;..,<enn>`` where entries
    are expressions in ``x1..xn`` (polynomials/rationals plus elementary
    functions).
    """
    from .errors import ConfigError

    spec = spec.strip()
    try:
        if spec.startswith("euclidean:"):
            n = int(spec.split(":", 1)[1])
            if n < 2:
                raise ValueError("dimension must be at least 2")
            return euclidean(n, fd_step)
        if spec == "sphere2":
            return sphere2(fd_step)
        if spec == "hyperbolic2":
            return hyperbolic2(fd_step)
        if spec.startswith("diag:"):
            entries = [e.strip() for e in spec.split(":", 1)[1].split(",")]
            n = len(entries)
            rows = [["0"] * n for _ in range(n)]
            for i, e in enumerate(entries):
                rows[i][i] = e
            return _matrix_model(rows, fd_step, spec)
        if spec.startswith("matrix:"):
            rows = [[e.strip() for e in row.split(",")]
                    for row in spec.split(":", 1)[1].split(";")]
            return _matrix_model(rows, fd_step, spec)
    except ConfigError:
        raise
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(f"bad model spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown model spec {spec!r}")
